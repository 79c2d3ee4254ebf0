import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from nullfront import lorentz
from nullfront.lorentz import Subspace

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_metric_signature():
    assert np.array_equal(np.diag(lorentz.metric(4)), [-1, 1, 1, 1])
    assert lorentz.minkowski_inner(lorentz.e0(3), lorentz.e0(3)) == -1.0


def test_null_and_future_pointing():
    v = np.array([1.0, 0.6, 0.8])
    assert lorentz.is_null(v)
    assert lorentz.is_future_pointing(v)
    assert not lorentz.is_future_pointing(-v)
    with pytest.raises(ValueError):
        lorentz.is_future_pointing(np.zeros(3))


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        lorentz.minkowski_inner(np.ones(3), np.ones(4))


@settings(max_examples=60, deadline=None)
@given(arrays(float, 4, elements=finite), arrays(float, 4, elements=finite),
       arrays(float, 4, elements=finite), finite)
def test_inner_product_bilinear_symmetric(u, v, w, a):
    ip = lorentz.minkowski_inner
    assert ip(u, v) == ip(v, u)
    scale = 1 + abs(a) * (np.abs(u).max() + 1) * (np.abs(w).max() + 1) * 4
    assert abs(ip(a * u + v, w) - (a * ip(u, w) + ip(v, w))) <= 1e-9 * scale


def test_subspace_rejects_dependent_rows():
    with pytest.raises(ValueError):
        Subspace(np.array([[1.0, 0, 0], [2.0, 0, 0]]))
    assert Subspace.span([1.0, 0, 0], [2.0, 0, 0]).dim == 1


def test_complement_dimension_and_degeneracy():
    null_line = Subspace(np.array([[1.0, 1.0, 0.0]]))
    perp = lorentz.orthogonal_complement(null_line)
    assert perp.dim == 2
    assert perp.contains([1.0, 1.0, 0.0])  # a null line lies in its own complement
    assert lorentz.degenerate_vector(perp) is not None
    spacelike = Subspace(np.array([[0.0, 1.0, 0.0]]))
    assert lorentz.degenerate_vector(spacelike) is None


def test_lemma_reports_failed_hypothesis():
    N = Subspace(np.array([[1.0, 0.0, 0.0]]))  # timelike, not null
    V = Subspace(np.array([[0.0, 1.0, 0.0]]))
    W = Subspace(np.array([[0.0, 0.0, 1.0]]))
    rep = lorentz.check_subspace_lemma(V, W, N)
    assert "n_is_null_line" in rep.failed_hypotheses
    assert rep.conclusion is None


def test_lemma_counterexample_without_perpendicularity():
    # V = W = N^perp-line spanned by a spacelike vector: W perp V fails
    N = Subspace(np.array([[1.0, 1.0, 0.0]]))
    V = Subspace(np.array([[0.0, 0.0, 1.0]]))
    rep = lorentz.check_subspace_lemma(V, V, N)
    assert not rep.w_perp_v and rep.conclusion is None


@pytest.mark.parametrize("ambient", [3, 4, 5, 6])
def test_random_triples_satisfy_lemma(ambient):
    rng = np.random.default_rng(ambient)
    for _ in range(50):
        rep = lorentz.check_subspace_lemma(*lorentz.random_lemma_triple(rng, ambient))
        assert rep.hypotheses_hold and rep.conclusion


def test_nondegenerate_complement_is_direct_sum():
    rng = np.random.default_rng(1)
    for _ in range(50):
        V = lorentz.random_nondegenerate_subspace(rng, 5)
        Vp = lorentz.orthogonal_complement(V)
        assert V.dim + Vp.dim == 5
        assert lorentz.intersection_dim(V, Vp) == 0
