import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nullfront import catalog, frontgen, geometry, lorentz


def test_outward_circle_slices_are_circles():
    gen = geometry.build_curve(catalog.circle(inward=False), 128)
    front = frontgen.normal_form(gen, 1, (0.0, 2.0), 5)
    F = front.samples()
    for k, c in enumerate(front.t_values):
        assert np.all(F[k, :, 0] == c)
        assert np.max(np.abs(np.linalg.norm(F[k, :, 1:], axis=-1) - (1 + c))) < 1e-14


def test_inward_circle_parallel_front_singular_at_zero():
    front = frontgen.normal_form(catalog.generator("circle", 64), 1, (-1.0, 1.0), 5)
    par = frontgen.parallel_front(front, 1.0)
    assert np.all(frontgen.jet(par, 0.0).singular())
    assert not np.any(frontgen.jet(par, -0.5).singular())
    # the image collapses to the centre
    assert np.max(np.abs(par.evaluate(0.0)[:, 1:])) < 1e-15


def test_negative_sigma_matches_direct_formula():
    gen = catalog.generator("limacon", 64)
    minus = frontgen.normal_form(gen, -1, (-2.0, 2.0), 9)
    t = minus.t_values[:, None, None]
    direct = np.concatenate([np.zeros((64, 1)), gen.points], -1)[None] \
        + t * np.concatenate([np.ones((64, 1)), -gen.normals], -1)[None]
    assert np.max(np.abs(minus.samples() - direct)) < 1e-14
    R = frontgen.time_reflection(3)
    plus = frontgen.normal_form(gen, 1, (-2.0, 2.0), 9)
    assert np.max(np.abs(minus.evaluate(0.7) - plus.evaluate(-0.7) @ R)) == 0.0


@pytest.mark.parametrize("window", [(1.0, 1.0), (2.0, -1.0), (0.0, np.inf)])
def test_bad_window_rejected(window):
    with pytest.raises(ValueError):
        frontgen.normal_form(catalog.generator("ellipse", 32), 1, window)


def test_bad_sigma_rejected():
    with pytest.raises(ValueError):
        frontgen.normal_form(catalog.generator("ellipse", 32), 0)


def test_e_normalized_field():
    front = frontgen.normal_form(catalog.generator("ellipse", 32))
    xi = frontgen.e_normalized_field(front)
    assert np.allclose(lorentz.euclidean_inner(xi, xi), 2.0)
    assert np.all(lorentz.is_future_pointing(xi))


def test_finite_difference_jet_converges():
    errs = []
    for n in (64, 128):
        gen = geometry.build_curve(catalog.ellipse().position, n)
        exact = frontgen.normal_form(catalog.generator("ellipse", n), 1, (-1.0, 1.0), 3)
        sampled = frontgen.normal_form(gen, 1, (-1.0, 1.0), 3)
        a = frontgen.jet(exact, 0.5).dF()
        b = frontgen.jet(sampled, 0.5, finite_differences=True).dF()
        errs.append(np.max(np.abs(a - b)))
    assert errs[1] < 1e-4 and errs[0] / errs[1] > 3.5


def test_rank_of_lift_jacobian_is_full():
    front = frontgen.normal_form(catalog.generator("ellipse", 64), 1, (-5, 5), 3)
    for t in (0.5, 1.0, 4.0):  # through the focal set of the ellipse
        assert np.all(frontgen.jet(front, t).rank_M() == 2)


def test_lift_injectivity():
    assert frontgen.lift_embedding_check(catalog.generator("ellipse", 256))
    assert frontgen.lift_embedding_check(catalog.generator("limacon", 256))
    assert not frontgen.lift_embedding_check(catalog.generator("doubled-circle", 256))


def test_invariant_suite_on_sphere_both_sigmas():
    gen = catalog.generator("sphere", (32, 32))
    for sigma in (1, -1):
        res = frontgen.invariant_suite(frontgen.normal_form(gen, sigma, (-0.5, 2.0), 3))
        assert res["rank_M_deficient_samples"] == 0
        assert all(abs(v) < 1e-10 for k, v in res.items() if k != "rank_M_deficient_samples")


coef = st.floats(-0.15, 0.15, allow_nan=False)


@settings(max_examples=15, deadline=None)
@given(coef, coef, coef, coef, st.sampled_from([1, -1]))
def test_invariants_on_perturbed_circles(a2, b2, a3, b3, sigma):
    curve = catalog.fourier_curve([0, 1, a2, a3], [0, 0, b2, b3], [0, 0, b3, a2], [0, 1, a3, b2])
    gen = geometry.build_curve(curve, 96)
    front = frontgen.normal_form(gen, sigma, (-3.0, 3.0), 3)
    res = frontgen.invariant_suite(front)
    assert res["rank_M_deficient_samples"] == 0
    assert all(abs(v) < 1e-9 for k, v in res.items() if k != "rank_M_deficient_samples")


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3, allow_nan=False))
def test_parallel_front_is_shift(delta):
    front = frontgen.normal_form(catalog.generator("ellipse", 64), 1, (-1.0, 1.0), 7)
    par = frontgen.parallel_front(front, delta)
    assert np.array_equal(par.samples(), front.evaluate(front.t_values + delta))
