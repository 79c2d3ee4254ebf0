import numpy as np
import pytest

from nullfront import catalog, frontgen, geometry, singular


def front_of(name, n=256, window=(-5.0, 5.0), sigma=1):
    return frontgen.normal_form(catalog.generator(name, n), sigma, window, 32)


def test_ellipse_locus_heights():
    front = front_of("ellipse")
    locus = singular.singular_locus(front)
    # 1/kappa ranges over [b^2/a, a^2/b] = [0.5, 4]
    assert np.isclose(locus.t.min(), 0.5) and np.isclose(locus.t.max(), 4.0)
    assert np.all(locus.image[:, 0] == locus.t)


def test_locus_point_is_focal_point():
    front = front_of("ellipse")
    locus = singular.singular_locus(front)
    gen = front.generator
    i = np.nonzero(np.isclose(locus.params, 0.0))[0][0]
    # at s = 0: f = (2, 0), inward normal (-1, 0), radius of curvature 1/2
    assert np.allclose(locus.image[i], [0.5, 1.5, 0.0])


def test_negative_sigma_mirrors_locus():
    plus = singular.classify(singular.singular_locus(front_of("ellipse")), front_of("ellipse"))
    fm = front_of("ellipse", sigma=-1)
    minus = singular.classify(singular.singular_locus(fm), fm)
    assert np.allclose(minus.t, -plus.t)
    assert np.array_equal(minus.labels, plus.labels)


def test_shifted_front_moves_lattice_coordinate():
    front = front_of("ellipse")
    par = frontgen.parallel_front(front, 1.0)
    a, b = singular.singular_locus(front), singular.singular_locus(par)
    assert np.allclose(b.t, a.t - 1.0)
    assert np.allclose(b.image, a.image)


def test_circle_all_non_cuspidal():
    front = front_of("circle", 64)
    locus = singular.classify(singular.singular_locus(front), front)
    assert locus.constant_curvature
    assert locus.count(singular.NON_CUSPIDAL) == 64
    assert set(locus.annotations) == {"constant curvature"}


def test_sampled_ellipse_classification():
    gen = geometry.build_curve(catalog.ellipse().position, 512)
    front = frontgen.normal_form(gen, 1, (-5.0, 5.0), 32)
    locus = singular.classify(singular.singular_locus(front), front)
    assert locus.count(singular.UNDETERMINED) == 0
    assert np.allclose(np.sort(locus.non_cuspidal_params), np.arange(4) * np.pi / 2, atol=1e-6)
    assert locus.cuspidal_arcs() == 4


def test_inflection_curve_incomplete():
    front = front_of("inflection")
    rep = singular.completeness_check(front)
    assert not rep.complete and not rep.bounded and not any(rep.sign_constant)
    locus = singular.singular_locus(front)
    assert np.any(locus.unbounded)


def test_parabola_not_compact():
    front = front_of("parabola")
    rep = singular.completeness_check(front)
    assert not rep.domain_compact and not rep.complete


def test_four_vertex_statuses():
    assert singular.four_vertex_audit(front_of("ellipse")).status == "holds"
    assert singular.four_vertex_audit(front_of("limacon")).status == "hypothesis-not-met"
    assert singular.four_vertex_audit(front_of("circle", 64)).status == "excluded"


def test_limacon_has_one_crossing():
    assert len(singular.curve_self_intersections(catalog.generator("limacon", 512))) == 1
    assert len(singular.curve_self_intersections(catalog.generator("ellipse", 512))) == 0


def test_surface_locus_annotated():
    front = frontgen.normal_form(catalog.generator("sphere", (16, 16)), 1, (-2.0, 2.0), 8)
    locus = singular.singular_locus(front)
    # both principal curvatures of the unit sphere are 1: one focal height
    assert len(locus) > 0
    assert np.allclose(locus.t, 1.0)
    assert all(a.startswith("no type criterion") for a in locus.annotations)
    with pytest.raises(ValueError):
        singular.classify(locus, front)


@pytest.mark.parametrize("name", ["ellipse", "limacon", "inflection"])
def test_rank_scan_finite_difference_path(name):
    # the finite-difference oracle agrees on curves without steep curvature bumps;
    # the spiral needs the closed-form Jacobian (see the acceptance suite)
    front = frontgen.normal_form(catalog.generator(name, 256), 1, (-5.0, 5.0), 256)
    scan = singular.rank_scan(front, finite_differences=True)
    cmp = singular.compare_scan_with_formula(front, scan)
    assert cmp["unmatched_scan_cells"] == 0 and cmp["unmatched_formula_points"] == 0


@pytest.mark.parametrize("name", sorted(catalog.CURVES) + ["sphere"])
def test_regular_set_is_dense(name):
    # proxy: on a 256-node lattice only a small fraction of samples is singular
    grid = (64, 64) if name == "sphere" else 256
    front = frontgen.normal_form(catalog.generator(name, grid), 1, (-5.0, 5.0), 256)
    if name == "sphere":
        frac = np.mean([frontgen.jet(front, t).singular().mean() for t in front.t_values])
    else:
        frac = singular.rank_scan(front).cells.mean()
    assert frac < 0.05
