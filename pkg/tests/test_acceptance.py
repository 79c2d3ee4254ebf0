"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Reference values are computed here from closed forms written out
independently of the package (numpy only), before they are compared.
"""

import time

import numpy as np
import pytest

from nullfront import catalog, cli, completion, frontgen, geometry, lorentz, singular


# -- independent closed forms -------------------------------------------------

def ellipse_point(s, a=2.0, b=1.0):
    return np.stack([a * np.cos(s), b * np.sin(s)], axis=-1)


def ellipse_inward_normal(s, a=2.0, b=1.0):
    # rotate the velocity (-a sin s, b cos s) a quarter turn to the left
    v = np.stack([-b * np.cos(s), -a * np.sin(s)], axis=-1)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def ellipse_curvature(s, a=2.0, b=1.0):
    return a * b / (a * a * np.sin(s) ** 2 + b * b * np.cos(s) ** 2) ** 1.5


def limacon_curvature(s):
    # polar form r = 1 - 2 sin s: (r^2 + 2 r'^2 - r r'') / (r^2 + r'^2)^(3/2)
    r, r1, r2 = 1 - 2 * np.sin(s), -2 * np.cos(s), 2 * np.sin(s)
    return (r * r + 2 * r1 * r1 - r * r2) / (r * r + r1 * r1) ** 1.5


def sign_change_roots(f, a, b, m=200001):
    x = np.linspace(a, b, m)
    y = f(x)
    i = np.nonzero(y[:-1] * y[1:] < 0)[0]
    return x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i])


def _pipeline(curve, grid=512):
    gen = geometry.build_curve(curve, grid)
    front = frontgen.normal_form(gen, 1, (-5.0, 5.0), 64)
    locus = singular.classify(singular.singular_locus(front), front)
    return gen, front, locus


# -- 1 ------------------------------------------------------------------------

def test_criterion_01_ellipse_reproduction(record):
    expected = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
    # oracle: kappa' of the closed form changes sign exactly at the expected points
    dk = lambda s: np.gradient(ellipse_curvature(s), s)
    oracle = sign_change_roots(dk, -0.1, 2 * np.pi - 0.1)
    assert len(oracle) == 4
    oracle = np.sort(np.mod(oracle + 0.1, 2 * np.pi) - 0.1)
    assert np.allclose(oracle, expected, atol=1e-4)

    t0 = time.perf_counter()
    gen, front, locus = _pipeline(catalog.ellipse())
    elapsed = time.perf_counter() - t0
    nc = np.sort(locus.non_cuspidal_params)
    others = locus.labels[locus.labels != singular.NON_CUSPIDAL]
    ok = (len(nc) == 4 and np.max(np.abs(nc - expected)) <= 1e-6
          and np.all(others == singular.CUSPIDAL) and elapsed < 5.0)
    report = cli.run(cli.JobConfig(generator="ellipse"))
    ok = ok and report["counts"]["non_cuspidal"] == 4
    record(1, ok, f"non-cuspidal at {np.round(nc, 9).tolist()}, "
                  f"{len(others)} cuspidal-edge, {elapsed:.2f} s")
    assert ok


# -- 2 ------------------------------------------------------------------------

def test_criterion_02_limacon_reproduction(record):
    oracle = sign_change_roots(lambda s: np.gradient(limacon_curvature(s), s), 0.1, 2 * np.pi + 0.1)
    assert len(oracle) == 2
    t0 = time.perf_counter()
    gen, front, locus = _pipeline(catalog.limacon())
    audit = singular.four_vertex_audit(front, locus)
    elapsed = time.perf_counter() - t0
    nc = np.sort(locus.non_cuspidal_params)
    ok = (len(nc) == 2 and np.allclose(nc, np.sort(np.mod(oracle, 2 * np.pi)), atol=1e-4)
          and not audit.embedded and audit.status == "hypothesis-not-met" and elapsed < 5.0)
    record(2, ok, f"{len(nc)} non-cuspidal, embedded={audit.embedded}, "
                  f"audit={audit.status}, {elapsed:.2f} s")
    assert ok


# -- 3 ------------------------------------------------------------------------

@pytest.mark.parametrize("sigma", [1, -1])
def test_criterion_03_invariant_suite(record, sigma):
    fronts = {name: catalog.generator(name, 128) for name in ("ellipse", "circle", "limacon")}
    fronts["sphere"] = catalog.generator("sphere", (128, 128))
    worst = {}
    ok = True
    for name, gen in fronts.items():
        front = frontgen.normal_form(gen, sigma, (-2.0, 3.0), 3)
        xi = front.xi()
        n = front.n
        null = np.max(np.abs(-xi[..., 0] ** 2 + np.sum(xi[..., 1:] ** 2, -1)))
        norm = np.max(np.abs(np.sum(xi * xi, -1) - 2.0))
        for t in front.t_values:
            j = frontgen.jet(front, t)
            orth = max(np.max(np.abs(lorentz.minkowski_inner(xi, fu))) for fu in j.F_u)
            rank_ok = np.all(j.rank_M() == n)
            g = frontgen.induced_metric(front, t)
            lo = g.eigenvalues[..., 0]
            in_kernel = np.max(g.null_residual())
            ok &= (null <= 1e-10 and norm <= 1e-10 and orth <= 1e-8 and rank_ok
                   and np.all(np.abs(lo) <= 1e-9) and in_kernel <= 1e-9)
            worst[name] = max(worst.get(name, 0.0), float(max(null, norm, orth, np.max(np.abs(lo)),
                                                              in_kernel)))
    record(3, ok, f"sigma={'+' if sigma > 0 else '-'} worst residual per front "
                  + ", ".join(f"{k}={v:.1e}" for k, v in worst.items()))
    assert ok


# -- 4 ------------------------------------------------------------------------

def test_criterion_04_parallel_identity(record):
    gen = catalog.generator("ellipse", 256)
    front = frontgen.normal_form(gen, 1, (-3.0, 3.0), 101)
    exact, indep = 0.0, 0.0
    # independent recomputation from the closed form: (t, f) + delta (1, nu) at t
    s = gen.params
    base = np.concatenate([np.zeros((len(s), 1)), ellipse_point(s)], axis=-1)
    xi = np.concatenate([np.ones((len(s), 1)), ellipse_inward_normal(s)], axis=-1)
    for delta in (-1.0, 0.3, 2.0):
        par = frontgen.parallel_front(front, delta)
        exact = max(exact, float(np.max(np.abs(par.samples() - front.evaluate(front.t_values + delta)))))
        F = base[None] + front.t_values[:, None, None] * xi[None]
        indep = max(indep, float(np.max(np.abs(par.samples() - (F + delta * xi[None])))))
    ok = exact == 0.0 and indep <= 1e-12
    record(4, ok, f"lattice shift max diff {exact}, F + delta xi max diff {indep:.1e}")
    assert ok


# -- 5 ------------------------------------------------------------------------

def test_criterion_05_locus_oracle(record):
    names = ["ellipse", "limacon", "circle", "inflection", "doubled-circle", "parabola", "spiral"]
    bad = {}
    for name in names:
        gen = catalog.generator(name, 512)
        front = frontgen.normal_form(gen, 1, (-5.0, 5.0), 512)
        cmp = singular.compare_scan_with_formula(front)
        assert cmp["formula_points"] > 0
        if cmp["unmatched_scan_cells"] or cmp["unmatched_formula_points"]:
            bad[name] = cmp
    ok = not bad
    record(5, ok, f"{len(names)} curves on 512x512 lattices, mismatches: {bad or 'none'}")
    assert ok


# -- 6 ------------------------------------------------------------------------

def test_criterion_06_reconstruction_round_trip(record):
    rng = np.random.default_rng(2024)
    gen = catalog.generator("ellipse", 4096)
    front = frontgen.normal_form(gen, 1, (-1.0, 1.0), 2)
    idx = rng.integers(0, 4096, 200)
    t = rng.uniform(-4.0, 4.0, 200)
    F = front.lifted_generator()[idx] + t[:, None] * front.xi()[idx]
    patch = completion.reconstruct_generator(F, front.xi()[idx], gen.params[idx])
    s = patch.params
    err_g = float(np.max(np.abs(patch.g - ellipse_point(s))))
    err_n = float(np.max(np.abs(patch.nu - ellipse_inward_normal(s))))
    ok = err_g <= 1e-9 and err_n <= 1e-9
    record(6, ok, f"{len(s)} parameters from 200 samples, |g - f| {err_g:.1e}, |nu - n| {err_n:.1e}")
    assert ok


# -- 7 ------------------------------------------------------------------------

def test_criterion_07_lightcone_double_cover(record):
    pts, nrm, theta = catalog.lightcone_samples()
    q = -pts[:, 0] ** 2 + pts[:, 1] ** 2 + pts[:, 2] ** 2
    patch = completion.reconstruct_generator(pts, nrm, theta, closed=True)
    # the normal at angle theta is (sin 2 theta, cos 2 theta): theta and theta + pi agree
    expected_nu = np.stack([np.sin(2 * patch.params), np.cos(2 * patch.params)], axis=-1)
    nu_ok = np.max(np.abs(patch.nu - expected_nu)) <= 1e-12
    wind = completion.winding_number(patch)
    embedded = patch.strongly_adopted()
    ok = (np.max(np.abs(q)) == 0.0 and nu_ok and abs(abs(wind) - 2.0) < 1e-9 and not embedded
          and np.max(np.abs(patch.g)) <= 1e-12)
    record(7, ok, f"max|<F,F>| = {np.max(np.abs(q))}, winding {wind:+.0f}, "
                  f"lift embedded={embedded}")
    assert ok


# -- 8 ------------------------------------------------------------------------

def test_criterion_08_gluing_round_trip(record):
    gen = catalog.generator("ellipse", 512)
    front = frontgen.normal_form(gen, 1, (-2.0, 2.0), 8)
    windows = [(0.0, 2.5), (2.0, 4.5), (4.0, 2 * np.pi + 0.5)]
    patches = [completion.patch_from_front(front, w, t_values=[-1.5, 0.0, 0.7, 2.0])
               for w in windows]
    # oracle: the number of distinct nodes the windows touch
    s = gen.params
    touched = set()
    for lo, hi in windows:
        touched |= set(np.nonzero(lo + np.mod(s - lo, 2 * np.pi) <= hi)[0].tolist())
    atlas = completion.glue(patches)
    pts = atlas.generator.points
    # the completion traverses the ellipse: compare up to the starting node
    shift = int(np.argmin(np.linalg.norm(ellipse_point(s) - pts[0], axis=-1)))
    same = np.max(np.abs(np.roll(ellipse_point(s), -shift, axis=0) - pts))
    ok = (atlas.closed and atlas.components == 1 and atlas.class_count == len(touched)
          and atlas.lift_mismatch <= 1e-9 and same <= 1e-12)
    record(8, ok, f"{atlas.class_count} classes / {len(touched)} distinct nodes, closed={atlas.closed}, "
                  f"max |L_F - L_G o Phi| {atlas.lift_mismatch:.1e}")
    assert ok


# -- 9 ------------------------------------------------------------------------

def _spiral_windows(bump, n=2048):
    gen = geometry.build_curve(catalog.spiral(bump), n)
    front = frontgen.normal_form(gen, 1, (0.0, 4 * np.pi), 4)
    half = 1.0  # bump half-width 0.5 plus a margin of 0.5
    strip = lambda x: x + np.array([-0.1, 0.0, 0.1])  # tube around t = s
    inner = completion.patch_from_front(front, (np.pi - half, np.pi + half), strip)
    outer = completion.patch_from_front(front, (3 * np.pi - half, 3 * np.pi + half), strip)
    return inner, outer


def test_criterion_09_spiral_admissibility(record):
    with_bump = completion.admissibility_check(*_spiral_windows(True))
    flat = completion.admissibility_check(*_spiral_windows(False))
    ok = with_bump.verdict == "inadmissible" and flat.verdict == "related"
    record(9, ok, f"bump: {with_bump.verdict} ({len(with_bump.witnesses)} contact pairs), "
                  f"omega=0: {flat.verdict} ({flat.related_pairs} related pairs)")
    assert ok


# -- 10 -----------------------------------------------------------------------

def test_criterion_10_subspace_lemma_sweep(record):
    rng = np.random.default_rng(10)
    failures, complement_failures = 0, 0
    for _ in range(1000):
        ambient = int(rng.integers(3, 7))
        V, W, N = lorentz.random_lemma_triple(rng, ambient)
        rep = lorentz.check_subspace_lemma(V, W, N)
        meet = V.dim + W.dim - np.linalg.matrix_rank(np.vstack([V.basis, W.basis]))
        if not rep.hypotheses_hold or not rep.conclusion or meet != 0:
            failures += 1
    for _ in range(1000):
        ambient = int(rng.integers(3, 7))
        V = lorentz.random_nondegenerate_subspace(rng, ambient)
        Vp = lorentz.orthogonal_complement(V)
        if np.linalg.matrix_rank(np.vstack([V.basis, Vp.basis])) != ambient:
            complement_failures += 1
    ok = failures == 0 and complement_failures == 0
    record(10, ok, f"lemma failures {failures}/1000, rank(V + V^perp) failures {complement_failures}/1000")
    assert ok
