import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nullfront import catalog, completion, frontgen, geometry


def ellipse_front(n=128):
    return frontgen.normal_form(catalog.generator("ellipse", n))


def test_single_sample_at_zero_time_returns_point():
    F = np.array([[0.0, 0.3, -1.2]])
    xi = np.array([[1.0, 0.6, 0.8]])
    patch = completion.reconstruct_generator(F, xi)
    assert np.array_equal(patch.g, [[0.3, -1.2]])
    assert np.array_equal(patch.nu, [[0.6, 0.8]])


def test_single_sample_off_zero_time():
    F = np.array([[2.0, 1.0, 1.0]])
    xi = np.array([[1.0, 0.0, 1.0]])
    patch = completion.reconstruct_generator(F, xi)
    assert np.allclose(patch.g, [[1.0, -1.0]])
    assert np.allclose(patch.line(2.0), F)


def test_bad_normals_rejected():
    F = np.array([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 2.0, 0.0]])
    xi = np.array([[1.0, 0.0, 1.0], [1.0, 0.0, 0.5], [-1.0, 0.0, 1.0]])
    patch = completion.reconstruct_generator(F, xi)
    assert list(patch.rejected) == [1, 2]
    assert len(patch) == 1
    with pytest.raises(ValueError):
        completion.reconstruct_generator(F[1:], xi[1:])


def test_conflicting_labels_raise():
    F = np.array([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    xi = np.array([[1.0, 0.0, 1.0], [1.0, 0.0, 1.0]])
    with pytest.raises(ValueError):
        completion.reconstruct_generator(F, xi, labels=[0.0, 0.0])


def test_unlabelled_samples_merge_along_rulings():
    front = ellipse_front(16)
    F = front.samples()[:, :5].reshape(-1, 3)
    xi = np.broadcast_to(front.xi()[:5], front.samples()[:, :5].shape).reshape(-1, 3)
    patch = completion.reconstruct_generator(F, xi)
    assert len(patch) == 5


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 63), st.floats(-10, 10, allow_nan=False)),
                min_size=1, max_size=40))
def test_round_trip_property(samples):
    front = ellipse_front(64)
    idx = np.array([i for i, _ in samples])
    t = np.array([s for _, s in samples])
    F = front.lifted_generator()[idx] + t[:, None] * front.xi()[idx]
    patch = completion.reconstruct_generator(F, front.xi()[idx], front.generator.params[idx])
    nodes = np.unique(idx)
    assert np.allclose(patch.g, front.generator.points[nodes], atol=1e-12)
    assert np.array_equal(patch.nu, front.generator.normals[nodes])


def test_winding_and_adoption():
    patch = completion.patch_from_front(ellipse_front(), (0.0, 2 * np.pi))
    assert patch.closed
    assert completion.winding_number(patch) == pytest.approx(1.0)
    assert patch.strongly_adopted()


def test_glue_single_patch_is_identity():
    patch = completion.patch_from_front(ellipse_front(), (0.0, 2 * np.pi))
    atlas = completion.glue([patch])
    assert atlas.class_count == len(patch) and atlas.closed
    assert np.array_equal(atlas.generator.points, patch.g)
    assert atlas.lift_mismatch < 1e-12


def test_glue_open_chain():
    front = ellipse_front()
    patches = [completion.patch_from_front(front, w) for w in [(0.0, 1.0), (0.8, 2.0)]]
    atlas = completion.glue(patches)
    assert not atlas.closed and atlas.components == 1
    assert atlas.generator.kind == "open-curve"


def test_disconnected_patches_rejected():
    front = ellipse_front()
    patches = [completion.patch_from_front(front, w) for w in [(0.0, 1.0), (3.0, 4.0)]]
    with pytest.raises(completion.NonHausdorffGluingError):
        completion.glue(patches)
    assert completion.glue(patches, strict=False).components == 2


def test_glue_is_idempotent():
    front = ellipse_front()
    windows = [(0.0, 2.5), (2.0, 4.5), (4.0, 2 * np.pi + 0.5)]
    first = completion.glue([completion.patch_from_front(front, w) for w in windows])
    again = completion.glue([completion.patch_from_front(first.front, w) for w in windows])
    assert again.class_count == first.class_count
    assert np.max(np.abs(again.generator.points - first.generator.points)) < 1e-12


def test_spiral_tube_is_non_hausdorff():
    gen = geometry.build_curve(catalog.spiral(True), 1024)
    front = frontgen.normal_form(gen, 1, (0.0, 4 * np.pi), 4)
    tube = lambda s: s + np.array([-0.1, 0.0, 0.1])
    windows = [(0, 3), (2.5, 5.5), (5, 8), (7.5, 10.5), (10, 4 * np.pi + 0.5)]
    patches = [completion.patch_from_front(front, w, tube) for w in windows]
    with pytest.raises(completion.NonHausdorffGluingError) as err:
        completion.glue(patches, period=4 * np.pi)
    assert err.value.pairs
    atlas = completion.glue(patches, strict=False, period=4 * np.pi)
    assert not atlas.manifold and len(atlas.branch_classes) == 2
    assert atlas.generator is None
    verdicts = {completion.admissibility_check(patches[a], patches[b]).verdict
                for a in range(len(patches)) for b in range(a + 1, len(patches))}
    assert "inadmissible" in verdicts


def test_admissibility_disjoint_and_admissible():
    e = ellipse_front()
    c = frontgen.normal_form(catalog.generator("circle", 128, radius=1.5))
    U = completion.patch_from_front(e, (0.0, 1.0))
    assert completion.admissibility_check(U, completion.patch_from_front(e, (3.0, 3.5))).verdict \
        == "disjoint"
    # the circle crosses the ellipse with a different normal: positions meet, lifts do not
    rep = completion.admissibility_check(U, completion.patch_from_front(c, (0.0, 0.4)))
    assert rep.verdict == "admissible" and rep.transversal is None
