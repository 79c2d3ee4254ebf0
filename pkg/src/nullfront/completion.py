"""Reconstruction of generating data from null-front samples, and gluing.

A patch stores, per parameter sample x, the generating point g(x) and unit
normal nu(x) recovered from front samples (F(q), xi(q)) through

    tau(q) = F^0(q),    g = spatial part of F(q) - tau(q) xi(q),    xi = (1, nu).

Samples on the same ruling line give the same (g, nu) and collapse to one
parameter sample.  Gluing merges related samples of several patches with a
connected-component search and stitches the classes into one ordered chain (curves only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .frontgen import NullFront, lift_is_injective, normal_form
from .geometry import GeneratingFront, curve_from_samples
from .lorentz import euclidean_inner, minkowski_inner

__all__ = [
    "Admissibility",
    "Atlas",
    "NonHausdorffGluingError",
    "Patch",
    "admissibility_check",
    "glue",
    "lift_residual",
    "patch_from_front",
    "reconstruct_generator",
    "related",
    "winding_number",
]


class NonHausdorffGluingError(RuntimeError):
    """The quotient of the glued samples is not a 1-manifold."""

    def __init__(self, message, pairs):
        super().__init__(message)
        self.pairs = pairs


@dataclass(frozen=True, eq=False)
class Patch:
    """Generating data (g, nu) of one chart, ordered by parameter.

    ``inputs`` keeps the front samples the patch was reconstructed from, as
    ``(points, normals)``; ``sample_index`` maps each input to its parameter
    sample and ``tau`` holds its height.  ``rejected`` lists inputs that
    failed the null-normal preconditions.
    """

    params: np.ndarray
    g: np.ndarray
    nu: np.ndarray
    epsilon: float = np.inf
    t_center: float = 0.0
    closed: bool = False
    inputs: tuple | None = None
    sample_index: np.ndarray | None = None
    tau: np.ndarray | None = None
    rejected: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))

    def __len__(self):
        return len(self.params)

    @property
    def lift(self) -> np.ndarray:
        """l(x) = (g(x), nu(x))."""
        return np.concatenate([self.g, self.nu], axis=-1)

    @property
    def xi(self) -> np.ndarray:
        return np.concatenate([np.ones((len(self), 1)), self.nu], axis=-1)

    def spacing(self) -> np.ndarray:
        """Distance in l between consecutive samples (wrapping if closed)."""
        lift = self.lift
        nxt = np.roll(lift, -1, axis=0) if self.closed else lift[1:]
        return np.linalg.norm(nxt - lift[: len(nxt)], axis=-1)

    def strongly_adopted(self, tol: float | None = None) -> bool:
        """True when l is injective on the samples (pairwise scan)."""
        ok, _ = lift_is_injective(self.lift, closed=self.closed, tol=tol)
        return ok

    def line(self, t) -> np.ndarray:
        """Ruling points (0, g) + t (1, nu) at the given t, per sample."""
        t = np.asarray(t, dtype=float)
        base = np.concatenate([np.zeros((len(self), 1)), self.g], axis=-1)
        return base + t[..., None, None] * self.xi


def _check_null_normals(points, normals, tol):
    norm_ok = np.abs(euclidean_inner(normals, normals) - 2.0) <= tol
    null_ok = np.abs(minkowski_inner(normals, normals)) <= tol
    future = normals[..., 0] > 0
    return norm_ok & null_ok & future & np.all(np.isfinite(points), axis=-1)


def reconstruct_generator(points, normals, labels=None, *, tol: float = 1e-9,
                          closed: bool = False, epsilon: float = np.inf,
                          t_center: float | None = None) -> Patch:
    """Recover (g, nu) from front samples (F(q), xi(q)).

    ``labels`` assigns each sample to a parameter value; samples sharing a
    label must lie on one ruling line and are merged.  Without labels,
    samples are merged when their (g, nu) agree within ``tol`` and parameters
    are the merged-sample indices.  Samples whose normal is not null,
    future-pointing and of Euclidean length sqrt(2) within ``tol`` are
    rejected.
    """
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    if points.shape != normals.shape or points.ndim != 2:
        raise ValueError("points and normals must both have shape (m, n+1)")
    good = _check_null_normals(points, normals, tol)
    rejected = np.nonzero(~good)[0]
    if not good.any():
        raise ValueError("no sample satisfies the null-normal preconditions")
    F, xi = points[good], normals[good]
    tau = F[:, 0]
    g_all = (F - tau[:, None] * xi)[:, 1:]
    nu_all = xi[:, 1:]
    lift = np.concatenate([g_all, nu_all], axis=-1)

    if labels is not None:
        labels = np.asarray(labels, dtype=float)[good]
        params, inverse = np.unique(labels, return_inverse=True)
        inverse = inverse.ravel()
    else:
        inverse = _merge_by_value(lift, tol)
        params = np.arange(inverse.max() + 1, dtype=float)
    k = len(params)
    counts = np.bincount(inverse, minlength=k)
    mean = np.zeros((k, lift.shape[1]))
    np.add.at(mean, inverse, lift)
    mean /= counts[:, None]
    spread = np.max(np.linalg.norm(lift - mean[inverse], axis=-1))
    if spread > max(tol, 1e-12) * max(1.0, float(np.max(np.abs(lift)))) * 10:
        raise ValueError(f"samples sharing a parameter are on different ruling lines "
                         f"(spread {spread:.3g})")
    # first representative per class keeps exact values (no averaging noise)
    first = np.full(k, -1)
    first[inverse[::-1]] = np.arange(len(inverse))[::-1]
    g, nu = g_all[first], nu_all[first]
    sample_index = np.full(len(points), -1)
    sample_index[good] = inverse
    all_tau = np.full(len(points), np.nan)
    all_tau[good] = tau
    tc = float(np.mean(tau)) if t_center is None else float(t_center)
    return Patch(params, g, nu, epsilon, tc, closed, (points, normals), sample_index,
                 all_tau, rejected)


def _classes(n: int, pairs) -> np.ndarray:
    """Connected-component index per node of the graph on ``n`` nodes with
    edges ``pairs``, numbered in order of first appearance."""
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[inverse.ravel()]


def _merge_by_value(values: np.ndarray, tol: float) -> np.ndarray:
    """Class index per row, merging rows closer than ``tol`` (in first-seen order)."""
    return _classes(len(values), cKDTree(values).query_pairs(r=tol, output_type="ndarray"))


def winding_number(patch: Patch) -> float:
    """Turns of nu along the ordered samples (closed planar patches)."""
    if patch.nu.shape[1] != 2:
        raise ValueError("winding numbers are defined for plane curves")
    ang = np.unwrap(np.arctan2(patch.nu[:, 1], patch.nu[:, 0]))
    total = ang[-1] - ang[0]
    if patch.closed:
        step = np.angle(np.exp(1j * (ang[0] - ang[-1])))
        total += step
    return float(total / (2 * np.pi))


def patch_from_front(front: NullFront, s_range, t_values=None, *,
                     t_offset: float | None = None, epsilon: float = np.inf) -> Patch:
    """Patch of a curve front over nodes with parameter in ``s_range``.

    Each node is sampled at the ruling values ``t_values`` (default three
    values around ``t_offset``, or around 0) and the patch is rebuilt from
    those front samples alone.  ``s_range`` may extend past one period; nodes
    are taken modulo the period and the patch is closed when it covers every
    node.  ``t_values`` may also be a callable returning the ruling values for
    a node parameter, e.g. ``lambda s: s + np.array([-0.1, 0, 0.1])`` for a
    strip around the curve t = s.
    """
    gen = front.generator
    if not gen.is_curve:
        raise ValueError("patches are built for curve fronts")
    s = gen.params
    lo, hi = map(float, s_range)
    if gen.closed:
        period = gen.period()
        shifted = lo + np.mod(s - lo, period)
        pick = np.nonzero(shifted <= hi)[0]
        pick = pick[np.argsort(shifted[pick])]
        # unwrapped labels keep a window that wraps past the period in order
        labels_base = shifted[pick]
    else:
        pick = np.nonzero((s >= lo) & (s <= hi))[0]
        labels_base = s[pick]
    if len(pick) < 2:
        raise ValueError("window contains fewer than two nodes")
    closed = gen.closed and len(pick) == len(s)
    if callable(t_values):
        tv = [np.atleast_1d(np.asarray(t_values(x), dtype=float)) for x in labels_base]
    else:
        c = 0.0 if t_offset is None else float(t_offset)
        base = np.array([-0.5, 0.0, 0.5]) + c if t_values is None else np.asarray(t_values, float)
        tv = [base] * len(pick)
    pts, nrm, lab = [], [], []
    xi = front.xi()
    lifted = front.lifted_generator()
    for node, x, ts in zip(pick, labels_base, tv):
        ts = ts + front.shift
        pts.append(lifted[node] + ts[:, None] * xi[node])
        nrm.append(np.repeat(xi[node][None], len(ts), axis=0))
        lab.append(np.full(len(ts), x))
    patch = reconstruct_generator(np.concatenate(pts), np.concatenate(nrm),
                                  np.concatenate(lab), closed=closed, epsilon=epsilon,
                                  t_center=float(np.mean(np.concatenate(tv))))
    return patch


# -- relatedness --------------------------------------------------------------

def _point_to_polyline(p: np.ndarray, poly: np.ndarray):
    """Distance from p to the polyline and whether the foot is an endpoint."""
    a, b = poly[:-1], poly[1:]
    ab = b - a
    denom = np.maximum(np.sum(ab * ab, axis=-1), 1e-300)
    u = np.clip(np.sum((p - a) * ab, axis=-1) / denom, 0.0, 1.0)
    foot = a + u[:, None] * ab
    d = np.linalg.norm(p - foot, axis=-1)
    k = int(np.argmin(d))
    end = (k == 0 and u[k] == 0.0) or (k == len(u) - 1 and u[k] == 1.0)
    return float(d[k]), bool(end)


def _window(patch: Patch, center: int, radius: int) -> np.ndarray:
    m = len(patch)
    idx = np.arange(center - radius, center + radius + 1)
    if patch.closed:
        return np.mod(idx, m)
    return idx[(idx >= 0) & (idx < m)]


def _neighbours_match(U: Patch, i: int, V: Patch, j: int, k: int, band_factor: float) -> bool:
    lu, lv = U.lift, V.lift
    sp = U.spacing()
    poly = lv[_window(V, j, 2 * k + 2)]
    if len(poly) < 2:
        return True
    for nb in _window(U, i, k):
        if nb == i:
            continue
        local = sp[min(nb, len(sp) - 1)] if len(sp) else 0.0
        d, at_end = _point_to_polyline(lu[nb], poly)
        if at_end:
            # neighbour lies beyond the end of V: nothing to compare against
            continue
        if d > band_factor * local + 1e-12:
            return False
    return True


def related(U: Patch, i: int, V: Patch, j: int, tol: float = 1e-6, k: int = 5,
            band_factor: float = 0.25) -> bool:
    """Discrete (l_U, l_V)-relatedness of sample i of U and sample j of V.

    Requires |l_U(i) - l_V(j)| <= tol, and that the k neighbours on either
    side of each sample lie within ``band_factor`` times the local spacing of
    the other patch's l-polyline (the open-set condition at sample
    resolution).  Neighbours past the end of the other patch are skipped.
    """
    if np.linalg.norm(U.lift[i] - V.lift[j]) > tol:
        return False
    return (_neighbours_match(U, i, V, j, k, band_factor)
            and _neighbours_match(V, j, U, i, k, band_factor))


def _related_pairs(U: Patch, V: Patch, tol: float, k: int) -> np.ndarray:
    tree = cKDTree(V.lift)
    hits = tree.query_ball_point(U.lift, r=tol)
    out = [(i, j) for i, js in enumerate(hits) for j in js if related(U, i, V, j, tol, k)]
    return np.asarray(out, dtype=int).reshape(-1, 2)


# -- gluing -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Atlas:
    """Glued patches: sample classes, their chain order and the completion.

    ``class_of[p][i]`` is the class of sample i of patch p; ``chain`` lists
    classes in order along the quotient curve.  ``generator`` and ``front``
    are None when the quotient is not a single 1-manifold (non-strict mode).
    """

    patches: list
    class_of: list
    classes: list
    chain: np.ndarray
    closed: bool
    generator: GeneratingFront | None
    front: NullFront | None
    transitions: dict
    manifold: bool
    lift_mismatch: float
    line_mismatch: float
    branch_classes: np.ndarray
    components: int

    @property
    def patch_count(self) -> int:
        return len(self.patches)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def phi(self, p: int) -> np.ndarray:
        """Chain position of every sample of patch p (the map onto Sigma_F)."""
        pos = np.empty(self.class_count, dtype=int)
        pos[self.chain] = np.arange(len(self.chain))
        return pos[self.class_of[p]]


def lift_residual(patch: Patch, G: NullFront, phi: np.ndarray) -> float:
    """max |L_F(q) - L_G(tau(q), Phi(q))| over the patch's input samples.

    Patches without stored inputs are checked on their ruling lines at
    t in {-1, 0, 1}.
    """
    gpts = G.generator.points
    gnu = G.sigma * G.generator.normals
    if patch.inputs is not None:
        pts, nrm = patch.inputs
        ok = patch.sample_index >= 0
        node = phi[patch.sample_index[ok]]
        tau = patch.tau[ok]
        xi_g = np.concatenate([np.ones((len(node), 1)), gnu[node]], axis=-1)
        F_g = np.concatenate([np.zeros((len(node), 1)), gpts[node]], axis=-1) + tau[:, None] * xi_g
        return float(max(np.max(np.abs(F_g - pts[ok])), np.max(np.abs(xi_g - nrm[ok]))))
    worst = 0.0
    for t in (-1.0, 0.0, 1.0):
        xi_g = np.concatenate([np.ones((len(phi), 1)), gnu[phi]], axis=-1)
        F_g = np.concatenate([np.zeros((len(phi), 1)), gpts[phi]], axis=-1) + t * xi_g
        worst = max(worst, float(np.max(np.abs(F_g - patch.line(t)))))
    return worst


def glue(patches, tol: float = 1e-6, k: int = 5, strict: bool = True,
         period: float = 2 * np.pi) -> Atlas:
    """Glue curve patches along related samples into one generating curve.

    Classes are the connected components of the relatedness graph.  The
    quotient must be a 1-manifold: every class has at most two neighbouring
    classes.  Otherwise a :class:`NonHausdorffGluingError` is raised, or with
    ``strict=False`` an Atlas without completion is returned whose
    ``branch_classes`` list the offending classes.

    The completed generator is parametrised uniformly over ``period`` (closed
    chains) or by chain index (open chains).
    """
    patches = list(patches)
    if not patches:
        raise ValueError("need at least one patch")
    if any(p.g.shape[1] != 2 for p in patches):
        raise ValueError("gluing is implemented for curve patches")
    offsets = np.cumsum([0] + [len(p) for p in patches])
    transitions, edges = {}, []
    for a in range(len(patches)):
        for b in range(a + 1, len(patches)):
            pairs = _related_pairs(patches[a], patches[b], tol, k)
            transitions[(a, b)] = pairs
            edges.append(pairs + [offsets[a], offsets[b]])
    flat_class = _classes(offsets[-1], np.concatenate(edges) if edges else [])
    uniq = np.arange(flat_class.max() + 1)
    class_of = [flat_class[offsets[p]:offsets[p + 1]] for p in range(len(patches))]
    members = [[] for _ in uniq]
    for p, cls in enumerate(class_of):
        for i, c in enumerate(cls):
            members[c].append((p, i))
    classes = [np.asarray(m, dtype=int) for m in members]

    lifts = [p.lift for p in patches]
    rep = np.array([lifts[m[0][0]][m[0][1]] for m in classes])
    spread = max(float(np.max(np.linalg.norm(
        np.array([lifts[p][i] for p, i in m]) - rep[c], axis=-1))) for c, m in enumerate(classes))
    if spread > 2 * tol:
        raise NonHausdorffGluingError(f"merged samples differ by {spread:.3g} > 2 tol", [])

    # neighbour graph of classes
    nbrs = [set() for _ in classes]
    for p, cls in enumerate(class_of):
        m = len(cls)
        steps = range(m) if patches[p].closed else range(m - 1)
        for i in steps:
            a, b = cls[i], cls[(i + 1) % m]
            if a != b:
                nbrs[a].add(b)
                nbrs[b].add(a)
    degree = np.array([len(s) for s in nbrs])
    branch = np.nonzero(degree > 2)[0]
    line_mismatch = _line_mismatch(patches, transitions)
    if len(branch):
        if strict:
            offending = [tuple(map(tuple, classes[c])) for c in branch]
            raise NonHausdorffGluingError(
                f"non-Hausdorff gluing detected at {len(branch)} sample classes", offending)
        return Atlas(patches, class_of, classes, np.empty(0, dtype=int), False, None, None,
                     transitions, False, np.nan, line_mismatch, branch,
                     _components(nbrs))

    components = _components(nbrs)
    chain, closed = _walk(nbrs, class_of[0])
    if components != 1:
        if strict:
            raise NonHausdorffGluingError(f"quotient has {components} components", [])
        return Atlas(patches, class_of, classes, np.empty(0, dtype=int), False, None, None,
                     transitions, True, np.nan, line_mismatch, branch, components)

    g = rep[chain, :2]
    nu = rep[chain, 2:]
    nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
    K = len(chain)
    params = np.arange(K) * (period / K) if closed else np.arange(K, dtype=float)
    gen = curve_from_samples(params, g, nu, closed=closed, name="completion")
    G = normal_form(gen, 1, (-1.0, 1.0), 3)
    pos = np.empty(K, dtype=int)
    pos[chain] = np.arange(K)
    mismatch = max(lift_residual(p, G, pos[class_of[q]]) for q, p in enumerate(patches))
    return Atlas(patches, class_of, classes, chain, closed, gen, G, transitions, True,
                 mismatch, line_mismatch, branch, components)


def _components(nbrs) -> int:
    seen = np.zeros(len(nbrs), dtype=bool)
    count = 0
    for start in range(len(nbrs)):
        if seen[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = True
        while stack:
            c = stack.pop()
            for d in nbrs[c]:
                if not seen[d]:
                    seen[d] = True
                    stack.append(d)
    return count


def _walk(nbrs, first_patch_classes):
    """Order classes along the quotient, oriented like the first patch."""
    n = len(nbrs)
    ends = [c for c in range(n) if len(nbrs[c]) < 2]
    if ends:
        # open chain: start from the end nearer the start of patch 0
        pos0 = {c: i for i, c in enumerate(first_patch_classes)}
        start = min(ends, key=lambda c: pos0.get(c, n))
        closed = False
    else:
        start = int(first_patch_classes[0])
        closed = True
    chain = [start]
    prev = -1
    if closed and len(first_patch_classes) > 1:
        nxt = int(first_patch_classes[1])
        if nxt != start and nxt in nbrs[start]:
            prev, chain = start, [start, nxt]
    while True:
        cur = chain[-1]
        options = [d for d in nbrs[cur] if d != prev and d != cur]
        if not options:
            break
        nxt = options[0]
        if closed and nxt == chain[0]:
            break
        if nxt in chain[-3:]:
            break
        prev = cur
        chain.append(nxt)
        if len(chain) > n:
            break
    return np.asarray(chain, dtype=int), closed


def _line_mismatch(patches, transitions) -> float:
    """max |L_U(t, x) - L_V(t, phi(x))| over merged pairs at three t values."""
    worst = 0.0
    for (a, b), pairs in transitions.items():
        if len(pairs) == 0:
            continue
        for t in (-1.0, 0.0, 1.0):
            la = patches[a].line(t)[pairs[:, 0]]
            lb = patches[b].line(t)[pairs[:, 1]]
            worst = max(worst, float(np.max(np.abs(la - lb))))
    return worst


# -- admissibility ------------------------------------------------------------

@dataclass(frozen=True)
class Admissibility:
    """Verdict ``disjoint``, ``related``, ``admissible`` or ``inadmissible``.

    ``witnesses`` are unrelated sample pairs whose l-images come closer than
    ``l_near``; ``angles`` are the tangent angles of the two l-curves there.
    """

    verdict: str
    related_pairs: int
    position_near_pairs: int
    witnesses: np.ndarray
    angles: np.ndarray
    min_witness_distance: float
    l_near: float
    angle_tol: float

    @property
    def transversal(self) -> bool | None:
        if len(self.angles) == 0:
            return None
        return bool(np.all(self.angles >= self.angle_tol))


def _tangents(patch: Patch) -> np.ndarray:
    lift = patch.lift
    if patch.closed:
        d = np.roll(lift, -1, axis=0) - np.roll(lift, 1, axis=0)
    else:
        d = np.gradient(lift, axis=0)
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def admissibility_check(U: Patch, V: Patch, tol: float = 1e-6, *, k: int = 5,
                        position_factor: float = 3.0, near_factor: float = 0.5,
                        angle_tol: float = 1e-3) -> Admissibility:
    """Compare the l-images of two patches.

    * ``related``: some samples are related and no unrelated near-contact exists;
    * ``inadmissible``: unrelated samples come within ``near_factor`` times
      the finer l-spacing of each other (tangent angles reported);
    * ``admissible``: positions come within ``position_factor`` times the
      coarser position spacing but the l-images stay apart;
    * ``disjoint``: no position-near pairs at all.

    For plane curves the l-images are curves in the 3-dimensional R^2 x S^1,
    where two curves can never meet transversally; any unrelated contact is
    therefore non-transversal, and the angle is a diagnostic only.
    """
    rel = _related_pairs(U, V, tol, k)
    is_rel_u = np.zeros(len(U), dtype=bool)
    is_rel_v = np.zeros(len(V), dtype=bool)
    if len(rel):
        is_rel_u[rel[:, 0]] = True
        is_rel_v[rel[:, 1]] = True
    su, sv = U.spacing(), V.spacing()
    l_near = near_factor * float(min(np.min(su), np.min(sv)))
    gu = np.linalg.norm(np.diff(U.g, axis=0), axis=-1)
    gv = np.linalg.norm(np.diff(V.g, axis=0), axis=-1)
    p_near = position_factor * float(max(np.max(gu), np.max(gv)))

    pos_pairs = cKDTree(U.g).query_ball_tree(cKDTree(V.g), r=p_near)
    n_pos = sum(len(x) for x in pos_pairs)

    rel_set = set(map(tuple, rel))
    near = cKDTree(U.lift).query_ball_tree(cKDTree(V.lift), r=l_near)
    wit = [(i, j) for i, js in enumerate(near) for j in js if (i, j) not in rel_set
           and not (is_rel_u[i] and is_rel_v[j])]
    witnesses = np.asarray(wit, dtype=int).reshape(-1, 2)
    angles = np.empty(0)
    dmin = np.inf
    if len(witnesses):
        tu, tv = _tangents(U)[witnesses[:, 0]], _tangents(V)[witnesses[:, 1]]
        cosang = np.clip(np.abs(np.sum(tu * tv, axis=-1)), 0.0, 1.0)
        angles = np.arccos(cosang)
        dmin = float(np.min(np.linalg.norm(U.lift[witnesses[:, 0]] - V.lift[witnesses[:, 1]],
                                           axis=-1)))
        verdict = "inadmissible"
    elif len(rel):
        verdict = "related"
    elif n_pos:
        verdict = "admissible"
    else:
        verdict = "disjoint"
    return Admissibility(verdict, len(rel), n_pos, witnesses, angles, dmin, l_near, angle_tol)
