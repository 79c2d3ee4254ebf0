"""Linear algebra on Lorentz-Minkowski space R^{n+1}_1.

Vectors are plain numpy arrays whose coordinate 0 is the time coordinate;
the inner product has signature (-, +, ..., +).  All functions broadcast
over leading axes, so an ``(m, n+1)`` array is treated as ``m`` vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

DEFAULT_TOL = 1e-10

__all__ = [
    "DEFAULT_TOL",
    "Subspace",
    "SubspaceLemmaReport",
    "as_vector",
    "check_subspace_lemma",
    "degenerate_vector",
    "e0",
    "euclidean_inner",
    "euclidean_norm",
    "height",
    "intersection_dim",
    "is_future_pointing",
    "is_null",
    "metric",
    "minkowski_inner",
    "orthogonal_complement",
    "random_lemma_triple",
    "random_nondegenerate_subspace",
]


def as_vector(coords) -> np.ndarray:
    """Validate and return a single vector of R^{n+1}_1 (n >= 2)."""
    v = np.asarray(coords, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D coordinate array, got shape {v.shape}")
    if v.shape[0] < 3:
        raise ValueError(f"R^{{n+1}}_1 needs n >= 2, got {v.shape[0]} coordinates")
    return v


def e0(dim: int) -> np.ndarray:
    """Unit time vector (1, 0, ..., 0) of R^dim_1."""
    v = np.zeros(dim)
    v[0] = 1.0
    return v


def metric(dim: int) -> np.ndarray:
    """Gram matrix diag(-1, 1, ..., 1) of the Lorentzian product."""
    eta = np.eye(dim)
    eta[0, 0] = -1.0
    return eta


def _check_same_dim(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    return u, v


def minkowski_inner(u, v):
    """Lorentzian product -u0*v0 + sum_{i>=1} ui*vi."""
    u, v = _check_same_dim(u, v)
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


def euclidean_inner(u, v):
    u, v = _check_same_dim(u, v)
    return np.sum(u * v, axis=-1)


def euclidean_norm(u):
    u = np.asarray(u, dtype=float)
    return np.sqrt(np.sum(u * u, axis=-1))


def height(v):
    """Height function tau(v) = -<v, e0>, i.e. the time coordinate."""
    v = np.asarray(v, dtype=float)
    return -minkowski_inner(v, e0(v.shape[-1]))


def is_null(v, tol: float = DEFAULT_TOL):
    """True where |<v,v>| <= tol * (v,v)_E."""
    return np.abs(minkowski_inner(v, v)) <= tol * euclidean_inner(v, v)


def is_future_pointing(v):
    """True where v0 > 0.  The zero vector has no time orientation."""
    v = np.asarray(v, dtype=float)
    if np.any(np.all(v == 0.0, axis=-1)):
        raise ValueError("the zero vector is neither future nor past pointing")
    return v[..., 0] > 0.0


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^{n+1}_1 given by linearly independent rows.

    ``basis`` has shape ``(dim, n+1)``; ``ambient`` is needed for the zero
    subspace, which has no rows to infer it from.
    """

    basis: np.ndarray
    ambient: int = field(default=0)

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if b.size == 0:
            if self.ambient < 3:
                raise ValueError("zero subspace needs an explicit ambient dimension >= 3")
            b = np.zeros((0, self.ambient))
        amb = b.shape[1]
        if self.ambient and self.ambient != amb:
            raise ValueError(f"basis vectors have {amb} coordinates, ambient is {self.ambient}")
        if amb < 3:
            raise ValueError("R^{n+1}_1 needs n >= 2")
        if b.shape[0] and np.linalg.matrix_rank(b) != b.shape[0]:
            raise ValueError("basis vectors are linearly dependent")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "ambient", amb)

    @classmethod
    def span(cls, *vectors, ambient: int = 0) -> "Subspace":
        """Subspace spanned by ``vectors``; dependent vectors are reduced."""
        if not vectors:
            return cls(np.zeros((0, ambient)), ambient=ambient)
        m = np.atleast_2d(np.array(vectors, dtype=float))
        r = np.linalg.matrix_rank(m)
        if r == m.shape[0]:
            return cls(m)
        # orthonormal row basis of the row space
        _, _, vt = np.linalg.svd(m)
        return cls(vt[:r])

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def gram(self) -> np.ndarray:
        return self.basis @ metric(self.ambient) @ self.basis.T

    def contains(self, v, tol: float = DEFAULT_TOL) -> bool:
        v = np.asarray(v, dtype=float)
        if self.dim == 0:
            return bool(np.all(v == 0))
        return _rank(np.vstack([self.basis, v]), tol) == self.dim

    def equals(self, other: "Subspace", tol: float = DEFAULT_TOL) -> bool:
        """Span equality by the double rank test."""
        if self.ambient != other.ambient or self.dim != other.dim:
            return False
        if self.dim == 0:
            return True
        joint = _rank(np.vstack([self.basis, other.basis]), tol)
        return joint == self.dim == other.dim


def _rank(m: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    if m.shape[0] == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def intersection_dim(V: Subspace, W: Subspace, tol: float = DEFAULT_TOL) -> int:
    """dim(V ∩ W) = dim V + dim W - rank(basis V ∪ basis W)."""
    return V.dim + W.dim - _rank(np.vstack([V.basis, W.basis]), tol)


def orthogonal_complement(V: Subspace) -> Subspace:
    """Lorentzian complement {x : <x, v> = 0 for all v in V}."""
    if V.dim == 0:
        return Subspace(np.eye(V.ambient))
    ns = null_space(V.basis @ metric(V.ambient))
    return Subspace(ns.T, ambient=V.ambient)


def degenerate_vector(V: Subspace, tol: float = DEFAULT_TOL):
    """A nonzero v in V orthogonal to all of V, or None if V is non-degenerate.

    The Gram matrix counts as singular when its smallest singular value is at
    most ``tol`` times the largest.
    """
    if V.dim == 0:
        return None
    u, s, _ = np.linalg.svd(V.gram())
    if s[-1] > tol * s[0]:
        return None
    coeffs = u[:, -1]
    return coeffs @ V.basis


@dataclass(frozen=True)
class SubspaceLemmaReport:
    """Outcome of checking the (V, W, N) subspace lemma on one instance."""

    n_is_null_line: bool
    n_meets_w_trivially: bool
    v_perp_n: bool
    w_perp_n: bool
    w_perp_v: bool
    conclusion: bool | None

    @property
    def hypotheses_hold(self) -> bool:
        return all((self.n_is_null_line, self.n_meets_w_trivially,
                    self.v_perp_n, self.w_perp_n, self.w_perp_v))

    @property
    def failed_hypotheses(self) -> list[str]:
        names = ("n_is_null_line", "n_meets_w_trivially", "v_perp_n", "w_perp_n", "w_perp_v")
        return [k for k in names if not getattr(self, k)]


def _perpendicular(A: Subspace, B: Subspace, tol: float) -> bool:
    if A.dim == 0 or B.dim == 0:
        return True
    cross = A.basis @ metric(A.ambient) @ B.basis.T
    scale = np.max(np.abs(A.basis)) * np.max(np.abs(B.basis))
    return bool(np.max(np.abs(cross)) <= tol * max(scale, 1.0))


def check_subspace_lemma(V: Subspace, W: Subspace, N: Subspace,
                         tol: float = DEFAULT_TOL) -> SubspaceLemmaReport:
    """Check the hypotheses of the (V, W, N) lemma and, if they hold, V ∩ W = {0}.

    Hypotheses: N is a light-like line with N ∩ W = {0}; V and W are
    perpendicular to N; W is perpendicular to V.  Failures are reported,
    never raised.
    """
    if not (V.ambient == W.ambient == N.ambient):
        raise ValueError("subspaces live in different ambient spaces")
    n_line = N.dim == 1 and bool(is_null(N.basis[0], tol))
    n_w = intersection_dim(N, W, tol) == 0
    report = dict(
        n_is_null_line=n_line,
        n_meets_w_trivially=n_w,
        v_perp_n=_perpendicular(V, N, tol),
        w_perp_n=_perpendicular(W, N, tol),
        w_perp_v=_perpendicular(W, V, tol),
    )
    conclusion = None
    if all(report.values()):
        conclusion = intersection_dim(V, W, tol) == 0
    return SubspaceLemmaReport(conclusion=conclusion, **report)


def _random_subspace_of(rng: np.random.Generator, S: Subspace, k: int) -> Subspace:
    coeffs = rng.standard_normal((k, S.dim))
    return Subspace(coeffs @ S.basis)


def random_lemma_triple(rng: np.random.Generator, ambient: int):
    """Random (V, W, N) satisfying the lemma hypotheses by construction.

    N is a random null line, W a random subspace of N^perp avoiding N, and V a
    random subspace of N^perp ∩ W^perp = (W + N)^perp.
    """
    n = ambient - 1
    direction = rng.standard_normal(n)
    null = np.concatenate([[1.0], direction / np.linalg.norm(direction)])
    N = Subspace(null[None, :])
    n_perp = orthogonal_complement(N)  # dim n, contains N
    k = int(rng.integers(1, n))  # 1 <= dim W <= n-1
    while True:
        W = _random_subspace_of(rng, n_perp, k)
        if intersection_dim(N, W) == 0:
            break
    target = orthogonal_complement(Subspace.span(*W.basis, null))  # dim n - k
    m = int(rng.integers(1, target.dim + 1))
    V = _random_subspace_of(rng, target, m)
    return V, W, N


def random_nondegenerate_subspace(rng: np.random.Generator, ambient: int,
                                  tol: float = 1e-6) -> Subspace:
    """Random subspace whose Gram matrix is comfortably non-singular."""
    while True:
        k = int(rng.integers(1, ambient))
        V = Subspace(rng.standard_normal((k, ambient)))
        if degenerate_vector(V, tol) is None:
            return V
