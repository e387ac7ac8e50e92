"""Subtorus projections, adapted lattice bases, and convex perturbations.

The projection is an integer k x n matrix acting on moment coordinates,
y = A x.  ``adapted_basis`` produces a unimodular change of coordinates in
which the projection becomes "take the first k coordinates"; ``pullback``
turns a strictly convex function of y into the convex perturbation
psi(x) = phi(A x) used by the potential family.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from ._intlin import (
    column_hermite,
    matmul_int,
    rational_rank,
    unimodular_inverse,
)


class ProjectionError(ValueError):
    """Rank-deficient projection or non-primitive image lattice."""


@dataclass(frozen=True)
class SubtorusProjection:
    matrix: tuple  # k x n integer rows

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.matrix)
        if not rows or not rows[0]:
            raise ProjectionError("projection matrix must be nonempty")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ProjectionError("ragged projection matrix")
        k = len(rows)
        if not 1 <= k <= n:
            raise ProjectionError(f"need 1 <= k <= n, got k={k}, n={n}")
        if rational_rank(rows) < k:
            raise ProjectionError(f"projection matrix has rank < {k}")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def standard(cls, k: int, n: int) -> "SubtorusProjection":
        """Projection onto the first k of n coordinates."""
        return cls(tuple(tuple(1 if j == i else 0 for j in range(n))
                         for i in range(k)))

    @property
    def k(self) -> int:
        return len(self.matrix)

    @property
    def n(self) -> int:
        return len(self.matrix[0])

    @cached_property
    def array(self):
        return np.array(self.matrix, dtype=float)

    def apply(self, x):
        """Exact image for int/Fraction sequences, float for arrays."""
        if isinstance(x, np.ndarray):
            return np.asarray(x, dtype=float) @ self.array.T
        return tuple(sum(a * xi for a, xi in zip(row, x)) for row in self.matrix)

    def is_standard(self) -> bool:
        return self.matrix == SubtorusProjection.standard(self.k, self.n).matrix


@dataclass(frozen=True)
class AdaptedBasis:
    """Unimodular U with proj @ inverse(U) = [I_k | 0].

    In the coordinates xt = U x the projection reads off the first k
    entries of xt, and the last n-k columns of inverse(U) form a Z-basis of
    ker(proj) inside Z^n.
    """

    change_of_basis: tuple  # n x n integer rows
    split: int

    @cached_property
    def inverse(self):
        return unimodular_inverse(self.change_of_basis)

    def kernel_basis(self):
        """Rows spanning ker(proj) over Z (columns split..n-1 of U^-1)."""
        inv = self.inverse
        n = len(inv)
        return tuple(tuple(inv[i][j] for i in range(n))
                     for j in range(self.split, n))


def adapted_basis(proj: SubtorusProjection) -> AdaptedBasis:
    """Adapted lattice coordinates for a lattice-surjective projection.

    Raises ProjectionError when the image of Z^n has index > 1 in Z^k (the
    required Z-basis of the target lattice then does not exist).
    """
    A = proj.matrix
    k, n = proj.k, proj.n
    H, V = column_hermite(A)
    L = [[H[i][j] for j in range(k)] for i in range(k)]
    index = 1
    for i in range(k):
        index *= L[i][i]
    if abs(index) != 1:
        raise ProjectionError(
            f"image lattice has index {abs(index)} > 1; projection is not lattice-surjective")
    Linv = unimodular_inverse(L)
    W = [list(row) for row in V]
    # W = V @ blockdiag(L^-1, I): mix only the first k columns.
    for i in range(n):
        head = [sum(V[i][t] * Linv[t][j] for t in range(k)) for j in range(k)]
        W[i][:k] = head
    U = unimodular_inverse(W)
    check = matmul_int(A, tuple(tuple(r) for r in W))
    expect = tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(k))
    if check != expect:
        raise AssertionError("adapted basis construction failed self-check")
    return AdaptedBasis(change_of_basis=U, split=k)


@dataclass(frozen=True)
class ConvexFunction:
    """Evaluator triple (value, gradient, hessian) on R^dim.

    Callables must broadcast over leading axes: value maps (..., dim) to
    (...,), gradient to (..., dim), hessian to (..., dim, dim).
    """

    dim: int
    value: Callable
    gradient: Callable
    hessian: Callable
    label: str = "custom"

    def __call__(self, y):
        return self.value(y)


def quadratic(Q, b=None) -> ConvexFunction:
    """phi(y) = 1/2 y^T Q y + b^T y with symmetric positive definite Q."""
    Q = np.array(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("Q must be square")
    if not np.allclose(Q, Q.T, atol=1e-12):
        raise ValueError("Q must be symmetric")
    try:
        np.linalg.cholesky(Q)
    except np.linalg.LinAlgError:
        raise ValueError("Q must be positive definite") from None
    dim = Q.shape[0]
    b = np.zeros(dim) if b is None else np.array(b, dtype=float)
    if b.shape != (dim,):
        raise ValueError("b has wrong shape")

    def value(y):
        y = np.asarray(y, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", y, Q, y) + y @ b

    def gradient(y):
        y = np.asarray(y, dtype=float)
        return y @ Q + b

    def hessian(y):
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(Q, y.shape[:-1] + Q.shape).copy()

    return ConvexFunction(dim=dim, value=value, gradient=gradient,
                          hessian=hessian, label="quadratic")


def default_convex(k: int) -> ConvexFunction:
    """The fallback perturbation phi(y) = |y|^2 / 2."""
    return quadratic(np.eye(k))


def pullback(phi: ConvexFunction, proj: SubtorusProjection) -> ConvexFunction:
    """psi = phi o proj with chain-rule gradient A^T grad and Hessian A^T H A."""
    if phi.dim != proj.k:
        raise ValueError(f"convex function dim {phi.dim} != projection rank {proj.k}")
    A = proj.array
    n = proj.n

    def value(x):
        return phi.value(np.asarray(x, dtype=float) @ A.T)

    def gradient(x):
        return phi.gradient(np.asarray(x, dtype=float) @ A.T) @ A

    def hessian(x):
        H = phi.hessian(np.asarray(x, dtype=float) @ A.T)
        return np.einsum("ai,...ab,bj->...ij", A, H, A)

    return ConvexFunction(dim=n, value=value, gradient=gradient,
                          hessian=hessian, label=f"pullback[{phi.label}]")


@dataclass(frozen=True)
class ConvexityReport:
    strictly_convex: bool
    witness: tuple | None = None
    min_eigenvalue: float = float("inf")

    def __bool__(self):
        return self.strictly_convex


def strict_convexity_check(phi: ConvexFunction, lower, upper,
                           samples: int = 33, margin: float = 0.1,
                           tol: float = 1e-10) -> ConvexityReport:
    """Sampled positive-definiteness of the Hessian over an inflated box.

    The box [lower, upper] should enclose the image polytope; it is widened
    by ``margin`` on each side (a neighborhood, since strict convexity is
    assumed slightly beyond the image).  Reports the first failing sample.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if lower.shape != (phi.dim,) or upper.shape != (phi.dim,):
        raise ValueError("box bounds have wrong shape")
    axes = [np.linspace(lo - margin, hi + margin, samples)
            for lo, hi in zip(lower, upper)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    H = phi.hessian(pts)
    eigs = np.linalg.eigvalsh(H)
    mins = eigs[..., 0]
    worst = int(np.argmin(mins))
    if mins[worst] <= tol:
        return ConvexityReport(False, witness=tuple(pts[worst]),
                               min_eigenvalue=float(mins[worst]))
    return ConvexityReport(True, min_eigenvalue=float(mins.min()))
