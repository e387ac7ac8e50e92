"""Delzant polytopes from halfspace data.

A polytope is stored as integer facet data (primitive normals r_j and
integer offsets lambda_j) defining P = {x : l_j(x) = <x, r_j> + lambda_j >= 0}.
All combinatorial operations (vertices, smoothness certificates, lattice
points, slice charts) run in exact rational arithmetic; numpy views of the
facet data are provided for the analytic modules.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor

import numpy as np

from ._intlin import (
    integer_det,
    integer_kernel_basis,
    is_primitive,
    rational_rank,
    rational_solve,
)


class PolytopeError(ValueError):
    """Invalid halfspace data (unbounded, empty interior, bad normals...)."""


class EmptySliceError(PolytopeError):
    """Requested level set does not meet the relative interior of the image."""


@dataclass(frozen=True)
class Vertex:
    point: tuple  # exact rational coordinates
    active_facets: tuple  # 0-based facet indices where l_j vanishes

    def as_array(self):
        return np.array([float(c) for c in self.point])


@dataclass(frozen=True)
class DelzantCertificate:
    """Result of the vertex-unimodularity smoothness test."""

    smooth: bool
    vertex: tuple | None = None
    determinant: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.smooth


@dataclass(frozen=True)
class Slice:
    """Affine chart for one fiber {x in P : proj(x) = level}.

    ``chart`` rows are an integer basis of the lattice directions along the
    fiber; for a level in the relative interior of the image they form a
    Z-basis of ker(proj) inside Z^n.  ``active_facets`` lists facets that
    vanish identically on the fiber (nonempty exactly for boundary levels,
    where the fiber is a face of P).
    """

    base: "DelzantPolytope"
    level: tuple
    chart: tuple  # rows = integer direction vectors, possibly empty
    base_point: tuple  # exact rational, satisfies proj(base_point) = level
    active_facets: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.chart)

    @cached_property
    def chart_array(self):
        if not self.chart:
            return np.zeros((0, self.base.dim))
        return np.array(self.chart, dtype=float)

    def embed(self, u):
        """Map chart coordinates u (..., dim) to ambient points (..., n)."""
        x0 = np.array([float(c) for c in self.base_point])
        u = np.asarray(u, dtype=float)
        if self.dim == 0:
            shape = u.shape[:-1] if u.ndim else ()
            return np.broadcast_to(x0, shape + (self.base.dim,)).copy()
        return x0 + u @ self.chart_array

    def chart_halfspaces(self):
        """Facet data of the chart polytope {u : l_j(x0 + B^T u) >= 0}.

        Facets identically zero on the fiber are dropped.  Returns
        (normals, offsets) with integer normals and Fraction offsets.
        """
        normals, offsets = [], []
        for j, (r, _) in enumerate(self.base.facets):
            if j in self.active_facets:
                continue
            nu = tuple(sum(b[i] * r[i] for i in range(self.base.dim))
                       for b in self.chart)
            offsets.append(facet_value(self.base, j + 1, self.base_point))
            normals.append(nu)
        return tuple(normals), tuple(offsets)

    @cached_property
    def chart_vertices(self):
        normals, offsets = self.chart_halfspaces()
        return _hpoly_vertices(normals, offsets, self.dim)


@dataclass(frozen=True)
class DelzantPolytope:
    """Bounded lattice polytope with primitive integer facet normals."""

    dim: int
    facets: tuple  # ((normal, offset), ...)

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise PolytopeError("dimension must be >= 1")
        norm = []
        for entry in self.facets:
            r, lam = entry
            r = tuple(int(v) for v in r)
            if len(r) != n:
                raise PolytopeError(f"normal {r} has wrong length for dim {n}")
            if not is_primitive(r):
                raise PolytopeError(f"facet normal {r} is not primitive")
            norm.append((r, int(lam)))
        if len(norm) < n + 1:
            raise PolytopeError("a bounded polytope needs at least dim+1 facets")
        object.__setattr__(self, "facets", tuple(norm))

    @classmethod
    def from_box(cls, bounds):
        """Axis-aligned box from per-axis (lo, hi) integer bounds."""
        n = len(bounds)
        facets = []
        for i, (lo, hi) in enumerate(bounds):
            if not hi > lo:
                raise PolytopeError("box bounds must satisfy hi > lo")
            e = tuple(1 if t == i else 0 for t in range(n))
            me = tuple(-1 if t == i else 0 for t in range(n))
            facets.append((e, -int(lo)))
            facets.append((me, int(hi)))
        return cls(n, tuple(facets))

    @property
    def num_facets(self) -> int:
        return len(self.facets)

    @cached_property
    def normal_matrix(self):
        return np.array([r for r, _ in self.facets], dtype=float)

    @cached_property
    def offset_vector(self):
        return np.array([lam for _, lam in self.facets], dtype=float)

    def facet_values_array(self, x):
        """All l_j at float points x of shape (..., n); returns (..., d)."""
        x = np.asarray(x, dtype=float)
        return x @ self.normal_matrix.T + self.offset_vector

    @cached_property
    def vertices(self):
        self._check_bounded()
        verts = _hpoly_vertices(tuple(r for r, _ in self.facets),
                                tuple(Fraction(lam) for _, lam in self.facets),
                                self.dim)
        if not verts:
            raise PolytopeError("polytope is empty")
        bary = _mean_point([v.point for v in verts])
        for j in range(self.num_facets):
            if facet_value(self, j + 1, bary) <= 0:
                raise PolytopeError("polytope has empty interior")
        return verts

    @cached_property
    def barycenter(self):
        return _mean_point([v.point for v in self.vertices])

    def barycenter_array(self):
        return np.array([float(c) for c in self.barycenter])

    def contains(self, x, strict=False) -> bool:
        for j in range(self.num_facets):
            v = facet_value(self, j + 1, x)
            if v < 0 or (strict and v == 0):
                return False
        return True

    @cached_property
    def is_box(self) -> bool:
        """True when every facet normal is a signed coordinate vector."""
        seen = set()
        for r, _ in self.facets:
            nz = [(i, v) for i, v in enumerate(r) if v != 0]
            if len(nz) != 1 or abs(nz[0][1]) != 1:
                return False
            seen.add(nz[0])
        return len(seen) == 2 * self.dim == self.num_facets

    def box_bounds(self):
        """Per-axis (lo, hi) for box polytopes (exact rationals)."""
        if not self.is_box:
            raise PolytopeError("polytope is not an axis-aligned box")
        lo = [None] * self.dim
        hi = [None] * self.dim
        for r, lam in self.facets:
            i, s = next((i, v) for i, v in enumerate(r) if v != 0)
            if s > 0:
                lo[i] = Fraction(-lam)
            else:
                hi[i] = Fraction(lam)
        return tuple(zip(lo, hi))

    def _check_bounded(self):
        rows = [r for r, _ in self.facets]
        if rational_rank(rows) < self.dim:
            raise PolytopeError("polytope is unbounded (normals do not span)")
        # A nontrivial recession cone is pointed here, so it has an extreme
        # ray lying on dim-1 independent facet normals; scan those candidates.
        for subset in itertools.combinations(range(self.num_facets), self.dim - 1):
            sub = [rows[j] for j in subset]
            if sub and rational_rank(sub) < self.dim - 1:
                continue
            for v in integer_kernel_basis(sub, ncols=self.dim):
                for cand in (v, tuple(-c for c in v)):
                    if all(sum(c * ri for c, ri in zip(cand, r)) >= 0 for r in rows):
                        raise PolytopeError(
                            f"polytope is unbounded along direction {cand}")


def facet_value(P: DelzantPolytope, j: int, x):
    """Affine facet function l_j(x) = <x, r_j> + lambda_j (j is 1-based).

    Exact when x has integer/rational entries.
    """
    if not 1 <= j <= P.num_facets:
        raise IndexError(f"facet index {j} out of range 1..{P.num_facets}")
    r, lam = P.facets[j - 1]
    return sum(xi * ri for xi, ri in zip(x, r)) + lam


def _mean_point(points):
    n = len(points[0])
    cnt = len(points)
    return tuple(sum(Fraction(p[i]) for p in points) / cnt for i in range(n))


def _hpoly_vertices(normals, offsets, dim):
    """Vertices of {u : <u, normals[j]> + offsets[j] >= 0} (exact, bounded).

    Integer normals, rational offsets.  Handles dim 0 (the polytope is the
    single empty-tuple point when all offsets are nonnegative) and polytopes
    that are not full-dimensional.
    """
    if dim == 0:
        ok = all(off >= 0 for off in offsets)
        return (Vertex(point=(), active_facets=tuple(
            j for j, off in enumerate(offsets) if off == 0)),) if ok else ()
    d = len(normals)
    found = {}
    for subset in itertools.combinations(range(d), dim):
        sub = [normals[j] for j in subset]
        if integer_det(sub) == 0:
            continue
        try:
            pt = rational_solve(sub, [-offsets[j] for j in subset])
        except ValueError:
            continue
        vals = [sum(p * ri for p, ri in zip(pt, normals[j])) + offsets[j]
                for j in range(d)]
        if any(v < 0 for v in vals):
            continue
        active = tuple(j for j, v in enumerate(vals) if v == 0)
        found[pt] = Vertex(point=pt, active_facets=active)
    return tuple(found[p] for p in sorted(found))


def enumerate_vertices(P: DelzantPolytope):
    """All vertices of P, sorted lexicographically, with exact coordinates."""
    return P.vertices


def is_delzant(P: DelzantPolytope) -> DelzantCertificate:
    """Vertex-unimodularity smoothness test.

    Smooth iff every vertex has exactly dim active facets whose normals form
    a Z-basis (|det| = 1).  On failure the certificate carries the offending
    vertex and the determinant of its active normals.
    """
    n = P.dim
    for v in P.vertices:
        if len(v.active_facets) != n:
            return DelzantCertificate(
                False, vertex=v.point, determinant=None,
                reason=f"vertex {v.point} lies on {len(v.active_facets)} facets")
        det = integer_det([P.facets[j][0] for j in v.active_facets])
        if abs(det) != 1:
            return DelzantCertificate(
                False, vertex=v.point, determinant=det,
                reason=f"active normals at {v.point} have determinant {det}")
    return DelzantCertificate(True)


def lattice_points(P: DelzantPolytope):
    """P intersected with Z^n by exact bounding-box scan, sorted."""
    verts = P.vertices
    lo = [min(v.point[i] for v in verts) for i in range(P.dim)]
    hi = [max(v.point[i] for v in verts) for i in range(P.dim)]
    ranges = [range(ceil(a), floor(b) + 1) for a, b in zip(lo, hi)]
    pts = []
    for m in itertools.product(*ranges):
        if all(facet_value(P, j + 1, m) >= 0 for j in range(P.num_facets)):
            pts.append(m)
    return tuple(pts)


def weight_multiplicities(P: DelzantPolytope, proj):
    """Counts of lattice points per image value under the subtorus projection."""
    A = proj.matrix
    if len(A[0]) != P.dim:
        raise PolytopeError("projection width does not match polytope dimension")
    counts = {}
    for m in lattice_points(P):
        key = tuple(sum(a * mi for a, mi in zip(row, m)) for row in A)
        counts[key] = counts.get(key, 0) + 1
    return {k: counts[k] for k in sorted(counts)}


def _particular_solution(A, q):
    """Some rational x with A x = q, for full-row-rank integer A."""
    k = len(A)
    n = len(A[0])
    cols = []
    rows = [list(map(Fraction, r)) for r in A]
    work = [row[:] for row in rows]
    r = 0
    for c in range(n):
        p = next((i for i in range(r, k) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        piv = work[r][c]
        work[r] = [v / piv for v in work[r]]
        for i in range(k):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [vi - f * vc for vi, vc in zip(work[i], work[r])]
        cols.append(c)
        r += 1
        if r == k:
            break
    if r < k:
        raise PolytopeError("projection matrix is rank deficient")
    sq = [[A[i][c] for c in cols] for i in range(k)]
    sol = rational_solve(sq, list(q))
    x = [Fraction(0)] * n
    for c, v in zip(cols, sol):
        x[c] = v
    return tuple(x)


def face_slice(P: DelzantPolytope, proj, q) -> Slice:
    """Chart for the fiber {x in P : proj(x) = q}, valid for any feasible q.

    For q in the relative interior of the image the chart directions form a
    Z-basis of ker(proj); for boundary q the fiber is a face of P and the
    chart is the correspondingly smaller lattice basis along that face.
    """
    A = proj.matrix
    n = P.dim
    if len(A[0]) != n:
        raise PolytopeError("projection width does not match polytope dimension")
    q = tuple(Fraction(v) for v in q)
    if len(q) != len(A):
        raise PolytopeError("level has wrong length for the projection")
    x0 = _particular_solution(A, q)
    B0 = integer_kernel_basis(A, ncols=n)
    normals_u = tuple(tuple(sum(b[i] * r[i] for i in range(n)) for b in B0)
                      for r, _ in P.facets)
    offsets_u = tuple(facet_value(P, j + 1, x0) for j in range(P.num_facets))
    verts = _hpoly_vertices(normals_u, offsets_u, len(B0))
    if not verts:
        raise EmptySliceError(f"level {tuple(map(str, q))} lies outside the image polytope")
    ustar = _mean_point([v.point for v in verts]) if len(B0) else ()
    xstar = tuple(x0[i] + sum(Fraction(u) * b[i] for u, b in zip(ustar, B0))
                  for i in range(n))
    active = []
    for j in range(P.num_facets):
        vals = [offsets_u[j] + sum(u * c for u, c in zip(v.point, normals_u[j]))
                for v in verts]
        if all(val == 0 for val in vals):
            active.append(j)
    if active:
        stacked = [list(row) for row in A] + [list(P.facets[j][0]) for j in active]
        chart = integer_kernel_basis(stacked, ncols=n)
    else:
        chart = B0
    return Slice(base=P, level=q, chart=chart, base_point=xstar,
                 active_facets=tuple(active))


def slice_chart(P: DelzantPolytope, proj, q) -> Slice:
    """Slice for a level in the relative interior of the image polytope.

    Boundary or infeasible levels raise EmptySliceError; boundary fibers are
    handled by face_slice instead.
    """
    sl = face_slice(P, proj, q)
    if sl.active_facets:
        raise EmptySliceError(
            f"level {tuple(map(str, sl.level))} lies on the boundary of the image polytope")
    return sl
