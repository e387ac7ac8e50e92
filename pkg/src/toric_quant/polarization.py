"""Complex-structure matrices, polarization frames, and their degeneration.

Frames are n complex vectors in the 2n real coordinates (dx_1..dx_n,
dtheta_1..dtheta_n) on the open orbit.  The frame of the Kahler polarization
at time t has row j = (row j of G_t^{-1}, -i e_j) with G_t = Hess g_t; as
t grows the first k rows flatten onto pure angle directions, and the
distance to that limit frame is measured by principal angles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import SymplecticPotential
from .subtorus import SubtorusProjection


@dataclass(frozen=True)
class ComplexStructureMatrix:
    """J = [[0, -G^{-1}], [G, 0]] at a basepoint, with G = Hess g."""

    matrix: np.ndarray
    basepoint: np.ndarray
    metric_block: np.ndarray  # G

    def squares_to_minus_identity(self, tol: float = 1e-10) -> bool:
        n2 = self.matrix.shape[0]
        return bool(np.max(np.abs(self.matrix @ self.matrix + np.eye(n2))) < tol)


@dataclass(frozen=True)
class PolarizationFrame:
    rows: np.ndarray  # (n, 2n) complex
    basepoint: np.ndarray
    label: str

    @property
    def n(self) -> int:
        return self.rows.shape[0]


def complex_structure(pot: SymplecticPotential, x) -> ComplexStructureMatrix:
    x = np.asarray(x, dtype=float)
    G = pot.hessian(x)
    Ginv = np.linalg.inv(G)
    n = G.shape[0]
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -Ginv
    J[n:, :n] = G
    return ComplexStructureMatrix(matrix=J, basepoint=x, metric_block=G)


def kahler_metric(pot: SymplecticPotential, x):
    """gamma = omega(., J.) = diag(G, G^{-1}) in (dx, dtheta) coordinates."""
    G = pot.hessian(np.asarray(x, dtype=float))
    n = G.shape[0]
    gamma = np.zeros((2 * n, 2 * n))
    gamma[:n, :n] = G
    gamma[n:, n:] = np.linalg.inv(G)
    return gamma


def _require_standard(proj: SubtorusProjection):
    if not proj.is_standard():
        raise ValueError(
            "frames expect adapted coordinates (projection onto the first k "
            "coordinates); apply subtorus.adapted_basis first")


def polarization_frame(pot: SymplecticPotential, proj: SubtorusProjection,
                       x) -> PolarizationFrame:
    """Frame of the Kahler polarization of g_t at x (adapted coordinates)."""
    _require_standard(proj)
    x = np.asarray(x, dtype=float)
    n = pot.polytope.dim
    Ginv = np.linalg.inv(pot.hessian(x))
    rows = np.zeros((n, 2 * n), dtype=complex)
    rows[:, :n] = Ginv
    rows[:, n:] = -1j * np.eye(n)
    return PolarizationFrame(rows=rows, basepoint=x, label=f"t={pot.time:g}")


def limit_frame(proj: SubtorusProjection, pot0: SymplecticPotential,
                x) -> PolarizationFrame:
    """Frame of the mixed-polarization limit at x.

    Rows 1..k are pure angle directions; rows k+1..n keep the t=0 Kahler
    rows, which are unchanged along the family because the potential only
    moves in the projected variables.
    """
    _require_standard(proj)
    x = np.asarray(x, dtype=float)
    n = pot0.polytope.dim
    k = proj.k
    G0inv = np.linalg.inv(pot0.at_time(0.0).hessian(x))
    rows = np.zeros((n, 2 * n), dtype=complex)
    for j in range(k):
        rows[j, n + j] = 1.0
    rows[k:, :n] = G0inv[k:, :]
    rows[k:, n:] = -1j * np.eye(n)[k:, :]
    return PolarizationFrame(rows=rows, basepoint=x, label="limit")


def symplectic_pairing(v, w):
    """Omega((a,b),(a',b')) = <a,b'> - <b,a'> (complex bilinear)."""
    v = np.asarray(v)
    w = np.asarray(w)
    n = v.shape[-1] // 2
    return v[..., :n] @ w[..., n:] - v[..., n:] @ w[..., :n]


def isotropy_defect(frame: PolarizationFrame) -> float:
    """max |Omega(row_a, row_b)| over all pairs; zero for Lagrangian frames."""
    n = frame.n
    a = frame.rows[:, :n]
    b = frame.rows[:, n:]
    M = a @ b.T - b @ a.T
    return float(np.max(np.abs(M)))


def positivity_matrix(frame: PolarizationFrame):
    """Hermitian matrix i*Omega(conj(row_a), row_b) on the frame span.

    Positive definite for Kahler frames (it equals 2 G^{-1} there); positive
    semidefinite with k-dimensional kernel for the mixed-polarization limit.
    """
    n = frame.n
    a = np.conj(frame.rows[:, :n])
    b = np.conj(frame.rows[:, n:])
    c = frame.rows[:, :n]
    d = frame.rows[:, n:]
    return 1j * (a @ d.T - b @ c.T)


def degenerate_directions(frame: PolarizationFrame, tol: float = 1e-10) -> int:
    """Complex dimension of the kernel of the positivity form."""
    eigs = np.linalg.eigvalsh(positivity_matrix(frame))
    return int(np.sum(np.abs(eigs) < tol))


def grassmann_distance(A: PolarizationFrame, B: PolarizationFrame) -> float:
    """Largest principal angle between the two frame spans in C^{2n}."""
    if A.rows.shape != B.rows.shape:
        raise ValueError("frames have different dimensions")
    if not np.allclose(A.basepoint, B.basepoint):
        raise ValueError("frames sit at different basepoints")
    return subspace_angle(A.rows, B.rows)


def subspace_angle(rows_a, rows_b) -> float:
    """Largest principal angle between row spans (complex subspaces).

    Cosine SVD is accurate near pi/2 but floors out at sqrt(eps) for nearly
    equal spans, so small angles are recomputed from the sine (the residual
    of one orthonormal basis against the other's projector).
    """
    Qa, _ = np.linalg.qr(np.asarray(rows_a, dtype=complex).T)
    Qb, _ = np.linalg.qr(np.asarray(rows_b, dtype=complex).T)
    C = Qa.conj().T @ Qb
    cosines = np.clip(np.linalg.svd(C, compute_uv=False), 0.0, 1.0)
    theta = float(np.arccos(cosines.min()))
    if theta < np.pi / 4:
        sines = np.linalg.svd(Qb - Qa @ C, compute_uv=False)
        theta = float(np.arcsin(np.clip(sines.max(), 0.0, 1.0)))
    return theta


@dataclass(frozen=True)
class DecayReport:
    """Degeneration of the time-t frames toward the limit frame at one point."""

    basepoint: np.ndarray
    t_values: tuple
    top_block_norms: tuple  # max |entry| of rows 1..k of G_t^{-1}
    distances: tuple  # Grassmann distance to the limit frame
    fitted_slope: float  # least-squares slope of log distance vs log t
    subframe_invariance: float  # max over t of d(span rows k+1..n at t, at 0)

    def rows(self):
        return list(zip(self.t_values, self.top_block_norms, self.distances))


def decay_report(pot_family: SymplecticPotential, proj: SubtorusProjection,
                 x, t_list) -> DecayReport:
    """Track frame degeneration along increasing t at a fixed interior point."""
    _require_standard(proj)
    t_list = [float(t) for t in t_list]
    if any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise ValueError("t_list must be strictly increasing")
    x = np.asarray(x, dtype=float)
    k = proj.k
    lim = limit_frame(proj, pot_family, x)
    frame0 = polarization_frame(pot_family.at_time(0.0), proj, x)
    norms, dists, subinv = [], [], 0.0
    for t in t_list:
        pot = pot_family.at_time(t)
        fr = polarization_frame(pot, proj, x)
        Ginv = np.real(fr.rows[:, :pot.polytope.dim])
        norms.append(float(np.max(np.abs(Ginv[:k, :]))))
        dists.append(grassmann_distance(fr, lim))
        if k < pot.polytope.dim:
            subinv = max(subinv, subspace_angle(fr.rows[k:], frame0.rows[k:]))
    slope = float(np.polyfit(np.log(t_list), np.log(dists), 1)[0])
    return DecayReport(basepoint=x, t_values=tuple(t_list),
                       top_block_norms=tuple(norms), distances=tuple(dists),
                       fitted_slope=slope, subframe_invariance=float(subinv))
