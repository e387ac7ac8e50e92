"""Legendre bridge between moment coordinates x and complex coordinates y.

Forward map y = grad g(x), Newton inversion with facet-aware damping, the
dual potential h(y) = -g(x(y)) + <x(y), y>, and the residual of the
imaginary-time-flow identity h_t(grad g_t(x)) = h_0(grad g_0(x))
- t psi(x) + t <x, grad psi(x)>.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import SymplecticPotential


class NewtonConvergenceError(RuntimeError):
    def __init__(self, iterate, residual, iterations):
        self.iterate = iterate
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"Newton did not reach tolerance in {iterations} iterations "
            f"(last residual {residual:.3e})")


@dataclass(frozen=True)
class LegendrePair:
    potential: SymplecticPotential
    tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


def forward(pair: LegendrePair, x):
    """y = grad g(x); batched over leading axes."""
    return pair.potential.gradient(x)


def inverse(pair: LegendrePair, y, x0=None):
    """Solve grad g(x) = y by damped Newton from the vertex barycenter.

    A step is shortened (halved) until no facet value drops below 0.4 of its
    current value, which keeps iterates strictly interior; the log-barrier
    shape of g0 then makes the iteration globally convergent in practice.
    """
    pot = pair.potential
    P = pot.polytope
    y = np.asarray(y, dtype=float)
    if y.shape != (P.dim,):
        raise ValueError(f"y must have shape ({P.dim},)")
    x = P.barycenter_array() if x0 is None else np.array(x0, dtype=float)
    for _ in range(pair.max_iterations):
        grad = pot.gradient(x)
        res = grad - y
        resnorm = float(np.linalg.norm(res))
        if resnorm <= pair.tolerance:
            return x
        step = -np.linalg.solve(pot.hessian(x), res)
        lcur = P.facet_values_array(x)
        s = 1.0
        for _ in range(60):
            trial = x + s * step
            if np.all(P.facet_values_array(trial) > 0.4 * lcur):
                break
            s *= 0.5
        else:
            raise NewtonConvergenceError(x, resnorm, pair.max_iterations)
        x = x + s * step
    resnorm = float(np.linalg.norm(pot.gradient(x) - y))
    if resnorm <= pair.tolerance:
        return x
    raise NewtonConvergenceError(x, resnorm, pair.max_iterations)


def kahler_potential(pair: LegendrePair, y):
    """h(y) = -g(x(y)) + <x(y), y>, the convex conjugate of g."""
    x = inverse(pair, y)
    return float(-pair.potential.value(x) + x @ np.asarray(y, dtype=float))


def flow_identity_residual(pair0: LegendrePair, pair_t: LegendrePair, x):
    """|h_t(grad g_t(x)) - [h_0(grad g_0(x)) - t psi(x) + t <x, grad psi(x)>]|.

    Zero (to solver tolerance) exactly when the convex-perturbation family of
    potentials agrees with the family generated by the imaginary-time flow of
    the same convex Hamiltonian.
    """
    pot0, pott = pair0.potential, pair_t.potential
    if pot0.polytope is not pott.polytope and pot0.polytope != pott.polytope:
        raise ValueError("pairs must share the polytope")
    if pot0.time != 0.0:
        raise ValueError("pair0 must sit at t = 0")
    x = np.asarray(x, dtype=float)
    h_t = kahler_potential(pair_t, forward(pair_t, x))
    h_0 = kahler_potential(pair0, forward(pair0, x))
    t = pott.time
    psi = pott.perturbation
    if psi is None or t == 0.0:
        shift = 0.0
    else:
        shift = -t * float(psi.value(x)) + t * float(x @ psi.gradient(x))
    return abs(h_t - (h_0 + shift))
