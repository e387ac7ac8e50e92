"""Monomial sections through their pointwise norms in the action-angle chart.

Every normed quantity reduces to exponent algebra: the section indexed by a
lattice point m has |sigma^m|(x) = exp(g(x) - <x - m, grad g(x)>), with the
closed product form below for the canonical potential, and the convex weight
f_m(x) = <x - m, grad psi(x)> - psi(x) controlling how the time-t norm
factors through the t = 0 norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polytope import DelzantPolytope, facet_value, lattice_points
from .potential import SymplecticPotential
from .subtorus import ConvexFunction, SubtorusProjection, pullback


@dataclass(frozen=True)
class MonomialSection:
    m: tuple  # lattice point in P
    potential: SymplecticPotential

    def __post_init__(self):
        P = self.potential.polytope
        m = tuple(int(v) for v in self.m)
        if len(m) != P.dim:
            raise ValueError(f"lattice point {m} has wrong dimension")
        for j in range(P.num_facets):
            if facet_value(P, j + 1, m) < 0:
                raise ValueError(f"{m} is not a lattice point of the polytope")
        object.__setattr__(self, "m", m)

    @property
    def exponents(self):
        """Nonnegative integers l_j(m), the monomial degrees along the facets."""
        P = self.potential.polytope
        return tuple(int(facet_value(P, j + 1, self.m))
                     for j in range(P.num_facets))


def monomial_basis(pot: SymplecticPotential):
    """One section per lattice point; the size equals dim H^0."""
    return tuple(MonomialSection(m, pot) for m in lattice_points(pot.polytope))


def pointwise_norm(section: MonomialSection, x):
    """|sigma^m|(x) = exp(g(x) - <x - m, grad g(x)>) at interior x, batched."""
    pot = section.potential
    x = np.asarray(x, dtype=float)
    m = np.array(section.m, dtype=float)
    g = pot.value(x)
    grad = pot.gradient(x)
    return np.exp(g - np.einsum("...i,...i->...", x - m, grad))


def closed_form_norm_g0(P: DelzantPolytope, m, x):
    """Canonical-potential norm prod_j l_j(x)^{l_j(m)/2} e^{(l_j(m)-l_j(x))/2}.

    Defined on all of P including the boundary; vanishes exactly on facets
    with l_j(m) > 0 and agrees with pointwise_norm on the interior.
    """
    x = np.asarray(x, dtype=float)
    L = P.facet_values_array(x)
    if np.any(L < -1e-12):
        raise ValueError("point outside the polytope")
    L = np.clip(L, 0.0, None)
    lm = np.array([float(facet_value(P, j + 1, m)) for j in range(P.num_facets)])
    powers = np.power(L, lm / 2.0)
    return np.prod(powers, axis=-1) * np.exp(0.5 * np.sum(lm - L, axis=-1))


@dataclass(frozen=True)
class ConcentrationWeight:
    """f_m(x) = <x - m, grad psi(x)> - psi(x) for a convex pullback psi.

    Along the fiber directions of the projection f_m is constant, and over
    the projected variable it has a unique minimum at the image of m, so
    e^{-t f_m} localizes onto the slice through m as t grows.
    """

    m: tuple
    psi: ConvexFunction

    @classmethod
    def from_projection(cls, proj: SubtorusProjection, phi: ConvexFunction,
                        m) -> "ConcentrationWeight":
        return cls(tuple(int(v) for v in m), pullback(phi, proj))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        m = np.array(self.m, dtype=float)
        grad = self.psi.gradient(x)
        return np.einsum("...i,...i->...", x - m, grad) - self.psi.value(x)


def concentration_weight(weight: ConcentrationWeight, x):
    return weight(x)


def norm_factorization_check(P: DelzantPolytope, proj: SubtorusProjection,
                             phi: ConvexFunction, m, t: float, x) -> float:
    """Max residual of |sigma^m_t| = e^{-t f_m} |sigma^m_0| at the given points."""
    pot0 = SymplecticPotential.perturbed(P, proj, phi, 0.0)
    pott = pot0.at_time(t)
    sec0 = MonomialSection(m, pot0)
    sect = MonomialSection(m, pott)
    fm = ConcentrationWeight.from_projection(proj, phi, m)
    lhs = pointwise_norm(sect, x)
    rhs = np.exp(-t * fm(x)) * pointwise_norm(sec0, x)
    return float(np.max(np.abs(lhs - rhs)))


def l1_norm(section: MonomialSection, rule) -> float:
    """Integral of the pointwise norm over the polytope with the given rule."""
    from .quadrature import integrate  # local import to avoid a cycle

    return integrate(lambda x: pointwise_norm(section, x), rule)


def pairwise_orthogonality(section_a: MonomialSection,
                           section_b: MonomialSection,
                           theta_resolution: int,
                           radial_rule=None) -> complex:
    """Discrete torus average of the weight difference times a radial factor.

    The average of e^{i <m - m', theta>} over a uniform grid of
    theta_resolution points per axis cancels exactly (roots of unity) when
    m != m' and the grid outresolves every coordinate difference; for
    m = m' the result is the positive radial integral.
    """
    if section_a.potential != section_b.potential:
        raise ValueError("sections must share a potential")
    P = section_a.potential.polytope
    dm = np.array(section_a.m) - np.array(section_b.m)
    if theta_resolution <= int(np.max(np.abs(dm), initial=0)):
        raise ValueError(
            f"theta resolution {theta_resolution} aliases weight difference {tuple(dm)}")
    angles = 2.0 * np.pi * np.arange(theta_resolution) / theta_resolution
    torus_avg = complex(1.0)
    for di in dm:
        torus_avg *= np.mean(np.exp(1j * di * angles))
    if radial_rule is None:
        from .quadrature import make_rule

        radial_rule = make_rule(P, resolution=32)
    from .quadrature import integrate

    radial = integrate(
        lambda x: pointwise_norm(section_a, x) * pointwise_norm(section_b, x),
        radial_rule)
    return torus_avg * radial
