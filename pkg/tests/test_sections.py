import numpy as np
import pytest

from toric_quant import (
    ConcentrationWeight,
    MonomialSection,
    SymplecticPotential,
    closed_form_norm_g0,
    l1_norm,
    lattice_points,
    make_rule,
    monomial_basis,
    norm_factorization_check,
    pairwise_orthogonality,
    pointwise_norm,
)

from conftest import sample_interior


def _canonical(P):
    return SymplecticPotential.canonical(P)


class TestPointwiseNorm:
    def test_interval_m0_is_sqrt_one_minus_x(self, interval):
        # expanding g0 - x g0' gives log sqrt(1-x)
        sec = MonomialSection((0,), _canonical(interval))
        xs = np.linspace(0.02, 0.98, 25)[:, None]
        assert np.max(np.abs(pointwise_norm(sec, xs) - np.sqrt(1 - xs[:, 0]))) < 1e-12

    def test_interval_m1_mirror(self, interval):
        sec = MonomialSection((1,), _canonical(interval))
        xs = np.linspace(0.02, 0.98, 25)[:, None]
        assert np.max(np.abs(pointwise_norm(sec, xs) - np.sqrt(xs[:, 0]))) < 1e-12

    def test_norm_at_own_lattice_point(self, square2):
        pot = _canonical(square2)
        sec = MonomialSection((1, 1), pot)
        x = np.array([1.0, 1.0])
        assert pointwise_norm(sec, x) == pytest.approx(np.exp(pot.value(x)))

    def test_invalid_lattice_point_rejected(self, interval):
        with pytest.raises(ValueError):
            MonomialSection((2,), _canonical(interval))


class TestClosedForm:
    def test_interval_value_by_hand(self, interval):
        assert closed_form_norm_g0(interval, (0,), np.array([0.75])) == pytest.approx(0.5)

    def test_vanishes_on_active_facets(self, square2):
        # at the vertex (0,0) every facet with positive exponent kills the norm
        assert closed_form_norm_g0(square2, (1, 1), np.array([0.0, 0.0])) == 0.0

    def test_simplex_origin_value_one(self, simplex):
        assert closed_form_norm_g0(simplex, (0, 0), np.array([0.0, 0.0])) == pytest.approx(1.0)

    @pytest.mark.parametrize("fixture", ["interval", "square2", "simplex"])
    def test_matches_exponent_formula_for_all_m(self, fixture, request):
        P = request.getfixturevalue(fixture)
        pot = _canonical(P)
        pts = sample_interior(P, 40, seed=9)
        for m in lattice_points(P):
            sec = MonomialSection(m, pot)
            a = pointwise_norm(sec, pts)
            b = closed_form_norm_g0(P, m, pts)
            assert np.max(np.abs(a - b)) < 1e-10

    def test_boundary_continuity(self, interval):
        # closed form extends the interior norm continuously to the faces
        eps = np.array([[1e-9], [1e-12]])
        near = closed_form_norm_g0(interval, (0,), eps)
        assert near == pytest.approx([1.0, 1.0], abs=1e-6)


class TestConcentrationWeight:
    def test_full_torus_quadratic(self, interval, proj_id1, phi_half_square):
        w = ConcentrationWeight.from_projection(proj_id1, phi_half_square, (0,))
        xs = np.linspace(0.1, 0.9, 9)[:, None]
        assert np.allclose(w(xs), 0.5 * xs[:, 0] ** 2)

    def test_square_slice_profile(self, square2, proj_first_of_two, phi_half_square):
        # f(x) = x1^2/2 - x1: constant in x2, minimum -1/2 on the slice x1 = 1
        w = ConcentrationWeight.from_projection(proj_first_of_two, phi_half_square, (1, 1))
        pts = np.array([[1.0, 0.3], [1.0, 1.9], [0.5, 1.0], [1.5, 0.2]])
        vals = w(pts)
        assert vals[0] == pytest.approx(-0.5)
        assert vals[1] == pytest.approx(-0.5)
        assert vals[2] == pytest.approx(0.125 - 0.5)
        assert vals[3] == pytest.approx(vals[2])

    def test_value_at_own_point(self, square2, proj_first_of_two, phi_half_square):
        w = ConcentrationWeight.from_projection(proj_first_of_two, phi_half_square, (1, 1))
        psi_at_m = 0.5  # phi(x1=1)
        assert w(np.array([1.0, 1.0])) == pytest.approx(-psi_at_m)

    def test_projected_minimum_unique(self, square2, proj_first_of_two, phi_half_square):
        # grid search over the image coordinate finds a single minimizing level
        w = ConcentrationWeight.from_projection(proj_first_of_two, phi_half_square, (1, 1))
        levels = np.linspace(0.05, 1.95, 191)
        vals = w(np.stack([levels, np.full_like(levels, 1.0)], axis=-1))
        mins = np.flatnonzero(vals == vals.min())
        assert len(mins) == 1
        assert levels[mins[0]] == pytest.approx(1.0, abs=0.02)


class TestFactorization:
    def test_zero_at_t_zero(self, interval, proj_id1, phi_half_square):
        pts = sample_interior(interval, 10, seed=3)
        assert norm_factorization_check(interval, proj_id1, phi_half_square,
                                        (0,), 0.0, pts) == 0.0

    def test_interval_t3(self, interval, proj_id1, phi_half_square):
        assert norm_factorization_check(interval, proj_id1, phi_half_square,
                                        (0,), 3.0, np.array([[0.5]])) < 1e-12

    @pytest.mark.parametrize("fixture,rows,m", [
        ("interval", ((1,),), (0,)),
        ("square2", ((1, 0),), (1, 1)),
        ("simplex", ((1, 0),), (0, 1)),
    ])
    def test_random_points_and_times(self, fixture, rows, m, request, phi_half_square):
        from toric_quant import SubtorusProjection

        P = request.getfixturevalue(fixture)
        proj = SubtorusProjection(rows)
        rng = np.random.default_rng(14)
        pts = sample_interior(P, 100, seed=15)
        worst = max(
            norm_factorization_check(P, proj, phi_half_square, m, t, pts)
            for t in rng.uniform(0.0, 10.0, size=8))
        assert worst < 1e-10


class TestL1AndBasis:
    def test_interval_m0_integral(self, interval):
        sec = MonomialSection((0,), _canonical(interval))
        rule = make_rule(interval, 256)
        assert l1_norm(sec, rule) == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_interval_m1_by_symmetry(self, interval):
        sec = MonomialSection((1,), _canonical(interval))
        rule = make_rule(interval, 256)
        assert l1_norm(sec, rule) == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_basis_size_is_lattice_count(self, square2, simplex):
        for P in (square2, simplex):
            assert len(monomial_basis(_canonical(P))) == len(lattice_points(P))

    def test_mass_ratio_stabilizes(self, square2, proj_first_of_two, phi_half_square):
        # ||sigma_t||_1 / ||e^{-t f_m}||_1 approaches a finite constant
        from toric_quant.quadrature import make_rule as mk
        from toric_quant.sections import closed_form_norm_g0 as cf

        w = ConcentrationWeight.from_projection(proj_first_of_two, phi_half_square, (1, 1))
        rule = mk(square2, 256)
        f = w(rule.points)
        base = cf(square2, (1, 1), rule.points)
        fmin = f.min()

        def ratio(t):
            e = np.exp(-t * (f - fmin))
            return float((e * base) @ rule.weights) / float(e @ rule.weights)

        r = [ratio(t) for t in (64, 128, 256, 512)]
        assert abs(r[-1] - r[-2]) < abs(r[1] - r[0])
        assert abs(r[-1] - r[-2]) < 5e-3 * abs(r[-1])


class TestOrthogonality:
    def test_interval_four_point_grid(self, interval):
        pot = _canonical(interval)
        res = pairwise_orthogonality(MonomialSection((0,), pot),
                                     MonomialSection((1,), pot), 4)
        assert abs(res) < 1e-12

    def test_square_mixed_difference(self, square2):
        pot = _canonical(square2)
        res = pairwise_orthogonality(MonomialSection((0, 0), pot),
                                     MonomialSection((1, 2), pot), 8)
        assert abs(res) < 1e-12

    def test_equal_points_positive(self, square2):
        pot = _canonical(square2)
        sec = MonomialSection((1, 1), pot)
        res = pairwise_orthogonality(sec, sec, 8)
        assert res.imag == 0
        assert res.real > 0

    def test_aliasing_guard(self, square2):
        pot = _canonical(square2)
        with pytest.raises(ValueError, match="alias"):
            pairwise_orthogonality(MonomialSection((0, 0), pot),
                                   MonomialSection((0, 2), pot), 2)

    def test_all_pairs_square2(self, square2):
        pot = _canonical(square2)
        secs = monomial_basis(pot)
        rule = make_rule(square2, 16)
        for i, a in enumerate(secs):
            for b in secs[i + 1:]:
                assert abs(pairwise_orthogonality(a, b, 8, radial_rule=rule)) < 1e-12
