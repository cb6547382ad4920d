from fractions import Fraction

import pytest

from aflcalc.battery import germ_battery, zero_orbit_battery
from aflcalc.field import MINUS, PLUS, FieldSetup
from aflcalc.germs import (GermExpansion, GermGradingError, GermPiece,
                           GermPreconditionError, constant_germ, extract_germ,
                           function_from_germ, solve_transfer_germ,
                           zero_orbit_zero_germ)
from aflcalc.orbital import (Box, Interval, InvariantFunction, OrbitData,
                             clear_diagonal, d_orb, diagonal_killer,
                             integral_indicator, orb, orb_s, unit_diag_indicator,
                             unramified_orbit)
from aflcalc.symbolic import LaurentPoly, LogValue

UNRAM = FieldSetup(3, ramified=False)
RAM = FieldSetup(3, ramified=True)
RAM_NEG = FieldSetup(3, ramified=True, eta_pi_f=MINUS)
SETUPS = (UNRAM, RAM, RAM_NEG)


def near_diagonal_orbits(setup, threshold, t_span=6, vb2_range=range(-6, 7),
                         lvl_a=None, lvl_d=None):
    out = []
    for t in range(threshold, threshold + t_span):
        for vb2 in vb2_range:
            if setup.ramified:
                for bs in (PLUS, MINUS):
                    for ds in (PLUS, MINUS):
                        out.append(OrbitData(setup=setup, t=t, v_b2=vb2, b_sign=bs,
                                             defect_sign=ds, lvl_a=lvl_a, lvl_d=lvl_d))
            elif vb2 % 2 == 0:
                out.append(unramified_orbit(setup, t, vb2 // 2, lvl_a=lvl_a, lvl_d=lvl_d))
    return out


class TestExtraction:
    def test_single_shell_gives_unit_germ(self):
        box = Box(i_a=Interval(0, 0), i_b=Interval(0, 0), i_c=Interval(0, None),
                  i_d=Interval(0, 0))
        germ = extract_germ(UNRAM, InvariantFunction.from_box(box))
        assert germ.eval_a0(None, None, 0) == LaurentPoly.one()
        assert germ.eval_a1(None, None, 0).is_zero

    def test_zero_function(self):
        germ = extract_germ(UNRAM, InvariantFunction.zero())
        assert germ.value_at_s0_is_zero()
        assert not germ.a0 and not germ.a1

    def test_precondition_enforced(self):
        with pytest.raises(GermPreconditionError):
            extract_germ(UNRAM, integral_indicator())
        with pytest.raises(GermPreconditionError):
            extract_germ(UNRAM, diagonal_killer(None, None))

    def test_killer_has_doubly_vanishing_germ(self):
        # the diagonal killer has zero integral and zero derivative integral;
        # after regularization its germ vanishes at s = 0 together with the
        # derivative-form coefficients
        for setup in SETUPS:
            alpha = diagonal_killer(Interval(0, 1), None)
            germ = extract_germ(setup, clear_diagonal(alpha))
            assert germ.value_at_s0_is_zero()
            assert germ.derivative_parts().is_zero()


class TestRoundTrip:
    @pytest.mark.parametrize("setup", SETUPS, ids=["unram", "ram", "ram-neg"])
    def test_battery_round_trip(self, setup):
        for name, f in germ_battery(setup):
            germ = extract_germ(setup, f)
            rebuilt = function_from_germ(germ)
            again = extract_germ(setup, rebuilt)
            assert germ.equivalent(again), name

    def test_constant_germ_battery(self):
        cells = [
            (None, None),
            (Interval(0, 0), None),
            (Interval(1, None), Interval(0, 2)),
        ]
        values = [(1, 0), (0, 1), (Fraction(1, 2), Fraction(-3, 2)), (2, 2)]
        count = 0
        for setup in (UNRAM, RAM):
            for cell in cells:
                for a0, a1 in values:
                    germ = constant_germ(setup, [(cell[0], cell[1], a0, a1)])
                    again = extract_germ(setup, function_from_germ(germ))
                    assert germ.equivalent(again)
                    count += 1
        assert count >= 20

    def test_monomial_germ_round_trip(self):
        for setup in (UNRAM, RAM):
            for e2 in (-4, -2, 0, 2):
                piece = GermPiece(None, None, 0, LaurentPoly.monomial(e2, Fraction(5, 3)))
                germ = GermExpansion(setup, (piece,), (), threshold=1)
                again = extract_germ(setup, function_from_germ(germ))
                assert germ.equivalent(again)
        for e2 in (-3, -1, 1, 3):
            piece = GermPiece(None, None, 1, LaurentPoly.monomial(e2, 2))
            germ = GermExpansion(RAM, (), (piece,), threshold=1)
            again = extract_germ(RAM, function_from_germ(germ))
            assert germ.equivalent(again)

    def test_grading_mismatch_rejected(self):
        bad = GermExpansion(RAM, (GermPiece(None, None, 1, LaurentPoly.one()),), (), 1)
        with pytest.raises(GermGradingError):
            function_from_germ(bad)
        bad_unram = GermExpansion(UNRAM, (GermPiece(None, None, 0, LaurentPoly.monomial(1)),), (), 1)
        with pytest.raises(GermGradingError):
            function_from_germ(bad_unram)


class TestExpansionValidity:
    @pytest.mark.parametrize("setup", SETUPS, ids=["unram", "ram", "ram-neg"])
    def test_battery_expansion_exact(self, setup):
        for name, f in germ_battery(setup):
            germ = extract_germ(setup, f)
            for lvl_a, lvl_d in ((None, None), (1, 0), (0, 2)):
                for gamma in near_diagonal_orbits(setup, germ.threshold,
                                                  lvl_a=lvl_a, lvl_d=lvl_d):
                    want = germ.predicted_orb_s(gamma)
                    assert orb_s(gamma, f) == want, name

    def test_reconstruction_realizes_prescription(self):
        germ = constant_germ(UNRAM, [(None, None, 1, 0)])
        f = function_from_germ(germ)
        for gamma in near_diagonal_orbits(UNRAM, 2):
            # orbital series equals eta_s(b) exactly
            assert orb_s(gamma, f) == LaurentPoly.monomial(gamma.v_b2, gamma.b_sign)

    def test_reconstruction_c_side(self):
        germ = constant_germ(UNRAM, [(None, None, 0, Fraction(7, 2))])
        f = function_from_germ(germ)
        for gamma in near_diagonal_orbits(UNRAM, 2):
            want = LaurentPoly.monomial(-gamma.v_c2, gamma.c_sign).scale(Fraction(7, 2))
            assert orb_s(gamma, f) == want

    def test_zero_germ_gives_zero_function(self):
        f = function_from_germ(GermExpansion(UNRAM, (), (), 1))
        assert not f.terms


class TestDerivativeForm:
    def test_constant_b_side(self):
        germ = GermExpansion(UNRAM, (GermPiece(None, None, 0, LaurentPoly.one()),), (), 1)
        parts = germ.derivative_parts()
        slope, const = parts.eval_a0(None, None, 0)
        assert slope == -1 and const == 0

    def test_constant_c_side(self):
        germ = GermExpansion(UNRAM, (), (GermPiece(None, None, 0, LaurentPoly.one()),), 1)
        parts = germ.derivative_parts()
        slope, const = parts.eval_a1(None, None, 0)
        assert slope == 1 and const == 0

    def test_zero_germ(self):
        assert GermExpansion(UNRAM, (), (), 1).derivative_parts().is_zero()

    @pytest.mark.parametrize("setup", SETUPS, ids=["unram", "ram", "ram-neg"])
    def test_derivative_form_matches_engine(self, setup):
        for name, f in germ_battery(setup):
            parts = extract_germ(setup, f).derivative_parts()
            for gamma in near_diagonal_orbits(setup, parts.threshold, t_span=4,
                                              vb2_range=range(-4, 5)):
                assert d_orb(gamma, f) == parts.predicted_d_orb(gamma), name


class TestTransferSolve:
    def test_symmetric_case(self):
        assert solve_transfer_germ(5, 5) == (Fraction(0), Fraction(5))

    def test_half_split(self):
        assert solve_transfer_germ(1, 0, side_sign_b0=PLUS) == (Fraction(1, 2), Fraction(1, 2))

    @pytest.mark.parametrize("e", [1, 2, 3, 6])
    def test_scaled_one_sided(self, e):
        a0, a1 = solve_transfer_germ(e, 0, side_sign_b0=MINUS)
        assert a0 == -Fraction(e, 2) and a1 == Fraction(e, 2)

    @pytest.mark.parametrize("c0", [-2, 0, 1, Fraction(3, 2)])
    @pytest.mark.parametrize("c1", [-1, 0, Fraction(5, 2)])
    @pytest.mark.parametrize("side", [PLUS, MINUS])
    def test_matching_system(self, c0, c1, side):
        a0, a1 = solve_transfer_germ(c0, c1, side)
        # defect sign +1 equation and defect sign -1 equation
        assert PLUS * side * a0 + a1 == c0
        assert MINUS * side * a0 + a1 == c1


class TestZeroOrbitGermCheck:
    @pytest.mark.parametrize("setup", SETUPS, ids=["unram", "ram", "ram-neg"])
    def test_zero_orbit_battery(self, setup):
        for name, f in zero_orbit_battery(setup):
            # precondition: the plain integrals really vanish on a grid
            for gamma in near_diagonal_orbits(setup, 0, t_span=6, vb2_range=range(-4, 5)):
                assert orb(gamma, f) == 0, name
            assert zero_orbit_zero_germ(setup, f), name

    def test_nonzero_orbit_function_fails_guard(self):
        # the unit-shell function has nonvanishing integrals, and indeed a
        # nonvanishing value germ: the check is not applicable and reports it
        box = Box(i_a=Interval(0, 0), i_b=Interval(0, 0), i_c=Interval(0, None),
                  i_d=Interval(0, 0))
        f = InvariantFunction.from_box(box)
        assert orb(unramified_orbit(UNRAM, 2, 0), f) != 0
        assert not zero_orbit_zero_germ(UNRAM, f)


class TestThreshold:
    def test_threshold_from_window_sums(self):
        # a box bounded in b and open in c behaves like its germ only once
        # t clears the sum of the c-floor and the b-ceiling
        box = Box(i_a=Interval(0, 0), i_b=Interval(4, 10), i_c=Interval(2, None),
                  i_d=Interval(0, 0))
        f = InvariantFunction.from_box(box)
        germ = extract_germ(UNRAM, f)
        assert germ.threshold == 6
        below = unramified_orbit(UNRAM, t=5, v_b=3)
        assert orb_s(below, f) != germ.predicted_orb_s(below)
        for gamma in near_diagonal_orbits(UNRAM, germ.threshold, t_span=4):
            assert orb_s(gamma, f) == germ.predicted_orb_s(gamma)


class TestExtractionLinearity:
    @pytest.mark.parametrize("setup", SETUPS, ids=["unram", "ram", "ram-neg"])
    def test_germ_of_sum_is_sum_of_germs(self, setup):
        battery = germ_battery(setup)
        pairs = [(battery[0][1], battery[3][1]), (battery[1][1], battery[8][1]),
                 (battery[2][1], battery[5][1])]
        for f, g in pairs:
            combined = extract_germ(setup, f + g.scale(Fraction(-2, 3)))
            gf = extract_germ(setup, f)
            gg = extract_germ(setup, g)
            for la in (None, 0, 1, 2, 3):
                for ld in (None, 0, 1, 2, 3):
                    for cls in combined.classes():
                        want_a0 = gf.eval_a0(la, ld, cls) + gg.eval_a0(la, ld, cls).scale(Fraction(-2, 3))
                        want_a1 = gf.eval_a1(la, ld, cls) + gg.eval_a1(la, ld, cls).scale(Fraction(-2, 3))
                        assert combined.eval_a0(la, ld, cls) == want_a0
                        assert combined.eval_a1(la, ld, cls) == want_a1
