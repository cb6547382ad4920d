"""Germ expansions of orbital integrals near the degenerate diagonal.

For a test function vanishing on the degenerate diagonal, the orbital integral
of any orbit close enough to it (defect valuation t at least a computable
threshold) splits as

    orb_s(gamma, f) = eta_s(b) * A0 + eta_s(c)^(-1) * A1,

where A0 and A1 are locally constant in the diagonal-entry levels and in the
class of b (resp. c) modulo the base field, with values in exact Laurent
polynomials.  This module extracts (A0, A1) from a box function, rebuilds a
box function from prescribed germ data using valuation-homogeneous shells,
solves the two-sided transfer system for germ values, and exposes the
derivative-form coefficients used by the identity checks.

Invariant classes modulo the base field: in the unramified case the class of
b carries no extra data (class 0); in the ramified case it is the parity of
the doubled valuation (0 integral, 1 half-integral).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .field import MINUS, PLUS, FieldSetup
from .orbital import (Box, DivergenceError, Interval, InvariantFunction, OrbitData,
                      clear_diagonal, level_cells)
from .symbolic import LaurentPoly, LogValue, Rational, as_fraction


class GermPreconditionError(ValueError):
    """The function does not vanish on the degenerate diagonal, so its
    orbital integrals have unboundedly many monomials near it and no germ."""


class GermGradingError(ValueError):
    """A germ monomial grading incompatible with its valuation class."""


@dataclass(frozen=True)
class GermPiece:
    """One additive piece: constant on a level cell and one valuation class."""

    lvl_a: Optional[Interval]
    lvl_d: Optional[Interval]
    vclass: int  # 0 = integral b/c valuation, 1 = half-integral (ramified)
    poly: LaurentPoly

    def matches(self, lvl_a: Optional[int], lvl_d: Optional[int], vclass: int) -> bool:
        if self.vclass != vclass:
            return False
        if self.lvl_a is not None and not self.lvl_a.contains(lvl_a):
            return False
        if self.lvl_d is not None and not self.lvl_d.contains(lvl_d):
            return False
        return True

    def to_json(self) -> dict:
        return {
            "lvl_a": None if self.lvl_a is None else self.lvl_a.to_json(),
            "lvl_d": None if self.lvl_d is None else self.lvl_d.to_json(),
            "vclass": self.vclass,
            "poly": self.poly.text(),
        }


@dataclass(frozen=True)
class GermExpansion:
    setup: FieldSetup
    a0: tuple[GermPiece, ...]
    a1: tuple[GermPiece, ...]
    threshold: int

    def classes(self) -> tuple[int, ...]:
        return (0, 1) if self.setup.ramified else (0,)

    def eval_a0(self, lvl_a: Optional[int], lvl_d: Optional[int], vclass: int) -> LaurentPoly:
        out = LaurentPoly.zero()
        for piece in self.a0:
            if piece.matches(lvl_a, lvl_d, vclass):
                out += piece.poly
        return out

    def eval_a1(self, lvl_a: Optional[int], lvl_d: Optional[int], vclass: int) -> LaurentPoly:
        out = LaurentPoly.zero()
        for piece in self.a1:
            if piece.matches(lvl_a, lvl_d, vclass):
                out += piece.poly
        return out

    def _probe_levels(self, other: Optional["GermExpansion"] = None) -> list[Optional[int]]:
        tops = [0]
        for germ in (self,) if other is None else (self, other):
            for piece in germ.a0 + germ.a1:
                for iv in (piece.lvl_a, piece.lvl_d):
                    if iv is None:
                        continue
                    if iv.lo is not None:
                        tops.append(iv.lo)
                    if iv.hi is not None:
                        tops.append(iv.hi)
        top = max(tops) + 1
        return list(range(0, top + 1)) + [None]

    def equivalent(self, other: "GermExpansion") -> bool:
        """Equality of both germ maps on every probe cell (thresholds are
        metadata and are not compared)."""
        if self.setup.ramified != other.setup.ramified:
            return False
        probes = self._probe_levels(other)
        for la in probes:
            for ld in probes:
                for cls in self.classes():
                    if self.eval_a0(la, ld, cls) != other.eval_a0(la, ld, cls):
                        return False
                    if self.eval_a1(la, ld, cls) != other.eval_a1(la, ld, cls):
                        return False
        return True

    def value_at_s0_is_zero(self) -> bool:
        probes = self._probe_levels()
        for la in probes:
            for ld in probes:
                for cls in self.classes():
                    if self.eval_a0(la, ld, cls).eval_at_s0():
                        return False
                    if self.eval_a1(la, ld, cls).eval_at_s0():
                        return False
        return True

    def predicted_orb_s(self, gamma: OrbitData) -> LaurentPoly:
        """eta_s(b) A0 + eta_s(c)^(-1) A1 evaluated at the orbit's invariants."""
        cls = gamma.v_b2 % 2
        a0 = self.eval_a0(gamma.lvl_a, gamma.lvl_d, cls)
        a1 = self.eval_a1(gamma.lvl_a, gamma.lvl_d, cls)
        b_part = LaurentPoly.monomial(gamma.v_b2, gamma.b_sign) * a0
        c_part = LaurentPoly.monomial(-gamma.v_c2, gamma.c_sign) * a1
        return b_part + c_part

    def predicted_d_orb(self, gamma: OrbitData) -> LogValue:
        return self.predicted_orb_s(gamma).d_ds_at_s0()

    def derivative_parts(self) -> "DerivativeGerm":
        """Slope/constant coefficients of the derivative integral at s = 0.

        The b-side enters through eta_s(b), whose derivative contributes
        -v(b) log(q) times the value; the c-side enters inverted, flipping the
        slope sign.  All four maps are rational multiples of log(q)."""
        a0_pieces = tuple(
            DerivativePiece(p.lvl_a, p.lvl_d, p.vclass,
                            slope=-p.poly.eval_at_s0(),
                            constant=p.poly.d_ds_at_s0().log_q_part)
            for p in self.a0)
        a1_pieces = tuple(
            DerivativePiece(p.lvl_a, p.lvl_d, p.vclass,
                            slope=p.poly.eval_at_s0(),
                            constant=p.poly.d_ds_at_s0().log_q_part)
            for p in self.a1)
        return DerivativeGerm(self.setup, a0_pieces, a1_pieces, self.threshold)

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "a0": [p.to_json() for p in self.a0],
            "a1": [p.to_json() for p in self.a1],
        }


@dataclass(frozen=True)
class DerivativePiece:
    lvl_a: Optional[Interval]
    lvl_d: Optional[Interval]
    vclass: int
    slope: Fraction
    constant: Fraction

    def matches(self, lvl_a: Optional[int], lvl_d: Optional[int], vclass: int) -> bool:
        if self.vclass != vclass:
            return False
        if self.lvl_a is not None and not self.lvl_a.contains(lvl_a):
            return False
        if self.lvl_d is not None and not self.lvl_d.contains(lvl_d):
            return False
        return True


@dataclass(frozen=True)
class DerivativeGerm:
    """Coefficients of d/ds at 0: the derivative integral near the diagonal is
    eta(b)[v(b)*slope0 + const0] + eta(c)^(-1)[v(c)*slope1 + const1], times log(q)."""

    setup: FieldSetup
    a0: tuple[DerivativePiece, ...]
    a1: tuple[DerivativePiece, ...]
    threshold: int

    def _sum(self, pieces, lvl_a, lvl_d, vclass) -> tuple[Fraction, Fraction]:
        slope = Fraction(0)
        constant = Fraction(0)
        for p in pieces:
            if p.matches(lvl_a, lvl_d, vclass):
                slope += p.slope
                constant += p.constant
        return slope, constant

    def eval_a0(self, lvl_a, lvl_d, vclass) -> tuple[Fraction, Fraction]:
        return self._sum(self.a0, lvl_a, lvl_d, vclass)

    def eval_a1(self, lvl_a, lvl_d, vclass) -> tuple[Fraction, Fraction]:
        return self._sum(self.a1, lvl_a, lvl_d, vclass)

    def predicted_d_orb(self, gamma: OrbitData) -> LogValue:
        cls = gamma.v_b2 % 2
        s0, c0 = self.eval_a0(gamma.lvl_a, gamma.lvl_d, cls)
        s1, c1 = self.eval_a1(gamma.lvl_a, gamma.lvl_d, cls)
        log_part = gamma.b_sign * (Fraction(gamma.v_b2, 2) * s0 + c0)
        log_part += gamma.c_sign * (Fraction(gamma.v_c2, 2) * s1 + c1)
        return LogValue(Fraction(0), log_part)

    def is_zero(self) -> bool:
        return all(not p.slope and not p.constant for p in self.a0 + self.a1)


def _ceil_half(x2: int) -> int:
    """Smallest integer >= x2/2."""
    return -((-x2) // 2)


def _box_threshold(box: Box) -> int:
    """Smallest t from which the box behaves exactly like its germ shadow."""
    lo_b, hi_b = box.i_b.lo, box.i_b.hi
    lo_c, hi_c = box.i_c.lo, box.i_c.hi
    if lo_b is None or lo_c is None:
        raise DivergenceError("box support is unbounded below in valuation")
    if hi_b is None and hi_c is None:
        bound = _ceil_half(lo_b + lo_c - 2)
    elif hi_b is not None and hi_c is None:
        bound = _ceil_half(lo_c + hi_b)
    elif hi_b is None and hi_c is not None:
        bound = _ceil_half(lo_b + hi_c)
    else:
        bound = (hi_b + hi_c) // 2 + 1
    if box.t_req is not None:
        if box.t_req.lo is not None:
            bound = max(bound, box.t_req.lo)
        if box.t_req.hi is not None:
            bound = max(bound, box.t_req.hi + 1)
    return bound


def validity_threshold(f: InvariantFunction) -> int:
    bounds = [1]
    for coeff, box in f.terms:
        if not coeff:
            continue
        if not (box.i_a.contains(0) and box.i_d.contains(0)):
            continue  # never active near the diagonal, where v(a) = 0
        bounds.append(_box_threshold(box))
    return max(bounds)


def _shell_factor(setup: FieldSetup, sgn_req: Optional[int], w2: int) -> Fraction:
    """Invariant weight of the valuation shell w2 in a germ integral.

    Unramified shells carry (-1)^w and a sign requirement either agrees with
    the shell sign or empties it; ramified shells contribute only when sign
    pinned, each pin selecting a half-measure unit coset."""
    if setup.ramified:
        if sgn_req is None:
            return Fraction(0)
        return Fraction(sgn_req, 2)
    if w2 % 2:
        return Fraction(0)  # no unramified element has half-integral valuation
    shell_sign = MINUS if (w2 // 2) % 2 else PLUS
    if sgn_req is not None and sgn_req != shell_sign:
        return Fraction(0)
    return Fraction(shell_sign)


def _collect_side(setup: FieldSetup, boxes: Sequence[tuple[Fraction, Box]],
                  cells_a: Sequence[Interval], cells_d: Sequence[Interval],
                  b_side: bool) -> list[GermPiece]:
    """Aggregate shell sums per level cell and valuation class.

    For the b-side germ the shells run over the b-interval of every box whose
    c-interval is unbounded (and dually).  Boxes reaching the diagonal have
    unbounded shell ranges; their tails cancel cell by cell because the
    function vanishes on the diagonal, so summation stops once only unbounded
    boxes remain active."""
    classes = (0, 1) if setup.ramified else (0,)
    pieces: list[GermPiece] = []
    for ca in cells_a:
        for cd in cells_d:
            in_cell = []
            for coeff, box in boxes:
                lvl_a_ok = box.lvl_a_req is None or box.lvl_a_req.contains(ca.lo)
                lvl_d_ok = box.lvl_d_req is None or box.lvl_d_req.contains(cd.lo)
                if lvl_a_ok and lvl_d_ok:
                    in_cell.append((coeff, box))
            if not in_cell:
                continue
            shell_ivs = [box.i_b if b_side else box.i_c for _, box in in_cell]
            if any(iv.lo is None for iv in shell_ivs):
                raise DivergenceError("germ integral diverges: shell range unbounded below")
            lo2 = min(iv.lo for iv in shell_ivs)
            hi2 = max((iv.hi if iv.hi is not None else iv.lo) for iv in shell_ivs)
            for cls in classes:
                terms: list[tuple[int, Fraction]] = []
                for w2 in range(lo2, hi2 + 1):
                    if w2 % 2 != cls:
                        continue
                    weight = Fraction(0)
                    for coeff, box in in_cell:
                        iv = box.i_b if b_side else box.i_c
                        if not iv.contains(w2):
                            continue
                        req = box.sgn_b_req if b_side else box.sgn_c_req
                        weight += coeff * _shell_factor(setup, req, w2)
                    if weight:
                        terms.append((-w2 if b_side else w2, weight))
                if terms:
                    pieces.append(GermPiece(ca, cd, cls, LaurentPoly(terms)))
    return pieces


def extract_germ(setup: FieldSetup, f: InvariantFunction) -> GermExpansion:
    """Germ data (A0, A1) of a function vanishing on the degenerate diagonal.

    A0 collects the boxes open towards c = 0 (upper-triangular limit), A1
    those open towards b = 0; each box contributes one invariant monomial per
    accepted valuation shell."""
    if not f.vanishes_on_diagonal():
        raise GermPreconditionError(
            "function does not vanish on the degenerate diagonal; its orbital "
            "integrals acquire unboundedly many monomials near it")
    b_side_boxes = []
    c_side_boxes = []
    for coeff, box in f.terms:
        if not coeff:
            continue
        if not (box.i_a.contains(0) and box.i_d.contains(0)):
            continue
        if box.t_req is not None and box.t_req.bounded_above:
            continue  # dies before the near-diagonal regime
        if not box.i_c.bounded_above:
            b_side_boxes.append((coeff, box))
        if not box.i_b.bounded_above:
            c_side_boxes.append((coeff, box))
    reqs_a = [box.lvl_a_req for _, box in b_side_boxes + c_side_boxes]
    reqs_d = [box.lvl_d_req for _, box in b_side_boxes + c_side_boxes]
    cells_a = level_cells(reqs_a)
    cells_d = level_cells(reqs_d)
    a0 = _collect_side(setup, b_side_boxes, cells_a, cells_d, b_side=True)
    a1 = _collect_side(setup, c_side_boxes, cells_a, cells_d, b_side=False)
    return GermExpansion(setup, tuple(a0), tuple(a1), validity_threshold(f))


def function_from_germ(germ: GermExpansion) -> InvariantFunction:
    """A box function whose orbital integrals realize the prescribed germ for
    every orbit with defect valuation past the (recomputed) threshold.

    Each germ monomial c*T^(k) becomes a single valuation shell: on the b-side
    the shell at v = -k with a sign pin (ramified) or the shell sign
    absorbed into the coefficient (unramified), and dually on the c-side.
    The monomial grading must agree with the valuation class."""
    setup = germ.setup
    terms: list[tuple[Fraction, Box]] = []
    for piece in germ.a0:
        for e2, c in piece.poly.terms():
            w2 = -e2
            if w2 % 2 != piece.vclass:
                raise GermGradingError(
                    f"b-side monomial T^{e2}/2 cannot be realized on class {piece.vclass}")
            if setup.ramified:
                coeff, pin = 2 * c, PLUS
            else:
                coeff, pin = c * _shell_factor(setup, None, w2), None
            terms.append((coeff, Box(
                i_a=Interval(0, 0), i_b=Interval(w2, w2), i_c=Interval(0, None),
                i_d=Interval(0, 0), sgn_b_req=pin,
                lvl_a_req=piece.lvl_a, lvl_d_req=piece.lvl_d)))
    for piece in germ.a1:
        for e2, c in piece.poly.terms():
            w2 = e2
            if w2 % 2 != piece.vclass:
                raise GermGradingError(
                    f"c-side monomial T^{e2}/2 cannot be realized on class {piece.vclass}")
            if setup.ramified:
                coeff, pin = 2 * c, PLUS
            else:
                coeff, pin = c * _shell_factor(setup, None, w2), None
            terms.append((coeff, Box(
                i_a=Interval(0, 0), i_b=Interval(0, None), i_c=Interval(w2, w2),
                i_d=Interval(0, 0), sgn_c_req=pin,
                lvl_a_req=piece.lvl_a, lvl_d_req=piece.lvl_d)))
    return InvariantFunction(terms)


def constant_germ(setup: FieldSetup,
                  cells: Sequence[tuple[Optional[Interval], Optional[Interval], Rational, Rational]],
                  threshold: int = 1) -> GermExpansion:
    """Germ with prescribed s0-constant values (a0, a1) on each level cell.

    On the integral valuation class the values sit in grading T^0; on the
    ramified half-integral class the nearest realizable gradings T^(-1/2)
    (b-side) and T^(1/2) (c-side) are used, so the s = 0 shadow is the
    prescribed constant on every class."""
    a0_pieces = []
    a1_pieces = []
    for lvl_a, lvl_d, a0_val, a1_val in cells:
        a0_val = as_fraction(a0_val)
        a1_val = as_fraction(a1_val)
        if a0_val:
            a0_pieces.append(GermPiece(lvl_a, lvl_d, 0, LaurentPoly.constant(a0_val)))
        if a1_val:
            a1_pieces.append(GermPiece(lvl_a, lvl_d, 0, LaurentPoly.constant(a1_val)))
        if setup.ramified:
            if a0_val:
                a0_pieces.append(GermPiece(lvl_a, lvl_d, 1, LaurentPoly.monomial(-1, a0_val)))
            if a1_val:
                a1_pieces.append(GermPiece(lvl_a, lvl_d, 1, LaurentPoly.monomial(1, a1_val)))
    return GermExpansion(setup, tuple(a0_pieces), tuple(a1_pieces), threshold)


def solve_transfer_germ(c0: Rational, c1: Rational, side_sign_b0: int = PLUS) -> tuple[Fraction, Fraction]:
    """Solve the matched-orbit system for germ values.

    Returns (a0, a1) with defect_sign * side_sign_b0^(-1)-weighted a0 plus a1
    equal to c0 on the +1 side and c1 on the -1 side:
        a0 = side_sign_b0 * (c0 - c1)/2,   a1 = (c0 + c1)/2.
    """
    if side_sign_b0 not in (PLUS, MINUS):
        raise ValueError("side sign must be +1 or -1")
    c0 = as_fraction(c0)
    c1 = as_fraction(c1)
    return side_sign_b0 * (c0 - c1) / 2, (c0 + c1) / 2


def zero_orbit_zero_germ(setup: FieldSetup, f: InvariantFunction) -> bool:
    """For f whose plain orbital integrals vanish identically (checked by the
    caller on a sweep), the value germ at s = 0 must be zero.

    The function is first replaced by a diagonal-vanishing representative with
    the same integrals, then extracted.  A False return signals an engine bug."""
    from .orbital import clear_diagonal
    germ = extract_germ(setup, clear_diagonal(f))
    return germ.value_at_s0_is_zero()
