"""Orbits on the norm-one symmetric space and their exact orbital integrals.

A regular semisimple element gamma = [[a, b], [c, d]] with c = (1 - N(a))/conj(b)
and d = -conj(a) b/conj(b) is stored through invariants only: the valuation and
conductor level of a (and d), the valuation t and character sign of the norm
defect 1 - N(a), and the valuation and sign of b.  Conjugation by a base-field
element of valuation n moves (v(b), v(c)) to (v(b) - n, v(c) + n) and twists
both signs, which is all the integrals can see.

Test functions are finite rational combinations of boxes: valuation intervals
on the four entries plus optional sign, conductor-level, defect-valuation and
matching-side constraints.  The weighted orbit integral of a box collapses to
a finite sum of monomials T^n, one per conjugator valuation shell, each shell
contributing a sign-resolved unit measure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

from .field import MINUS, PLUS, FieldSetup, ValClass, unit_integral
from .symbolic import LaurentPoly, LogValue, Rational, as_fraction


class DivergenceError(ValueError):
    """The orbit meets the support in a set of infinite measure."""


class Side(enum.Enum):
    """Which unitary group the orbit matches into."""

    U0 = "U0"
    U1 = "U1"


def _json_endpoint(x: Optional[int]):
    return None if x is None else x


@dataclass(frozen=True)
class Interval:
    """Integer interval with None endpoints meaning -oo / +oo.

    Used both for doubled valuations and for plain integer data (levels, t);
    contains(None) asks about the point +oo.
    """

    lo: Optional[int] = None
    hi: Optional[int] = None

    def contains(self, x: Optional[int]) -> bool:
        if x is None:
            return self.hi is None
        if self.lo is not None and x < self.lo:
            return False
        if self.hi is not None and x > self.hi:
            return False
        return True

    def shift(self, d: int) -> "Interval":
        return Interval(None if self.lo is None else self.lo + d,
                        None if self.hi is None else self.hi + d)

    @property
    def bounded_above(self) -> bool:
        return self.hi is not None

    @property
    def bounded_below(self) -> bool:
        return self.lo is not None

    def to_json(self) -> list:
        return [_json_endpoint(self.lo), _json_endpoint(self.hi)]

    @classmethod
    def from_json(cls, data) -> "Interval":
        return cls(data[0], data[1])


INTEGRAL = Interval(0, None)  # v >= 0


@dataclass(frozen=True)
class Box:
    """One constraint box; the four intervals are in doubled-valuation units."""

    i_a: Interval
    i_b: Interval
    i_c: Interval
    i_d: Interval
    sgn_b_req: Optional[int] = None
    sgn_c_req: Optional[int] = None
    lvl_a_req: Optional[Interval] = None
    lvl_d_req: Optional[Interval] = None
    t_req: Optional[Interval] = None
    side_req: Optional[Side] = None

    def __post_init__(self) -> None:
        for req in (self.sgn_b_req, self.sgn_c_req):
            if req not in (None, PLUS, MINUS):
                raise ValueError("sign requirement must be None, +1 or -1")
        # closure rules keeping every box an open compact condition:
        # a sign-pinned entry cannot reach 0, and a side constraint cannot
        # reach the degenerate locus at all.
        if self.sgn_b_req is not None and not self.i_b.bounded_above:
            raise ValueError("sign-constrained b-interval must be bounded above")
        if self.sgn_c_req is not None and not self.i_c.bounded_above:
            raise ValueError("sign-constrained c-interval must be bounded above")
        if self.side_req is not None and not (self.i_b.bounded_above and self.i_c.bounded_above):
            raise ValueError("side-constrained boxes must bound both off-diagonal intervals")

    def pulled_back(self, lam: ValClass) -> "Box":
        """The box of gamma -> f(lam^-1 gamma lam): shift b up, c down, twist signs."""
        _require_base(lam)
        h = lam.half_val
        s = lam.eta_sign
        return replace(
            self,
            i_b=self.i_b.shift(h),
            i_c=self.i_c.shift(-h),
            sgn_b_req=None if self.sgn_b_req is None else self.sgn_b_req * s,
            sgn_c_req=None if self.sgn_c_req is None else self.sgn_c_req * s,
        )

    def touches_diagonal(self) -> bool:
        """Whether the box contains degenerate diagonal points (b = c = 0)."""
        return (not self.i_b.bounded_above
                and not self.i_c.bounded_above
                and self.i_a.contains(0)
                and self.i_d.contains(0)
                and (self.t_req is None or not self.t_req.bounded_above)
                and self.side_req is None)

    def to_json(self) -> dict:
        out = {
            "i_a": self.i_a.to_json(),
            "i_b": self.i_b.to_json(),
            "i_c": self.i_c.to_json(),
            "i_d": self.i_d.to_json(),
        }
        if self.sgn_b_req is not None:
            out["sgn_b"] = self.sgn_b_req
        if self.sgn_c_req is not None:
            out["sgn_c"] = self.sgn_c_req
        if self.lvl_a_req is not None:
            out["lvl_a"] = self.lvl_a_req.to_json()
        if self.lvl_d_req is not None:
            out["lvl_d"] = self.lvl_d_req.to_json()
        if self.t_req is not None:
            out["t"] = self.t_req.to_json()
        if self.side_req is not None:
            out["side"] = self.side_req.value
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Box":
        def opt_interval(key):
            return Interval.from_json(data[key]) if key in data else None

        return cls(
            i_a=Interval.from_json(data["i_a"]),
            i_b=Interval.from_json(data["i_b"]),
            i_c=Interval.from_json(data["i_c"]),
            i_d=Interval.from_json(data["i_d"]),
            sgn_b_req=data.get("sgn_b"),
            sgn_c_req=data.get("sgn_c"),
            lvl_a_req=opt_interval("lvl_a"),
            lvl_d_req=opt_interval("lvl_d"),
            t_req=opt_interval("t"),
            side_req=Side(data["side"]) if "side" in data else None,
        )


@dataclass(frozen=True)
class OrbitData:
    """Invariants of a regular semisimple orbit.

    t = v(1 - N(a)) and defect_sign = eta(1 - N(a)); lvl_a / lvl_d are the
    conductor levels of the diagonal entries with None meaning the entry lies
    in the base field; v(b) and eta(b) determine the c-entry data through
    v(c) = t - v(b) and eta(c) = defect_sign * eta(b).
    """

    setup: FieldSetup
    t: int
    v_b2: int
    b_sign: int
    defect_sign: int
    v_a2: int = 0
    lvl_a: Optional[int] = None
    lvl_d: Optional[int] = None

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("the defect valuation t must be >= 0")
        if self.v_a2 < 0:
            raise ValueError("the a-entry must be integral")
        if self.b_sign not in (PLUS, MINUS) or self.defect_sign not in (PLUS, MINUS):
            raise ValueError("signs must be +1 or -1")
        for lvl in (self.lvl_a, self.lvl_d):
            if lvl is not None and lvl < 0:
                raise ValueError("conductor levels are >= 0")
        if self.v_a2 > 0 and (self.t != 0 or self.defect_sign != PLUS):
            raise ValueError("a non-unit a-entry forces t = 0 with sign +1")
        if not self.setup.ramified:
            if self.v_a2 % 2 or self.v_b2 % 2:
                raise ValueError("unramified valuations are integral")
            if self.b_sign != (MINUS if (self.v_b2 // 2) % 2 else PLUS):
                raise ValueError("unramified eta(b) is determined by v(b)")
            if self.defect_sign != (MINUS if self.t % 2 else PLUS):
                raise ValueError("unramified eta(1 - N(a)) is determined by t")

    @property
    def v_c2(self) -> int:
        return 2 * self.t - self.v_b2

    @property
    def c_sign(self) -> int:
        return self.defect_sign * self.b_sign

    @property
    def v_d2(self) -> int:
        return self.v_a2

    @property
    def side(self) -> Side:
        return Side.U0 if self.defect_sign == PLUS else Side.U1

    def b_class(self) -> ValClass:
        return ValClass(self.v_b2, self.b_sign)

    def c_class(self) -> ValClass:
        return ValClass(self.v_c2, self.c_sign)

    def along_orbit(self, lam: ValClass) -> "OrbitData":
        """The conjugated orbit representative: (v(b), eta(b)) twisted by lam."""
        _require_base(lam)
        return replace(self, v_b2=self.v_b2 - lam.half_val, b_sign=self.b_sign * lam.eta_sign)

    def to_json(self) -> dict:
        return {
            "q": self.setup.q,
            "ramified": self.setup.ramified,
            "eta_pi_f": self.setup.eta_pi_f,
            "t": self.t,
            "defect_sign": self.defect_sign,
            "v_b2": self.v_b2,
            "b_sign": self.b_sign,
            "v_a2": self.v_a2,
            "lvl_a": self.lvl_a,
            "lvl_d": self.lvl_d,
        }

    @classmethod
    def from_json(cls, data: dict) -> "OrbitData":
        setup = FieldSetup(data["q"], data["ramified"], data.get("eta_pi_f"))
        return cls(setup=setup, t=data["t"], v_b2=data["v_b2"], b_sign=data["b_sign"],
                   defect_sign=data["defect_sign"], v_a2=data.get("v_a2", 0),
                   lvl_a=data.get("lvl_a"), lvl_d=data.get("lvl_d"))


def unramified_orbit(setup: FieldSetup, t: int, v_b: int,
                     lvl_a: Optional[int] = None, lvl_d: Optional[int] = None) -> OrbitData:
    """Unramified orbit with unit diagonal entries and forced signs."""
    if setup.ramified:
        raise ValueError("expected an unramified setup")
    return OrbitData(setup=setup, t=t, v_b2=2 * v_b,
                     b_sign=MINUS if v_b % 2 else PLUS,
                     defect_sign=MINUS if t % 2 else PLUS,
                     lvl_a=lvl_a, lvl_d=lvl_d)


def _require_base(lam: ValClass) -> None:
    if lam.is_zero or lam.half_val % 2:
        raise ValueError("the twisting element must lie in the base field")


class InvariantFunction:
    """Finite rational combination of boxes, modeling a locally constant
    compactly supported test function of the orbit invariants."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[Rational, Box]] = ()):
        self._terms = tuple((as_fraction(c), box) for c, box in terms)

    @property
    def terms(self) -> tuple[tuple[Fraction, Box], ...]:
        return self._terms

    @classmethod
    def zero(cls) -> "InvariantFunction":
        return cls()

    @classmethod
    def from_box(cls, box: Box, coeff: Rational = 1) -> "InvariantFunction":
        return cls([(coeff, box)])

    def __add__(self, other: "InvariantFunction") -> "InvariantFunction":
        return InvariantFunction(self._terms + other._terms)

    def __sub__(self, other: "InvariantFunction") -> "InvariantFunction":
        return self + other.scale(-1)

    def scale(self, c: Rational) -> "InvariantFunction":
        c = as_fraction(c)
        return InvariantFunction([(c * coeff, box) for coeff, box in self._terms])

    def pulled_back(self, lam: ValClass) -> "InvariantFunction":
        return InvariantFunction([(c, box.pulled_back(lam)) for c, box in self._terms])

    def diagonal_value(self, lvl_a: Optional[int], lvl_d: Optional[int]) -> Fraction:
        """Value at a degenerate diagonal point with the given conductor levels."""
        total = Fraction(0)
        for coeff, box in self._terms:
            if not box.touches_diagonal():
                continue
            if box.lvl_a_req is not None and not box.lvl_a_req.contains(lvl_a):
                continue
            if box.lvl_d_req is not None and not box.lvl_d_req.contains(lvl_d):
                continue
            total += coeff
        return total

    def diagonal_cells(self) -> list[tuple[Interval, Interval, Fraction]]:
        """The restriction to the degenerate diagonal as constant level cells."""
        touching = [box for _, box in self._terms if box.touches_diagonal()]
        cells_a = level_cells([box.lvl_a_req for box in touching])
        cells_d = level_cells([box.lvl_d_req for box in touching])
        out = []
        for ca in cells_a:
            for cd in cells_d:
                value = self.diagonal_value(ca.lo, cd.lo)
                out.append((ca, cd, value))
        return out

    def vanishes_on_diagonal(self) -> bool:
        return all(value == 0 for _, _, value in self.diagonal_cells())

    def to_json(self) -> dict:
        return {"terms": [{"coeff": str(c), "box": box.to_json()} for c, box in self._terms]}

    @classmethod
    def from_json(cls, data: dict) -> "InvariantFunction":
        return cls([(Fraction(entry["coeff"]), Box.from_json(entry["box"]))
                    for entry in data["terms"]])


def level_cells(reqs: Iterable[Optional[Interval]]) -> list[Interval]:
    """Partition the level range (0, 1, ..., oo) into cells on which every
    given requirement interval is constant."""
    bounds = {0}
    for req in reqs:
        if req is None:
            continue
        if req.lo is not None:
            bounds.add(max(req.lo, 0))
        if req.hi is not None:
            bounds.add(req.hi + 1)
    ordered = sorted(bounds)
    cells = []
    for lo, nxt in zip(ordered, ordered[1:]):
        cells.append(Interval(lo, nxt - 1))
    cells.append(Interval(ordered[-1], None))
    return cells


def _fixed_tests(gamma: OrbitData, box: Box) -> bool:
    """The box constraints that do not move along the orbit."""
    if not box.i_a.contains(gamma.v_a2):
        return False
    if not box.i_d.contains(gamma.v_d2):
        return False
    if box.lvl_a_req is not None and not box.lvl_a_req.contains(gamma.lvl_a):
        return False
    if box.lvl_d_req is not None and not box.lvl_d_req.contains(gamma.lvl_d):
        return False
    if box.t_req is not None and not box.t_req.contains(gamma.t):
        return False
    if box.side_req is not None and box.side_req != gamma.side:
        return False
    return True


def _shift_range(gamma: OrbitData, box: Box) -> Optional[tuple[int, int]]:
    """Conjugator valuations n for which the box can hold the shifted orbit.

    Raises DivergenceError when no finite bound exists on either side."""
    uppers = []
    lowers = []
    if box.i_b.lo is not None:
        uppers.append((gamma.v_b2 - box.i_b.lo) // 2)
    if box.i_c.hi is not None:
        uppers.append((box.i_c.hi - gamma.v_c2) // 2)
    if box.i_b.hi is not None:
        lowers.append(-((box.i_b.hi - gamma.v_b2) // 2))
    if box.i_c.lo is not None:
        lowers.append(-((gamma.v_c2 - box.i_c.lo) // 2))
    if not uppers or not lowers:
        raise DivergenceError("the orbit meets the box in an unbounded set")
    n_lo, n_hi = max(lowers), min(uppers)
    if n_lo > n_hi:
        return None
    return n_lo, n_hi


def _shell_measure(gamma: OrbitData, box: Box, n: int) -> Fraction:
    """eta-weighted measure of the unit shell at conjugator valuation n."""
    eps_n = gamma.setup.eta_shift(n)
    pin: Optional[int] = None
    for req, sign in ((box.sgn_b_req, gamma.b_sign), (box.sgn_c_req, gamma.c_sign)):
        if req is None:
            continue
        p = req * sign * eps_n
        if pin is None:
            pin = p
        elif pin != p:
            return Fraction(0)
    return unit_integral(gamma.setup, pin, weight_eta=True)


def orb_s(gamma: OrbitData, f: InvariantFunction) -> LaurentPoly:
    """The orbital integral as an exact polynomial in T = q^(-s).

    Sums over conjugator valuation shells; the shell at valuation n carries
    weight eta(pi_F)^n T^n times the sign-resolved unit measure.
    """
    total = LaurentPoly.zero()
    for coeff, box in f.terms:
        if not coeff or not _fixed_tests(gamma, box):
            continue
        rng = _shift_range(gamma, box)
        if rng is None:
            continue
        n_lo, n_hi = rng
        for n in range(n_lo, n_hi + 1):
            if not box.i_b.contains(gamma.v_b2 - 2 * n):
                continue
            if not box.i_c.contains(gamma.v_c2 + 2 * n):
                continue
            w = _shell_measure(gamma, box, n)
            if w:
                total += LaurentPoly.monomial(2 * n, coeff * w * gamma.setup.eta_shift(n))
    return total


def orb(gamma: OrbitData, f: InvariantFunction) -> Fraction:
    return orb_s(gamma, f).eval_at_s0()


def d_orb(gamma: OrbitData, f: InvariantFunction) -> LogValue:
    return orb_s(gamma, f).d_ds_at_s0()


def transfer_factor(gamma: OrbitData) -> int:
    """The sign eta(c) that makes orbital integrals descend to matched orbits."""
    return gamma.c_sign


def pullback(f: InvariantFunction, lam: ValClass) -> InvariantFunction:
    """f composed with conjugation by lam from the base field."""
    return f.pulled_back(lam)


def eta_twist_difference(f: InvariantFunction, lam: ValClass) -> InvariantFunction:
    """eta(lam) * f - pullback(f, lam); its derivative integral is a rational
    multiple of the plain integral of f, with all coefficients exact."""
    _require_base(lam)
    if lam.half_val == 0:
        raise ValueError("the twisting element must have nonzero valuation")
    return f.scale(lam.eta_sign) - f.pulled_back(lam)


def integral_indicator() -> InvariantFunction:
    """Characteristic function of the elements with all four entries integral."""
    return InvariantFunction.from_box(Box(i_a=INTEGRAL, i_b=INTEGRAL, i_c=INTEGRAL, i_d=INTEGRAL))


def unit_diag_indicator(lvl_a_req: Optional[Interval] = None,
                        lvl_d_req: Optional[Interval] = None) -> InvariantFunction:
    """Characteristic function of unit diagonal entries in the given level
    windows with integral off-diagonal entries."""
    return InvariantFunction.from_box(Box(
        i_a=Interval(0, 0), i_b=INTEGRAL, i_c=INTEGRAL, i_d=Interval(0, 0),
        lvl_a_req=lvl_a_req, lvl_d_req=lvl_d_req))


DEFAULT_TWIST = ValClass(2, MINUS)  # valuation one, eta = -1; exists in every setup


def diagonal_killer(lvl_a_req: Optional[Interval], lvl_d_req: Optional[Interval],
                    lam0: ValClass = DEFAULT_TWIST, lam1: ValClass = DEFAULT_TWIST) -> InvariantFunction:
    """A combination with value 1 on the chosen diagonal cell whose plain and
    derivative orbital integrals both vanish identically.

    Built as a quarter of (1 + lam1-pullback) applied to (1 + lam0-pullback) of
    the cell indicator; the eta = -1 twists kill the integral and then its
    derivative."""
    for lam in (lam0, lam1):
        _require_base(lam)
        if lam.eta_sign != MINUS or lam.half_val < 2:
            raise ValueError("twists need eta = -1 and valuation >= 1")
    base = unit_diag_indicator(lvl_a_req, lvl_d_req)
    once = base + base.pulled_back(lam0)
    return (once + once.pulled_back(lam1)).scale(Fraction(1, 4))


def clear_diagonal(f: InvariantFunction,
                   lam0: ValClass = DEFAULT_TWIST,
                   lam1: ValClass = DEFAULT_TWIST) -> InvariantFunction:
    """A function with the same plain and derivative orbital integrals as f
    whose restriction to the degenerate diagonal vanishes."""
    out = f
    for cell_a, cell_d, value in f.diagonal_cells():
        if value:
            out = out - diagonal_killer(cell_a, cell_d, lam0, lam1).scale(value)
    return out
