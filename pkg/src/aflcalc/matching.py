"""Orbit matching, intersection lengths, and the AFL / ATI verifiers.

An orbit matches into the split unitary group exactly when its norm defect
1 - N(a) has character sign +1.  A context fixes two lift levels (i, j) and
the ramification index e_F of the deformation base over the unramified base;
the relevant side is U1 when the extension is ramified or i + j is even, and
U0 otherwise.  The matched element has two off-diagonal entries of height
t = v(1 - N(a)) governed by the (i, j) deformation problem and two diagonal
entries governed by (i, i) and (j, j); its intersection length Int is the
minimum of the four lift bounds, the diagonal ones being infinite exactly
when the diagonal entries sit inside the level orders.

AFL here means the unramified level-(0,0) identity
    omega(gamma) * dOrb(1_K) = Int * log q = (1 + t)/2 * log q,
checked against the orbit engine with no shared code path.  The ATI checks
are the computable skeleton of the general identity: the linear growth of
Int in t, and the constancy of the difference between the analytic side and
Int * log q for a test function realizing the prescribed transfer germ.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .deformation import DeformQuery, lift_bound, ramification_index
from .field import MINUS, PLUS, FieldSetup
from .germs import (GermExpansion, constant_germ, extract_germ, function_from_germ,
                    solve_transfer_germ)
from .orbital import (Interval, OrbitData, Side, d_orb, integral_indicator,
                      orb, transfer_factor, unramified_orbit)
from .symbolic import LogValue


class MatchingError(ValueError):
    """Orbit outside the matching locus of the context."""


@dataclass(frozen=True)
class MatchContext:
    """Lift levels and the ramification index e_F of the deformation base
    over the completed unramified base field."""

    setup: FieldSetup
    i: int
    j: int
    e_f: int

    def __post_init__(self) -> None:
        if self.i < 0 or self.j < 0:
            raise ValueError("levels are >= 0")
        if self.e_f < 1:
            raise ValueError("e_F is >= 1")
        if self.e_f % ramification_index(self.setup, max(self.i, self.j)):
            raise ValueError("e_F must be divisible by the larger class-field ramification")

    @property
    def first_case(self) -> bool:
        """Ramified or i + j even; decides the unitary group the context uses."""
        return self.setup.ramified or (self.i + self.j) % 2 == 0

    @property
    def side(self) -> Side:
        return Side.U1 if self.first_case else Side.U0

    def e_rel(self, level_i: int, level_j: int) -> int:
        return self.e_f // ramification_index(self.setup, max(level_i, level_j))


@dataclass(frozen=True)
class EntryHeights:
    """Heights of the four entries of the matched element; None means the
    entry deforms arbitrarily far."""

    off_diag: int
    diag_1: Optional[int]
    diag_4: Optional[int]


def match_side(gamma: OrbitData) -> Side:
    """U0 when the norm defect is a norm (sign +1), U1 otherwise."""
    return gamma.side


def in_context_locus(gamma: OrbitData, ctx: MatchContext) -> bool:
    return match_side(gamma) == ctx.side


def derived_diag_height(setup: FieldSetup, lvl: int) -> int:
    """Canonical class height of a unit diagonal entry of conductor level lvl
    below the lift level: the base-field part absorbs, the rest survives at
    twice the level (shifted by one half when ramified)."""
    return 2 * lvl + (1 if setup.ramified else 0)


def entry_heights(gamma: OrbitData, ctx: MatchContext,
                  diag_1: Optional[int] = None, diag_4: Optional[int] = None) -> EntryHeights:
    """Entry heights of the matched element.

    Off-diagonal heights equal t in every case (the twisting element is a unit
    times at most one uniformizer, and the defect norm accounts for the rest).
    Diagonal entries deform arbitrarily far exactly when their conductor level
    reaches the lift level; otherwise the caller may supply the finite class
    height, with the canonical derived value as default."""
    if not in_context_locus(gamma, ctx):
        raise MatchingError("orbit does not match into the context's unitary group")
    if gamma.lvl_a is None or gamma.lvl_a >= ctx.i:
        h1 = None
    else:
        h1 = diag_1 if diag_1 is not None else derived_diag_height(ctx.setup, gamma.lvl_a)
    if gamma.lvl_d is None or gamma.lvl_d >= ctx.j:
        h4 = None
    else:
        h4 = diag_4 if diag_4 is not None else derived_diag_height(ctx.setup, gamma.lvl_d)
    return EntryHeights(off_diag=gamma.t, diag_1=h1, diag_4=h4)


def diag_height_attainable(setup: FieldSetup, level: int, h: int) -> bool:
    """Whether h is a class height a diagonal entry of some conductor level
    below the lift level can have: the derived values 2*lvl (plus one when
    ramified) for lvl in [0, level)."""
    offset = 1 if setup.ramified else 0
    return h % 2 == offset and 0 <= h <= 2 * (level - 1) + offset


def intersection_length(heights: EntryHeights, ctx: MatchContext) -> int:
    """Minimum of the four entrywise lift bounds.

    The off-diagonal entries always give a finite bound, so the length is
    finite; finite diagonal heights must be class heights their level admits."""
    setup = ctx.setup
    bounds = []
    off_query = DeformQuery(setup, ctx.i, ctx.j, ctx.e_rel(ctx.i, ctx.j), heights.off_diag)
    bounds.append(lift_bound(off_query))  # two identical off-diagonal entries
    for level, h in ((ctx.i, heights.diag_1), (ctx.j, heights.diag_4)):
        if h is None:
            continue
        if not diag_height_attainable(setup, level, h):
            raise MatchingError(f"diagonal class height {h} is not attainable at level {level}")
        bounds.append(lift_bound(DeformQuery(setup, level, level, ctx.e_rel(level, level), h)))
    return min(bounds)


def context_orbit(ctx: MatchContext, t: int, v_b2: int = 0, b_sign: int = PLUS,
                  lvl_a: Optional[int] = None, lvl_d: Optional[int] = None) -> OrbitData:
    """An orbit with defect valuation t inside the context's matching locus."""
    setup = ctx.setup
    if setup.ramified:
        return OrbitData(setup=setup, t=t, v_b2=v_b2, b_sign=b_sign,
                         defect_sign=PLUS if ctx.side == Side.U0 else MINUS,
                         lvl_a=lvl_a, lvl_d=lvl_d)
    gamma = unramified_orbit(setup, t, v_b2 // 2, lvl_a=lvl_a, lvl_d=lvl_d)
    if not in_context_locus(gamma, ctx):
        raise MatchingError(f"defect valuation {t} has the wrong parity for this context")
    return gamma


# ---------------------------------------------------------------------------
# AFL verification (unramified, levels (0, 0), e_F = 1)

@dataclass(frozen=True)
class AflRow:
    q: int
    t: int
    v_b: int
    omega: int
    d_orb_value: LogValue
    lhs: LogValue
    int_value: Optional[int]
    closed_form: Optional[Fraction]
    orb_value: Fraction
    transfer_value: Optional[Fraction]
    passed: bool

    def to_json(self) -> dict:
        return {
            "q": self.q, "t": self.t, "v_b": self.v_b, "omega": self.omega,
            "d_orb": self.d_orb_value.text(), "lhs": self.lhs.text(),
            "int": self.int_value,
            "closed_form": None if self.closed_form is None else str(self.closed_form),
            "orb": str(self.orb_value),
            "transfer": None if self.transfer_value is None else str(self.transfer_value),
            "passed": self.passed,
        }


def afl_verify(setup: FieldSetup, t: int, v_b: int) -> AflRow:
    """Check the level-(0,0) identity at one orbit.

    Odd t: omega * dOrb(1_K) must equal Int * log q and (1 + t)/2 * log q, and
    the plain integral must vanish.  Even t: the transfer statement
    omega * Orb(1_K) = 1 for unit diagonal data."""
    if setup.ramified:
        raise ValueError("the level-(0,0) identity is stated for unramified setups")
    gamma = unramified_orbit(setup, t, v_b)
    f = integral_indicator()
    omega = transfer_factor(gamma)
    d_value = d_orb(gamma, f)
    lhs = d_value.scale(omega)
    orb_value = orb(gamma, f)
    if t % 2:
        ctx = MatchContext(setup, 0, 0, e_f=1)
        heights = entry_heights(gamma, ctx)
        int_value = intersection_length(heights, ctx)
        closed = Fraction(1 + t, 2)
        passed = (lhs == LogValue.of(0, int_value)
                  and Fraction(int_value) == closed
                  and orb_value == 0)
        return AflRow(setup.q, t, v_b, omega, d_value, lhs, int_value, closed,
                      orb_value, None, passed)
    transfer_value = omega * orb_value
    passed = transfer_value == 1
    return AflRow(setup.q, t, v_b, omega, d_value, lhs, None, None,
                  orb_value, transfer_value, passed)


# ---------------------------------------------------------------------------
# ATI skeleton: growth of Int and the end-to-end residual constancy

@dataclass(frozen=True)
class GrowthRow:
    t: int
    int_value: int
    residual: Fraction  # Int - e_F * t / 2 in the open regime, Int itself when saturated

    def to_json(self) -> dict:
        return {"t": self.t, "int": self.int_value, "residual": str(self.residual)}


@dataclass(frozen=True)
class GrowthReport:
    open_rows: dict[int, tuple[GrowthRow, ...]]  # parity -> rows, diagonals unbounded
    open_constants: dict[int, Fraction]
    saturated_rows: tuple[GrowthRow, ...]
    saturation_value: Optional[int]
    passed: bool

    def to_json(self) -> dict:
        return {
            "open": {str(p): [r.to_json() for r in rows] for p, rows in self.open_rows.items()},
            "open_constants": {str(p): str(c) for p, c in self.open_constants.items()},
            "saturated": [r.to_json() for r in self.saturated_rows],
            "saturation_value": self.saturation_value,
            "passed": self.passed,
        }


def _context_ts(ctx: MatchContext, ts: Sequence[int]) -> list[int]:
    good = []
    for t in ts:
        if not ctx.setup.ramified:
            want_odd = ctx.first_case  # even i + j matches U1, i.e. odd defect valuation
            if (t % 2 == 1) != want_odd:
                continue
        good.append(t)
    return good


def ati_growth_check(ctx: MatchContext, ts: Sequence[int],
                     finite_lvl_a: Optional[int] = None) -> GrowthReport:
    """Growth of Int(t): with unbounded diagonals, 2*Int - e_F*t is constant
    per defect parity from t = i + j on; with a finite diagonal bound, Int
    saturates to that bound."""
    ts = [t for t in _context_ts(ctx, ts) if t >= ctx.i + ctx.j]
    open_rows: dict[int, list[GrowthRow]] = {}
    for t in ts:
        gamma = context_orbit(ctx, t)
        value = intersection_length(entry_heights(gamma, ctx), ctx)
        row = GrowthRow(t, value, Fraction(value) - Fraction(ctx.e_f * t, 2))
        open_rows.setdefault(t % 2, []).append(row)
    open_constants = {}
    passed = True
    for parity, rows in open_rows.items():
        constants = {row.residual for row in rows}
        if len(constants) == 1:
            open_constants[parity] = constants.pop()
        else:
            passed = False
    saturated_rows: list[GrowthRow] = []
    saturation_value: Optional[int] = None
    if finite_lvl_a is not None:
        if finite_lvl_a >= ctx.i:
            raise ValueError("finite regime needs a conductor level below the lift level")
        for t in ts:
            gamma = context_orbit(ctx, t, lvl_a=finite_lvl_a)
            value = intersection_length(entry_heights(gamma, ctx), ctx)
            saturated_rows.append(GrowthRow(t, value, Fraction(value)))
        diag_bound = intersection_length(
            EntryHeights(off_diag=max(ts), diag_1=derived_diag_height(ctx.setup, finite_lvl_a),
                         diag_4=None), ctx)
        tail = [row.int_value for row in saturated_rows if row.int_value == diag_bound]
        saturation_value = diag_bound
        # Int must saturate: once the off-diagonal bound passes the diagonal
        # one, every later value equals the diagonal bound.
        seen_plateau = False
        for row in saturated_rows:
            if row.int_value == diag_bound:
                seen_plateau = True
            elif seen_plateau:
                passed = False
        if not tail:
            passed = False
    return GrowthReport({p: tuple(r) for p, r in open_rows.items()}, open_constants,
                        tuple(saturated_rows), saturation_value, passed)


@dataclass(frozen=True)
class EndToEndRow:
    t: int
    v_b2: int
    analytic: Fraction       # omega * dOrb(f) in log(q) units
    int_value: int
    analytic_residual: Fraction
    geometric_residual: Fraction
    correction: Fraction     # analytic - Int, the correction-term witness

    def to_json(self) -> dict:
        return {"t": self.t, "v_b2": self.v_b2, "analytic": str(self.analytic),
                "int": self.int_value, "analytic_residual": str(self.analytic_residual),
                "geometric_residual": str(self.geometric_residual),
                "correction": str(self.correction)}


@dataclass(frozen=True)
class EndToEndReport:
    rows: dict[int, tuple[EndToEndRow, ...]]  # valuation class -> rows
    witnesses: dict[int, Fraction]            # constant correction per class
    outside_rows: tuple[EndToEndRow, ...]
    outside_witness: Optional[Fraction]
    threshold: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "rows": {str(c): [r.to_json() for r in rows] for c, rows in self.rows.items()},
            "witnesses": {str(c): str(w) for c, w in self.witnesses.items()},
            "outside": [r.to_json() for r in self.outside_rows],
            "outside_witness": None if self.outside_witness is None else str(self.outside_witness),
            "threshold": self.threshold,
            "passed": self.passed,
        }


def prescribed_transfer_germ(ctx: MatchContext) -> GermExpansion:
    """Germ of a test function transferring e_F times the lattice-stabilizer
    indicator on the context's side: solve the matched system with
    (C0, C1) = (e_F, 0) in the first case and (0, e_F) otherwise, supported on
    diagonal levels at least (i, j)."""
    c0, c1 = (ctx.e_f, 0) if ctx.first_case else (0, ctx.e_f)
    a0, a1 = solve_transfer_germ(c0, c1, side_sign_b0=PLUS)
    cell = (Interval(ctx.i, None), Interval(ctx.j, None), a0, a1)
    return constant_germ(ctx.setup, [cell])


def ati_end_to_end(ctx: MatchContext, t_count: int = 8,
                   germ_override: Optional[GermExpansion] = None) -> EndToEndReport:
    """Full desk-scale transfer-identity skeleton.

    Builds a test function realizing the prescribed transfer germ, then checks
    on orbits past the validity threshold that omega * dOrb(f) and Int * log q
    both grow with slope e_F/2 in t and that their difference is a constant,
    the correction-term germ witness, per valuation class (and per diagonal
    cell: inside the prescribed support and, when i >= 1, outside it)."""
    prescribed = prescribed_transfer_germ(ctx)
    if germ_override is not None:
        if not germ_override.equivalent(prescribed):
            raise ValueError("germ does not match the prescribed transfer data")
        prescribed = germ_override
    f = function_from_germ(prescribed)
    threshold = max(extract_germ(ctx.setup, f).threshold, ctx.i + ctx.j, 1)
    ts = _context_ts(ctx, range(threshold, threshold + 2 * t_count))[:t_count]
    classes = (0, 1) if ctx.setup.ramified else (0,)
    half_ef = Fraction(ctx.e_f, 2)
    rows: dict[int, list[EndToEndRow]] = {}
    for cls in classes:
        for t in ts:
            for v_b2 in (2 * ((t // 2) % 3) - 2 + cls, cls, 4 + cls):
                gamma = context_orbit(ctx, t, v_b2=v_b2)
                analytic = d_orb(gamma, f).scale(transfer_factor(gamma)).log_q_part
                int_value = intersection_length(entry_heights(gamma, ctx), ctx)
                rows.setdefault(cls, []).append(EndToEndRow(
                    t, v_b2, analytic, int_value,
                    analytic - half_ef * t, Fraction(int_value) - half_ef * t,
                    analytic - int_value))
    witnesses: dict[int, Fraction] = {}
    passed = True
    for cls, cls_rows in rows.items():
        if len({r.analytic_residual for r in cls_rows}) != 1:
            passed = False
        if len({r.geometric_residual for r in cls_rows}) != 1:
            passed = False
        corrections = {r.correction for r in cls_rows}
        if len(corrections) == 1:
            witnesses[cls] = corrections.pop()
        else:
            passed = False
    outside_rows: list[EndToEndRow] = []
    outside_witness: Optional[Fraction] = None
    if ctx.i >= 1:
        for t in ts:
            gamma = context_orbit(ctx, t, lvl_a=ctx.i - 1)
            analytic = d_orb(gamma, f).scale(transfer_factor(gamma)).log_q_part
            int_value = intersection_length(entry_heights(gamma, ctx), ctx)
            outside_rows.append(EndToEndRow(t, 0, analytic, int_value,
                                            analytic, Fraction(int_value),
                                            analytic - int_value))
        corrections = {r.correction for r in outside_rows}
        ints = {r.int_value for r in outside_rows}
        analytics = {r.analytic for r in outside_rows}
        if len(corrections) == 1 and len(ints) == 1 and analytics == {Fraction(0)}:
            outside_witness = corrections.pop()
        else:
            passed = False
    return EndToEndReport({c: tuple(r) for c, r in rows.items()}, witnesses,
                          tuple(outside_rows), outside_witness, threshold, passed)
