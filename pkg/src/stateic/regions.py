"""Per-distribution rate polytopes for both schemes and their (R1, R2) projections."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from . import fm
from .fm import EmptyRegion, LinearSystem, Row, SymbolicRhs, rational
from .prob import JointPmf, cond_mutual_info
from .templates import RATE_VARS, mi_symbol, theorem_templates

EMPTY_TOL = 1e-9
MEMBER_SLACK = 1e-9
PAIR_VARS = ("R1", "R2")
REQUIRED_VARS = ("Q", "S", "U1", "V1", "U2", "V2", "Y1", "Y2")


class MissingVariable(KeyError):
    pass


@dataclass(frozen=True)
class RateConstraint:
    """``sum coeffs[v] * v <= rhs`` over the sub-rates.

    ``terms`` keeps the signed mutual-information decomposition of ``rhs``
    as ``(sign, symbol, bits)`` triples when the row came from a template.
    """

    tag: str
    coeffs: Mapping[str, object]
    rhs: object
    terms: tuple = ()

    def __post_init__(self):
        if not any(self.coeffs.get(v, 0) for v in RATE_VARS):
            raise ValueError(f"{self.tag}: constraint has no nonzero coefficient")
        unknown = set(self.coeffs) - set(RATE_VARS)
        if unknown:
            raise ValueError(f"{self.tag}: unknown rate variables {sorted(unknown)}")

    def lhs(self, t: Sequence) -> float:
        return sum(float(self.coeffs.get(v, 0)) * float(x) for v, x in zip(RATE_VARS, t))


@dataclass(frozen=True)
class RatePolytope:
    """Finite list of rate constraints plus implicit non-negativity of all sub-rates."""

    constraints: tuple

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(c.tag for c in self.constraints)

    def rhs(self, tag: str):
        for c in self.constraints:
            if c.tag == tag:
                return c.rhs
        raise KeyError(tag)

    @property
    def symbolic(self) -> bool:
        return any(isinstance(c.rhs, SymbolicRhs) for c in self.constraints)

    @property
    def is_empty(self) -> bool:
        """A negative right-hand side (beyond round-off) excludes even the origin."""
        return not self.symbolic and any(float(c.rhs) < -EMPTY_TOL for c in self.constraints)

    def snapped_rhs(self) -> dict[str, object]:
        out = {}
        for c in self.constraints:
            if isinstance(c.rhs, SymbolicRhs):
                out[c.tag] = c.rhs
            else:
                out[c.tag] = snap_rhs(c.rhs)
        return out

    def system(self) -> LinearSystem:
        """The 4-D system including non-negativity rows."""
        rows = [({v: c.coeffs.get(v, 0) for v in RATE_VARS}, rhs, c.tag)
                for c, rhs in zip(self.constraints, self.snapped_rhs().values())]
        rows += [({v: -1}, 0, f"nonneg-{v}") for v in RATE_VARS]
        return LinearSystem.build(RATE_VARS, rows)


def snap_rhs(x) -> mpq:
    """Rational right-hand side; round-off negatives in [-1e-9, 0) become 0."""
    if isinstance(x, float) and -EMPTY_TOL <= x < 0:
        return mpq(0)
    return rational(x)


def _require(joint: JointPmf):
    missing = [v for v in REQUIRED_VARS if v not in joint.names]
    if missing:
        raise MissingVariable(f"joint lacks {missing}")


def theorem_constraints(joint: JointPmf, theorem: int) -> list[RateConstraint]:
    _require(joint)
    out = []
    for tag, coeffs, terms in theorem_templates(theorem):
        parts = []
        for sign, a, b, c in terms:
            parts.append((sign, mi_symbol(a, b, c), cond_mutual_info(joint, a, b, c)))
        rhs = float(sum(s * v for s, _, v in parts))
        out.append(RateConstraint(tag, dict(coeffs), rhs, tuple(parts)))
    return out


def theorem1_constraints(joint: JointPmf) -> list[RateConstraint]:
    """The twelve simultaneous-encoding constraints T1-11 ... T1-26."""
    return theorem_constraints(joint, 1)


def theorem2_constraints(joint: JointPmf) -> list[RateConstraint]:
    """The eight superposition-encoding constraints T2-11 ... T2-24."""
    return theorem_constraints(joint, 2)


def rate_polytope(joint: JointPmf, theorem: int) -> RatePolytope:
    return RatePolytope(tuple(theorem_constraints(joint, theorem)))


def membership(polytope: RatePolytope, t: Sequence, slack: float = MEMBER_SLACK) -> bool:
    if len(t) != len(RATE_VARS):
        raise ValueError(f"rate tuple needs {len(RATE_VARS)} entries")
    if any(float(x) < 0 for x in t):
        return False
    return all(c.lhs(t) <= float(c.rhs) + slack for c in polytope.constraints)


# ------------------------------------------------------------------ projection


def _substituted(rows: Iterable, zero: Sequence[str] = ()) -> LinearSystem:
    """Rows over (R1, R2, R10, R20) after R11 = R1 - R10, R22 = R2 - R20."""
    out = []
    for coeffs, rhs, tag in rows:
        c = {v: rational(coeffs.get(v, 0)) for v in RATE_VARS}
        out.append(({"R1": c["R11"], "R2": c["R22"], "R10": c["R10"] - c["R11"],
                     "R20": c["R20"] - c["R22"]}, rhs, tag))
    out += [({"R10": -1}, 0, "nonneg-R10"), ({"R10": 1, "R1": -1}, 0, "nonneg-R11"),
            ({"R20": -1}, 0, "nonneg-R20"), ({"R20": 1, "R2": -1}, 0, "nonneg-R22")]
    pins = {"R10": {"R10": 1}, "R11": {"R1": 1, "R10": -1},
            "R20": {"R20": 1}, "R22": {"R2": 1, "R20": -1}}
    for v in zero:
        out.append((pins[v], 0, f"zero-{v}"))
    return LinearSystem.build(("R1", "R2", "R10", "R20"), out)


def pair_system(rows: Iterable, zero: Sequence[str] = (), prune: bool = True) -> LinearSystem:
    """Eliminate R10 then R20 from template-style rows ``(coeffs, rhs, tag)``."""
    sys = _substituted(rows, zero)
    return fm.eliminate_all(sys, ("R10", "R20"), prune=prune)


def project_to_pairs(polytope: RatePolytope) -> LinearSystem:
    """Explicit (R1, R2) description of ``{(R10+R11, R20+R22)}`` over the polytope."""
    if polytope.is_empty:
        raise EmptyRegion("a constraint has negative right-hand side")
    rows = [(dict(c.coeffs), rhs, c.tag)
            for c, rhs in zip(polytope.constraints, polytope.snapped_rhs().values())]
    out = pair_system(rows)
    if not polytope.symbolic and not fm.is_feasible(out):
        raise EmptyRegion("projected system is infeasible")
    return out


@lru_cache(maxsize=None)
def pair_plan(theorem: int) -> LinearSystem:
    """Projection with each row's right-hand side kept as the symbol of its tag.

    Pruned for every non-negative assignment, so it is valid for any
    distribution whose region is non-empty.
    """
    rows = [(coeffs, SymbolicRhs.symbol(tag), tag) for tag, coeffs, _ in theorem_templates(theorem)]
    return pair_system(rows)


def pair_polygon(polytope: RatePolytope, theorem: int) -> list[tuple]:
    """Vertices of the projected region via the cached symbolic projection."""
    if polytope.is_empty:
        raise EmptyRegion("a constraint has negative right-hand side")
    plan = pair_plan(theorem)
    values = polytope.snapped_rhs()
    missing = set(plan.symbols()) - set(values)
    if missing:
        raise KeyError(f"polytope lacks tags {sorted(missing)}")
    return fm.vertices_2d(plan.instantiate(values))


def polygon(sys: LinearSystem) -> list[tuple]:
    return fm.vertices_2d(sys)


def max_weighted_sum(poly2d, lam) -> float:
    """max lam*R1 + (1-lam)*R2 over a 2-D system or a vertex list."""
    value, _ = support_point(poly2d, lam)
    return float(value)


def support_point(poly2d, lam) -> tuple:
    lam = rational(lam)
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    verts = fm.vertices_2d(poly2d) if isinstance(poly2d, LinearSystem) else list(poly2d)
    return fm.max_linear(verts, (lam, 1 - lam))


def _interval(sys: LinearSystem, var: str, fixed: Mapping[str, object]):
    """Exact feasible interval of ``var`` once every other variable is fixed."""
    k = sys.variables.index(var)
    lo, hi = None, None
    for r in sys.rows:
        rest = sum((c * rational(fixed[v]) for c, v in zip(r.coeffs, sys.variables) if v != var), mpq(0))
        a, b = r.coeffs[k], r.rhs - rest
        if a > 0:
            hi = b / a if hi is None else min(hi, b / a)
        elif a < 0:
            lo = b / a if lo is None else max(lo, b / a)
        elif b < 0:
            return None
    return lo, hi


def lift_pair(polytope: RatePolytope, r1, r2) -> tuple:
    """A sub-rate tuple achieving (r1, r2), found by exact back-substitution.

    Returns ``None`` when no split exists.
    """
    rows = [(dict(c.coeffs), rhs, c.tag)
            for c, rhs in zip(polytope.constraints, polytope.snapped_rhs().values())]
    full = _substituted(rows)
    mid = fm.eliminate(full, "R10")
    r1, r2 = rational(r1), rational(r2)
    iv = _interval(mid, "R20", {"R1": r1, "R2": r2})
    if iv is None or (iv[0] is not None and iv[1] is not None and iv[0] > iv[1]):
        return None
    r20 = iv[0] if iv[0] is not None else min(iv[1], mpq(0))
    iv = _interval(full, "R10", {"R1": r1, "R2": r2, "R20": r20})
    if iv is None or (iv[0] is not None and iv[1] is not None and iv[0] > iv[1]):
        return None
    r10 = iv[0] if iv[0] is not None else min(iv[1], mpq(0))
    return (r10, r1 - r10, r20, r2 - r20)


# ------------------------------------------------------------------ text format


def parse_constraints(text: str) -> RatePolytope:
    """Parse ``tag: c10*R10 + c11*R11 + c20*R20 + c22*R22 <= rhs`` lines."""
    sys = fm.parse_system(text, RATE_VARS)
    out = []
    for i, r in enumerate(sys.rows, start=1):
        coeffs = {v: c for v, c in zip(RATE_VARS, r.coeffs) if c != 0}
        if not coeffs:
            raise fm.ParseError("constraint has no rate variable", i)
        out.append(RateConstraint(r.tag or f"c{i}", coeffs, r.rhs))
    return RatePolytope(tuple(out))


def format_constraints(polytope: RatePolytope) -> str:
    rows = [Row(tuple(rational(c.coeffs.get(v, 0)) for v in RATE_VARS),
                c.rhs if isinstance(c.rhs, SymbolicRhs) else snap_rhs(c.rhs), c.tag)
            for c in polytope.constraints]
    return fm.format_system(LinearSystem(RATE_VARS, tuple(rows)))
