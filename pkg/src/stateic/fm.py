"""Exact Fourier-Motzkin elimination, redundancy pruning and 2-D vertex enumeration.

All arithmetic is over ``gmpy2.mpq``.  A right-hand side is either a
rational or a :class:`SymbolicRhs` (a rational constant plus a rational
combination of named non-negative symbols).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cmp_to_key
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from . import _simplex

MAX_ROWS = 10**5
SNAP_DENOMINATOR = 2**32


class FMError(ValueError):
    pass


class RowExplosion(FMError):
    pass


class EmptyRegion(FMError):
    pass


class Unbounded(FMError):
    pass


def rational(x) -> mpq:
    """Exact conversion for ints/Fractions/strings; floats are snapped."""
    if isinstance(x, float):
        return snap(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x))
    return mpq(x)


def snap(x: float, max_den: int = SNAP_DENOMINATOR) -> mpq:
    f = Fraction(float(x)).limit_denominator(max_den)
    return mpq(f.numerator, f.denominator)


def to_fraction(q) -> Fraction:
    q = mpq(q)
    return Fraction(int(q.numerator), int(q.denominator))


# ----------------------------------------------------------------------------- rhs


@dataclass(frozen=True)
class SymbolicRhs:
    constant: mpq
    terms: tuple  # sorted ((symbol, coeff), ...), no zero coefficients

    @classmethod
    def make(cls, constant=0, terms: Mapping[str, object] | Iterable = ()) -> "SymbolicRhs":
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[str, mpq] = {}
        for k, v in items:
            acc[k] = acc.get(k, mpq(0)) + rational(v)
        return cls(rational(constant), tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    @classmethod
    def symbol(cls, name: str, coeff=1) -> "SymbolicRhs":
        return cls.make(0, {name: coeff})

    def __add__(self, other):
        if not isinstance(other, SymbolicRhs):
            return SymbolicRhs(self.constant + rational(other), self.terms)
        acc = dict(self.terms)
        for k, v in other.terms:
            acc[k] = acc.get(k, mpq(0)) + v
        return SymbolicRhs(self.constant + other.constant,
                           tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    __radd__ = __add__

    def __mul__(self, k):
        k = rational(k)
        if k == 0:
            return SymbolicRhs(mpq(0), ())
        return SymbolicRhs(self.constant * k, tuple((s, v * k) for s, v in self.terms))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other if isinstance(other, SymbolicRhs) else -rational(other))

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.terms)

    def coeff(self, name: str) -> mpq:
        return dict(self.terms).get(name, mpq(0))

    def instantiate(self, values: Mapping[str, object]) -> mpq:
        total = self.constant
        for s, v in self.terms:
            total += v * rational(values[s])
        return total

    def nonneg_for_all(self) -> bool:
        """True when the expression is >= 0 for every non-negative assignment."""
        return self.constant >= 0 and all(v > 0 for _, v in self.terms)

    def __str__(self):
        return format_rhs(self)


def _scale(rhs, k):
    return rhs * k if isinstance(rhs, SymbolicRhs) else rhs * k


def _add(a, b):
    if isinstance(a, SymbolicRhs) or isinstance(b, SymbolicRhs):
        return (a if isinstance(a, SymbolicRhs) else SymbolicRhs(mpq(a), ())) + b
    return a + b


# ----------------------------------------------------------------------------- systems


@dataclass(frozen=True)
class Row:
    coeffs: tuple  # mpq per system variable
    rhs: object  # mpq | SymbolicRhs
    tag: str = ""

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def value(self, point: Sequence) -> mpq:
        return sum((c * rational(x) for c, x in zip(self.coeffs, point)), mpq(0))


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``coeffs . x <= rhs`` over ``variables``."""

    variables: tuple
    rows: tuple

    @classmethod
    def build(cls, variables: Sequence[str], rows: Iterable) -> "LinearSystem":
        """``rows``: iterables of ``(coeffs, rhs[, tag])``; coeffs a sequence or a name->coef map."""
        vs = tuple(variables)
        out = []
        for r in rows:
            if isinstance(r, Row):
                out.append(r)
                continue
            coeffs, rhs, *rest = r
            if isinstance(coeffs, Mapping):
                unknown = set(coeffs) - set(vs)
                if unknown:
                    raise FMError(f"unknown variables {sorted(unknown)}")
                coeffs = [coeffs.get(v, 0) for v in vs]
            if len(coeffs) != len(vs):
                raise FMError(f"row has {len(coeffs)} coefficients for {len(vs)} variables")
            rhs = rhs if isinstance(rhs, SymbolicRhs) else rational(rhs)
            out.append(Row(tuple(rational(c) for c in coeffs), rhs, rest[0] if rest else ""))
        return cls(vs, tuple(out))

    @property
    def symbolic(self) -> bool:
        return any(isinstance(r.rhs, SymbolicRhs) for r in self.rows)

    def symbols(self) -> list[str]:
        seen: list[str] = []
        for r in self.rows:
            if isinstance(r.rhs, SymbolicRhs):
                seen.extend(s for s in r.rhs.symbols if s not in seen)
        return seen

    def contains(self, point: Sequence, slack=0) -> bool:
        slack = rational(slack)
        return all(r.value(point) <= r.rhs + slack for r in self.rows)

    def instantiate(self, values: Mapping[str, object]) -> "LinearSystem":
        rows = tuple(Row(r.coeffs, r.rhs.instantiate(values) if isinstance(r.rhs, SymbolicRhs) else r.rhs,
                         r.tag) for r in self.rows)
        return LinearSystem(self.variables, rows)

    def with_rows(self, rows) -> "LinearSystem":
        return LinearSystem(self.variables, tuple(rows))

    def __len__(self):
        return len(self.rows)

    def __str__(self):
        return format_system(self)


INFEASIBLE_TAG = "infeasible"


def _infeasible(variables) -> LinearSystem:
    return LinearSystem(tuple(variables), (Row(tuple(mpq(0) for _ in variables), mpq(-1), INFEASIBLE_TAG),))


def normalize_row(row: Row) -> Row:
    """Scale by a positive factor so the coefficients form a primitive integer vector."""
    if row.is_zero():
        return row
    den = 1
    for c in row.coeffs:
        den = den * int(c.denominator) // math.gcd(den, int(c.denominator))
    ints = [int(c * den) for c in row.coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    k = mpq(den, g)
    if k == 1:
        return row
    return Row(tuple(c * k for c in row.coeffs), _scale(row.rhs, k), row.tag)


def _combine_tags(tp: str, kp, tn: str, kn) -> str:
    def part(t, k):
        if not t:
            return ""
        return t if k == 1 else f"{k}*{t}"
    return "+".join(p for p in (part(tp, kp), part(tn, kn)) if p)


def _trivial(row: Row) -> bool | None:
    """For an all-zero row: True if always satisfied, False if never, None if it depends."""
    rhs = row.rhs
    if isinstance(rhs, SymbolicRhs):
        if not rhs.terms:
            return rhs.constant >= 0
        if rhs.nonneg_for_all():
            return True
        if rhs.constant < 0 and all(v < 0 for _, v in rhs.terms):
            return False
        return None
    return rhs >= 0


def _dedup(rows: Iterable[Row]) -> list[Row]:
    """Normalise, drop tautologies, and merge rows with equal coefficient vectors."""
    out: dict = {}
    order = []
    for r in rows:
        r = normalize_row(r)
        if r.is_zero():
            t = _trivial(r)
            if t is True:
                continue
        if isinstance(r.rhs, SymbolicRhs):
            key = (r.coeffs, r.rhs)
            if key not in out:
                out[key] = r
                order.append(key)
            continue
        key = r.coeffs
        if key not in out:
            out[key] = r
            order.append(key)
        elif r.rhs < out[key].rhs:
            out[key] = r
    return [out[k] for k in order]


def eliminate(sys: LinearSystem, var: str) -> LinearSystem:
    """Project out ``var`` by pairing every lower bound with every upper bound."""
    if var not in sys.variables:
        raise FMError(f"{var!r} not in {sys.variables}")
    k = sys.variables.index(var)
    zero, pos, neg = [], [], []
    for r in sys.rows:
        c = r.coeffs[k]
        (pos if c > 0 else neg if c < 0 else zero).append(r)
    if len(zero) + len(pos) * len(neg) > MAX_ROWS:
        raise RowExplosion(f"eliminating {var} would produce {len(zero) + len(pos) * len(neg)} rows "
                           f"({len(pos)} upper x {len(neg)} lower bounds, {len(zero)} untouched)")

    def drop(coeffs):
        return coeffs[:k] + coeffs[k + 1:]

    rows = [Row(drop(r.coeffs), r.rhs, r.tag) for r in zero]
    for p in pos:
        for n in neg:
            a, b = -n.coeffs[k], p.coeffs[k]  # both positive
            coeffs = tuple(a * x + b * y for x, y in zip(p.coeffs, n.coeffs))
            rows.append(Row(drop(coeffs), _add(_scale(p.rhs, a), _scale(n.rhs, b)),
                            _combine_tags(p.tag, a, n.tag, b)))
    return LinearSystem(sys.variables[:k] + sys.variables[k + 1:], tuple(_dedup(rows)))


# ----------------------------------------------------------------------------- LP helpers


def _lift(sys: LinearSystem):
    """Numeric view of a (possibly symbolic) system in (x, sigma) space.

    Returns ``(rows, bounds, nvars)`` where rows are ``(coeff list, const)`` and
    ``bounds`` are the rows ``-sigma_k <= 0``.
    """
    syms = sys.symbols()
    rows = []
    for r in sys.rows:
        if isinstance(r.rhs, SymbolicRhs):
            extra = [-r.rhs.coeff(s) for s in syms]
            rows.append((list(r.coeffs) + extra, r.rhs.constant))
        else:
            rows.append((list(r.coeffs) + [mpq(0)] * len(syms), r.rhs))
    nx = len(sys.variables)
    bounds = []
    for j in range(len(syms)):
        v = [mpq(0)] * (nx + len(syms))
        v[nx + j] = mpq(-1)
        bounds.append((v, mpq(0)))
    return rows, bounds, nx + len(syms)


def _feasible(rows, dim) -> bool:
    """Farkas: infeasible iff some lambda >= 0 has A^T lambda = 0, b.lambda < 0."""
    if not rows:
        return True
    M = [[r[0][j] for r in rows] for j in range(dim)] + [[mpq(1)] * len(rows)]
    d = [mpq(0)] * dim + [mpq(1)]
    status, value, _ = _simplex.solve([r[1] for r in rows], M, d, stop=mpq(-1, 10**30))
    return status != _simplex.OPTIMAL or value >= 0


def _implied(target, others, dim) -> bool:
    """Whether ``a.x <= b`` holds on the (assumed non-empty) set cut out by ``others``."""
    a, b = target
    if not others:
        return not any(a) and b >= 0
    M = [[r[0][j] for r in others] for j in range(dim)]
    status, value, _ = _simplex.solve([r[1] for r in others], M, a, stop=b)
    return status == _simplex.OPTIMAL and value <= b


def is_feasible(sys: LinearSystem) -> bool:
    """Exact feasibility (for symbolic systems: for some non-negative symbol values)."""
    rows, bounds, dim = _lift(sys)
    return _feasible(rows + bounds, dim)


def implied_by(sys: LinearSystem, row: Row) -> bool:
    """Does every point of ``sys`` (and, if symbolic, every symbol value >= 0) satisfy ``row``?"""
    probe = sys.with_rows(list(sys.rows) + [row])
    rows, bounds, dim = _lift(probe)
    if not _feasible(rows[:-1] + bounds, dim):
        return True
    return _implied(rows[-1], rows[:-1] + bounds, dim)


def prune_redundant(sys: LinearSystem) -> LinearSystem:
    """Drop rows implied by the remaining ones, testing in row order.

    For symbolic systems a row is dropped only when the implication holds for
    every non-negative assignment of the symbols.  An infeasible system is
    returned as the single row ``0 <= -1``.
    """
    base = _dedup(sys.rows)
    if any(r.is_zero() and _trivial(r) is False for r in base):
        return _infeasible(sys.variables)
    work = sys.with_rows(base)
    rows, bounds, dim = _lift(work)
    if not _feasible(rows + bounds, dim):
        return _infeasible(sys.variables)
    keep = list(range(len(rows)))
    for i in range(len(rows)):
        others = [rows[j] for j in keep if j != i] + bounds
        if _implied(rows[i], others, dim):
            keep.remove(i)
    return work.with_rows([base[i] for i in keep])


def eliminate_all(sys: LinearSystem, names: Sequence[str], prune: bool = True) -> LinearSystem:
    for v in names:
        sys = eliminate(sys, v)
        if prune:
            sys = prune_redundant(sys)
    return sys


# ----------------------------------------------------------------------------- 2-D geometry


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _numeric_rows(sys: LinearSystem):
    if sys.symbolic:
        raise FMError("vertex enumeration needs numeric right-hand sides")
    if len(sys.variables) != 2:
        raise FMError(f"vertices_2d needs exactly 2 variables, got {sys.variables}")
    return [(r.coeffs[0], r.coeffs[1], r.rhs) for r in sys.rows]


def _recession_nonzero(rows) -> bool:
    normals = [(a, b) for a, b, _ in rows if a or b]
    if not normals:
        return True
    for a, b in normals:
        for d in ((-b, a), (b, -a)):
            if all(p * d[0] + q * d[1] <= 0 for p, q in normals):
                return True
    return False


def order_ccw(points):
    """Counter-clockwise order of points in convex position, starting bottom-left."""
    pts = sorted(set(points), key=lambda p: (p[1], p[0]))
    if len(pts) <= 2:
        return pts
    start = pts[0]

    def cmp(p, q):
        c = _cross(start, p, q)
        if c > 0:
            return -1
        if c < 0:
            return 1
        dp = (p[0] - start[0]) ** 2 + (p[1] - start[1]) ** 2
        dq = (q[0] - start[0]) ** 2 + (q[1] - start[1]) ** 2
        return -1 if dp < dq else (1 if dp > dq else 0)

    return [start] + sorted(pts[1:], key=cmp_to_key(cmp))


def vertices_2d(sys: LinearSystem) -> list[tuple]:
    """Vertices of a bounded, non-empty polygon, counter-clockwise, exact."""
    rows = _numeric_rows(sys)
    if any(not a and not b and c < 0 for a, b, c in rows):
        raise EmptyRegion("row 0 <= negative")
    # parallel rows with the same orientation: only the tightest matters
    tight = {}
    for a, b, c in rows:
        if a or b:
            k = max(abs(a), abs(b))
            key = (a / k, b / k)
            tight[key] = min(tight.get(key, c / k), c / k)
    rows = [(a, b, c) for (a, b), c in tight.items()]
    cands = set()
    for i in range(len(rows)):
        a1, b1, c1 = rows[i]
        for j in range(i + 1, len(rows)):
            a2, b2, c2 = rows[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            if (x, y) in cands:
                continue
            if all(a * x + b * y <= c for a, b, c in rows):
                cands.add((x, y))
    if not cands:
        if is_feasible(sys):
            raise Unbounded("feasible region has no vertex")
        raise EmptyRegion("no feasible point")
    if _recession_nonzero(rows):
        raise Unbounded("region is unbounded")
    return order_ccw(cands)


def convex_hull(points) -> list[tuple]:
    """Andrew's monotone chain on exact points; counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return order_ccw(pts)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return order_ccw(lower[:-1] + upper[:-1])


def polygon_violation(poly: Sequence[tuple], point) -> float:
    """Largest amount by which ``point`` lies outside a CCW convex polygon (0 if inside).

    Edges are measured in the sup-norm-scaled form used for row violations, so
    for axis-aligned edges the value is exactly a rate gap in bits.
    """
    pts = list(poly)
    px, py = rational(point[0]), rational(point[1])
    if len(pts) == 1:
        return float(max(abs(px - pts[0][0]), abs(py - pts[0][1])))
    if len(pts) == 2:
        return float(_segment_distance(pts[0], pts[1], (px, py)))
    worst = mpq(0)
    for i in range(len(pts)):
        (x0, y0), (x1, y1) = pts[i], pts[(i + 1) % len(pts)]
        # outward normal of edge (x0,y0)->(x1,y1) for CCW order is (dy, -dx)
        a, b = y1 - y0, x0 - x1
        scale = max(abs(a), abs(b))
        if scale == 0:
            continue
        v = (a * (px - x0) + b * (py - y0)) / scale
        if v > worst:
            worst = v
    return float(worst)


def _segment_distance(p, q, r):
    """Sup-norm distance from r to segment pq (exact on a fine parametrisation)."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    denom = dx * dx + dy * dy
    t = ((r[0] - p[0]) * dx + (r[1] - p[1]) * dy) / denom if denom else mpq(0)
    t = min(max(t, mpq(0)), mpq(1))
    cx, cy = p[0] + t * dx, p[1] + t * dy
    return max(abs(r[0] - cx), abs(r[1] - cy))


def max_linear(vertices: Sequence[tuple], weights: Sequence) -> tuple:
    """``(value, vertex)`` maximising ``weights . v``; earliest vertex wins ties."""
    if not vertices:
        raise EmptyRegion("no vertices")
    w = [rational(x) for x in weights]
    best = None
    for v in vertices:
        val = sum((a * b for a, b in zip(w, v)), mpq(0))
        if best is None or val > best[0]:
            best = (val, v)
    return best


# ----------------------------------------------------------------------------- text format

_NUM = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?(?:/\d+)?"
_TERM = re.compile(rf"\s*([-+])?\s*(?:({_NUM})\s*\*\s*)?([A-Za-z_][\w']*|I\([^)]*\))\s*")


def format_number(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(int(q))
    return repr(float(q)) if q.denominator > 10**6 else f"{int(q.numerator)}/{int(q.denominator)}"


def format_rhs(rhs) -> str:
    if not isinstance(rhs, SymbolicRhs):
        return format_number(rhs)
    parts = [format_number(rhs.constant)] if rhs.constant != 0 or not rhs.terms else []
    for s, v in rhs.terms:
        sign = "-" if v < 0 else "+"
        parts.append(f"{sign} {format_number(abs(v))}*{s}")
    out = " ".join(parts)
    if out.startswith("+ "):
        return out[2:]
    return "-" + out[2:] if out.startswith("- ") else out


def format_row(row: Row, variables) -> str:
    terms = []
    for c, v in zip(row.coeffs, variables):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        terms.append(f"{sign} {format_number(abs(c))}*{v}")
    lhs = " ".join(terms) if terms else "0"
    if lhs.startswith("+ "):
        lhs = lhs[2:]
    elif lhs.startswith("- "):
        lhs = "-" + lhs[2:]
    text = f"{lhs} <= {format_rhs(row.rhs)}"
    return f"{row.tag}: {text}" if row.tag else text


def format_system(sys: LinearSystem) -> str:
    return "\n".join(format_row(r, sys.variables) for r in sys.rows)


class ParseError(FMError):
    def __init__(self, msg, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _parse_expr(text: str, line: int):
    """Linear expression -> dict name -> mpq plus a constant (symbols allowed)."""
    pos, out, const = 0, {}, mpq(0)
    text = text.strip()
    if not text:
        raise ParseError("empty expression", line)
    num_only = re.compile(rf"\s*([-+])?\s*({_NUM})\s*(?=[-+]|$)")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m and m.end() > pos:
            sign, num, name = m.groups()
            coef = rational(num) if num else mpq(1)
            if sign == "-":
                coef = -coef
            out[name] = out.get(name, mpq(0)) + coef
            pos = m.end()
            continue
        m = num_only.match(text, pos)
        if m and m.end() > pos:
            sign, num = m.groups()
            v = rational(num)
            const += -v if sign == "-" else v
            pos = m.end()
            continue
        raise ParseError(f"cannot parse {text[pos:]!r}", line)
    return out, const


def _rational_token(s: str) -> mpq:
    if "/" in s:
        return rational(Fraction(s))
    return rational(Fraction(s)) if re.fullmatch(r"[-+]?\d+", s) else snap(float(s))


def parse_system(text: str, variables: Sequence[str] | None = None) -> LinearSystem:
    """Parse ``[tag:] lhs <= rhs`` lines; ``#`` starts a comment.

    Names on the left are variables; names on the right (e.g. ``I(U1;S|Q)``)
    become symbols.  Decimal constants are snapped to rationals.
    """
    parsed = []
    seen_vars: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag = ""
        m = re.match(r"^([^:<>=]+?):\s*(.*)$", line)
        if m and "I(" not in m.group(1):
            tag, line = m.group(1).strip(), m.group(2)
        if line.count("<=") != 1:
            raise ParseError("expected exactly one '<='", lineno)
        lhs, rhs = line.split("<=")
        try:
            coeffs, lconst = _parse_expr(lhs.replace("−", "-"), lineno)
            rterms, rconst = _parse_expr(rhs.replace("−", "-"), lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from exc
        rconst -= lconst
        for name in coeffs:
            if name.startswith("I("):
                raise ParseError(f"symbol {name} on the left-hand side", lineno)
            if name not in seen_vars:
                seen_vars.append(name)
        rhs_val = SymbolicRhs.make(rconst, rterms) if rterms else rconst
        parsed.append((coeffs, rhs_val, tag, lineno))
    vs = tuple(variables) if variables is not None else tuple(seen_vars)
    rows = []
    for coeffs, rhs_val, tag, lineno in parsed:
        unknown = set(coeffs) - set(vs)
        if unknown:
            raise ParseError(f"unknown variable(s) {sorted(unknown)}", lineno)
        rows.append(Row(tuple(coeffs.get(v, mpq(0)) for v in vs), rhs_val, tag))
    return LinearSystem(vs, tuple(rows))


# ----------------------------------------------------------------------------- symbolic regions


def eliminate_symbolic_region(theorem, tags: Iterable[str] | None = None,
                              zero: Iterable[str] = ()) -> LinearSystem:
    """Mechanical explicit (R1, R2) description of a theorem's region.

    RHS stay as signed sums of mutual-information symbols.  ``tags`` restricts
    to a subset of template rows; ``zero`` pins sub-rates to 0 (e.g.
    ``("R20", "R22")`` for a user-1-only subsystem).
    """
    from .regions import pair_system
    from .templates import mi_symbol, theorem_templates

    if isinstance(theorem, str):
        theorem = {"theorem-1": 1, "theorem-2": 2, "1": 1, "2": 2}[theorem]
    rows = []
    for tag, coeffs, terms in theorem_templates(theorem):
        if tags is not None and tag not in set(tags):
            continue
        rhs = SymbolicRhs.make(0, [(mi_symbol(a, b, c), s) for s, a, b, c in terms])
        rows.append((coeffs, rhs, tag))
    return pair_system(rows, zero=tuple(zero), prune=True)


def template_system(rows, variables: Sequence[str]) -> LinearSystem:
    """Template rows ``(tag, coeffs, terms)`` as a system whose right-hand
    sides are signed sums of mutual-information symbols."""
    from .templates import mi_symbol

    out = []
    for tag, coeffs, terms in rows:
        rhs = SymbolicRhs.make(0, [(mi_symbol(a, b, c), s) for s, a, b, c in terms])
        out.append((coeffs, rhs, tag))
    return LinearSystem.build(variables, out)


def removed_tags(sys: LinearSystem) -> list[str]:
    """Tags of the rows that :func:`prune_redundant` drops, in row order."""
    kept = {r.tag for r in prune_redundant(sys).rows}
    return [r.tag for r in sys.rows if r.tag not in kept]
