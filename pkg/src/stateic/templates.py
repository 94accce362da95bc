"""Rate-constraint templates for both coding schemes.

Each template row is ``(tag, coeffs, terms)`` where ``coeffs`` maps rate
names to integer coefficients and ``terms`` is a list of
``(sign, A, B, C)`` conditional-mutual-information terms whose signed sum
is the right-hand side.  User-2 rows are generated from user-1 rows by the
index swap 1 <-> 2.
"""

from __future__ import annotations

RATE_VARS = ("R10", "R11", "R20", "R22")
BIN_VARS = ("B10", "B11", "B20", "B22")  # bin (Gel'fand-Pinsker) rates R'

_RANK = {n: i for i, n in enumerate(("U1", "V1", "U2", "V2", "X1", "X2", "Y1", "Y2", "S", "Q"))}

_SWAP = {"U1": "U2", "U2": "U1", "V1": "V2", "V2": "V1", "Y1": "Y2", "Y2": "Y1",
         "X1": "X2", "X2": "X1", "R10": "R20", "R20": "R10", "R11": "R22", "R22": "R11",
         "B10": "B20", "B20": "B10", "B11": "B22", "B22": "B11"}


def _sorted(names) -> tuple[str, ...]:
    return tuple(sorted(names, key=lambda n: (_RANK.get(n, 99), n)))


def mi_key(a, b, c=()) -> tuple:
    """Canonical (A, B, C) with I(A;B|C) = I(B;A|C) identified."""
    a, b, c = _sorted(a), _sorted(b), _sorted(c)
    if (_RANK.get(b[0], 99), b) < (_RANK.get(a[0], 99), a):
        a, b = b, a
    return a, b, c


def mi_symbol(a, b, c=()) -> str:
    a, b, c = mi_key(a, b, c)
    s = f"I({','.join(a)};{','.join(b)}"
    return s + (f"|{','.join(c)})" if c else ")")


def _swap_names(names):
    return tuple(_SWAP.get(n, n) for n in names)


def _swap_row(tag, coeffs, terms):
    coeffs = {_SWAP[k]: v for k, v in coeffs.items()}
    terms = [(s, _swap_names(a), _swap_names(b), _swap_names(c)) for s, a, b, c in terms]
    return tag, coeffs, terms


def _t(sign, a, b, c):
    return (sign, tuple(a.split(",")), tuple(b.split(",")), tuple(c.split(",")) if c else ())


_T1_COMMON = [_t(+1, "U1", "U2", "Q"), _t(+1, "U1,U2", "V1", "Q")]
_T1_USER1 = [
    ("11", {"R11": 1}, [_t(+1, "V1", "Y1", "U1,U2,Q"), _t(-1, "V1", "S", "Q")]),
    ("12", {"R10": 1}, [_t(+1, "U1", "Y1", "V1,U2,Q"), _t(-1, "U1", "S", "Q")]),
    ("13", {"R10": 1, "R11": 1},
     [_t(+1, "U1,V1", "Y1", "U2,Q"), _t(-1, "U1", "S", "Q"), _t(-1, "V1", "S", "Q")]),
    ("14", {"R11": 1, "R20": 1},
     [_t(+1, "V1,U2", "Y1", "U1,Q"), _t(-1, "V1", "S", "Q"), _t(-1, "U2", "S", "Q")]),
    ("15", {"R10": 1, "R20": 1},
     [_t(+1, "U1,U2", "Y1", "V1,Q"), _t(-1, "U1", "S", "Q"), _t(-1, "U2", "S", "Q")]),
    ("16", {"R10": 1, "R11": 1, "R20": 1},
     [_t(+1, "U1,V1,U2", "Y1", "Q"), _t(-1, "U1", "S", "Q"), _t(-1, "V1", "S", "Q"),
      _t(-1, "U2", "S", "Q")]),
]

_T2_COMMON = [_t(+1, "U1,V1", "U2", "Q")]
_T2_USER1 = [
    ("11", {"R11": 1}, [_t(+1, "V1", "Y1", "U1,U2,Q"), _t(-1, "V1", "S", "U1,Q")]),
    ("12", {"R10": 1, "R11": 1}, [_t(+1, "U1,V1", "Y1", "U2,Q"), _t(-1, "U1,V1", "S", "Q")]),
    ("13", {"R11": 1, "R20": 1},
     [_t(+1, "V1,U2", "Y1", "U1,Q"), _t(-1, "V1", "S", "U1,Q"), _t(-1, "U2", "S", "Q")]),
    ("14", {"R10": 1, "R11": 1, "R20": 1},
     [_t(+1, "U1,V1,U2", "Y1", "Q"), _t(-1, "U1,V1", "S", "Q"), _t(-1, "U2", "S", "Q")]),
]


def _expand(prefix, common, user1):
    rows = []
    for local, coeffs, terms in user1:
        rows.append((f"{prefix}-1{local[1]}", coeffs, common + terms))
    for local, coeffs, terms in user1:
        tag, c, t = _swap_row(local, coeffs, common + terms)
        rows.append((f"{prefix}-2{local[1]}", c, t))
    return rows


THEOREM1 = _expand("T1", _T1_COMMON, _T1_USER1)
THEOREM2 = _expand("T2", _T2_COMMON, _T2_USER1)


def theorem_templates(theorem: int):
    if theorem == 1:
        return THEOREM1
    if theorem == 2:
        return THEOREM2
    raise ValueError(f"theorem must be 1 or 2, got {theorem!r}")


# ------------------------------------------------------------------ decoder-1 error events
# Rows "R-sum + R'-sum <= MI part" from the per-event union bounds, in the
# variables (R10, R11, R20, B10, B11, B20).  ``DECODER_IMPLIED`` lists which
# events are implied by another event once rates are non-negative, and by which.

def _xi(common, rows):
    out = []
    for tag, lhs, mi in rows:
        out.append((tag, {v: 1 for v in lhs.split("+")}, common + [_t(+1, mi[0], "Y1", mi[1])]))
    return out


_MI = {
    "v": ("V1", "U1,U2,Q"), "vu2": ("V1,U2", "U1,Q"), "uv": ("U1,V1", "U2,Q"),
    "all": ("U1,V1,U2", "Q"), "u": ("U1", "V1,U2,Q"), "uu2": ("U1,U2", "V1,Q"),
}
_XI_LHS = [
    ("xi31", "R11+B11", "v"), ("xi32", "R11+B11+B20", "vu2"), ("xi33", "R11+B10+B11", "uv"),
    ("xi34", "R11+B10+B11+B20", "all"), ("xi41", "R10+B10", "u"), ("xi42", "R10+B10+B20", "uu2"),
    ("xi43", "R10+B10+B11", "uv"), ("xi44", "R10+B10+B11+B20", "all"),
    ("xi51", "R10+R11+B10+B11", "uv"), ("xi52", "R10+R11+B10+B11+B20", "all"),
    ("xi61", "R11+R20+B11+B20", "vu2"), ("xi62", "R11+R20+B10+B11+B20", "all"),
    ("xi71", "R10+R20+B10+B20", "uu2"), ("xi72", "R10+R20+B10+B11+B20", "all"),
    ("xi8", "R10+R11+R20+B10+B11+B20", "all"),
]

# The superposition scheme differs: xi41 keeps "u,v" because v1 is superimposed on u1,
# and xi42/xi71 use the full triple.
_XI2_LHS = [(t, lhs, {"u": "uv", "uu2": "all"}.get(k, k)) for t, lhs, k in _XI_LHS]

DECODER_VARS = ("R10", "R11", "R20", "B10", "B11", "B20")

DECODER1_EVENTS = _xi(_T1_COMMON, [(t, lhs, _MI[k]) for t, lhs, k in _XI_LHS])
DECODER2_EVENTS = _xi(_T2_COMMON, [(t, lhs, _MI[k]) for t, lhs, k in _XI2_LHS])

DECODER1_IMPLIED = {"xi32": "xi61", "xi33": "xi51", "xi42": "xi71", "xi43": "xi51",
                    "xi34": "xi8", "xi44": "xi8", "xi52": "xi8", "xi62": "xi8", "xi72": "xi8"}
DECODER2_IMPLIED = {"xi32": "xi61", "xi33": "xi51", "xi41": "xi43", "xi42": "xi71",
                    "xi43": "xi51", "xi34": "xi8", "xi44": "xi8", "xi52": "xi8",
                    "xi62": "xi8", "xi71": "xi8", "xi72": "xi8"}

# encoder bounds R' >= I(.;S|.) as rows  -B <= -I
ENCODER1_BOUNDS = [
    ("enc-B10", {"B10": -1}, [_t(-1, "U1", "S", "Q")]),
    ("enc-B11", {"B11": -1}, [_t(-1, "V1", "S", "Q")]),
    ("enc-B20", {"B20": -1}, [_t(-1, "U2", "S", "Q")]),
]
ENCODER2_BOUNDS = [
    ("enc-B10", {"B10": -1}, [_t(-1, "U1", "S", "Q")]),
    ("enc-B11", {"B11": -1}, [_t(-1, "V1", "S", "U1,Q")]),
    ("enc-B20", {"B20": -1}, [_t(-1, "U2", "S", "Q")]),
]


def decoder_system(theorem: int = 1, encoder_bounds: bool = True):
    """User-1 pre-elimination rows: error events, encoder bounds, rate non-negativity."""
    events = DECODER1_EVENTS if theorem == 1 else DECODER2_EVENTS
    rows = list(events)
    if encoder_bounds:
        rows += ENCODER1_BOUNDS if theorem == 1 else ENCODER2_BOUNDS
    else:
        rows += [(f"nonneg-{v}", {v: -1}, []) for v in ("B10", "B11", "B20")]
    rows += [(f"nonneg-{v}", {v: -1}, []) for v in ("R10", "R11", "R20")]
    return rows


def template_symbols(rows) -> list[str]:
    seen = []
    for _, _, terms in rows:
        for _, a, b, c in terms:
            s = mi_symbol(a, b, c)
            if s not in seen:
                seen.append(s)
    return seen
