"""State-dependent two-user DM interference channel and input factorisations.

Joint distributions produced here always use the variable order
``Q, S, U1, V1, U2, V2, X1, X2, Y1, Y2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .prob import (
    ConditionalPmf,
    JointPmf,
    PmfError,
    ShapeMismatch,
    VarId,
    _check_weights,
    product_join,
)

SCHEME_VARS = ("Q", "S", "U1", "V1", "U2", "V2", "X1", "X2", "Y1", "Y2")
CHANNEL_ALPHABETS = ("X1", "X2", "Y1", "Y2", "S")
AUX_NAMES = ("Q", "U1", "V1", "U2", "V2")


class SpecError(ValueError):
    """Malformed channel or distribution description; ``where`` names the field."""

    def __init__(self, msg: str, where: str = ""):
        super().__init__(f"{where}: {msg}" if where else msg)
        self.where = where


def _pmf_rows(arr, shape, what) -> np.ndarray:
    a = np.asarray(arr, dtype=float)
    if a.shape != tuple(shape):
        raise ShapeMismatch(f"{what} must have shape {tuple(shape)}, got {a.shape}")
    return _check_weights(a, what, axis=-1)


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """p(s) and p(y1, y2 | x1, x2, s).

    ``law`` has shape ``(|S|, |X1|, |X2|, |Y1|, |Y2|)``.
    """

    state_pmf: np.ndarray
    law: np.ndarray

    def __post_init__(self):
        law = np.asarray(self.law, dtype=float)
        if law.ndim != 5:
            raise ShapeMismatch("law must be indexed [s][x1][x2][y1][y2]")
        cells = law.reshape(law.shape[:3] + (-1,))
        object.__setattr__(self, "law", _pmf_rows(cells, cells.shape, "law").reshape(law.shape))
        object.__setattr__(self, "state_pmf", _pmf_rows(self.state_pmf, (law.shape[0],), "state_pmf"))

    @property
    def alphabets(self) -> dict[str, int]:
        s, x1, x2, y1, y2 = self.law.shape
        return {"X1": x1, "X2": x2, "Y1": y1, "Y2": y2, "S": s}

    def card(self, name: str) -> int:
        return self.alphabets[name]

    def to_json(self) -> dict:
        s, x1, x2, y1, y2 = self.law.shape
        return {
            "alphabets": self.alphabets,
            "state_pmf": self.state_pmf.tolist(),
            "law": self.law.reshape(s, x1, x2, y1 * y2).tolist(),
        }


@dataclass(frozen=True, eq=False)
class EncoderMap:
    """Deterministic symbol map x = F(u, v, s), stored as an int table [u][v][s]."""

    table: np.ndarray
    card_x: int

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.ndim != 3:
            raise ShapeMismatch("encoder map must be indexed [u][v][s]")
        if t.size and (t.min() < 0 or t.max() >= self.card_x):
            raise ShapeMismatch(f"encoder map output outside alphabet of size {self.card_x}")
        t = np.array(t, copy=True)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_function(cls, fn: Callable[[int, int, int], int], card_u, card_v, card_s, card_x):
        t = np.empty((card_u, card_v, card_s), dtype=np.int64)
        for idx in np.ndindex(*t.shape):
            t[idx] = fn(*idx)
        return cls(t, card_x)

    @classmethod
    def constant(cls, card_u, card_v, card_s, card_x, value: int = 0):
        return cls(np.full((card_u, card_v, card_s), value, dtype=np.int64), card_x)

    def __call__(self, u, v, s):
        return self.table[u, v, s]

    def __eq__(self, other):
        return (isinstance(other, EncoderMap) and self.card_x == other.card_x
                and np.array_equal(self.table, other.table))

    __hash__ = None


def default_map(card_u, card_v, card_s, card_x, scheme: int = 1) -> EncoderMap:
    """x = v for scheme 2 when |V| = |X|; otherwise x = (u + v) mod |X|."""
    if scheme == 2 and card_v == card_x:
        return EncoderMap.from_function(lambda u, v, s: v, card_u, card_v, card_s, card_x)
    return EncoderMap.from_function(lambda u, v, s: (u + v) % card_x, card_u, card_v, card_s, card_x)


@dataclass(frozen=True, eq=False)
class Scheme1Distribution:
    """p(q) p(u1|q,s) p(v1|q,s) p(u2|q,s) p(v2|q,s) with maps F1, F2.

    Conditional tables are indexed ``[q][s][symbol]``.
    """

    p_q: np.ndarray
    p_u1: np.ndarray
    p_v1: np.ndarray
    p_u2: np.ndarray
    p_v2: np.ndarray
    f1: EncoderMap
    f2: EncoderMap

    scheme = 1

    def __post_init__(self):
        q = np.asarray(self.p_q).shape[0]
        s = np.asarray(self.p_u1).shape[1]
        object.__setattr__(self, "p_q", _pmf_rows(self.p_q, (q,), "p_q"))
        for name in ("p_u1", "p_v1", "p_u2", "p_v2"):
            arr = np.asarray(getattr(self, name))
            object.__setattr__(self, name, _pmf_rows(arr, (q, s, arr.shape[-1]), name))
        _check_map(self.f1, self.p_u1.shape[-1], self.p_v1.shape[-1], s, "f1")
        _check_map(self.f2, self.p_u2.shape[-1], self.p_v2.shape[-1], s, "f2")

    @property
    def cards(self) -> dict[str, int]:
        return {"Q": self.p_q.shape[0], "S": self.p_u1.shape[1],
                "U1": self.p_u1.shape[-1], "V1": self.p_v1.shape[-1],
                "U2": self.p_u2.shape[-1], "V2": self.p_v2.shape[-1]}


@dataclass(frozen=True, eq=False)
class Scheme2Distribution:
    """p(q) p(u1|s,q) p(v1|u1,s,q) p(u2|s,q) p(v2|u2,s,q) with maps G1, G2.

    ``p_u*`` are indexed ``[q][s][u]``; ``p_v*`` are indexed ``[q][s][u][v]``.
    """

    p_q: np.ndarray
    p_u1: np.ndarray
    p_v1: np.ndarray
    p_u2: np.ndarray
    p_v2: np.ndarray
    g1: EncoderMap
    g2: EncoderMap

    scheme = 2

    def __post_init__(self):
        q = np.asarray(self.p_q).shape[0]
        s = np.asarray(self.p_u1).shape[1]
        object.__setattr__(self, "p_q", _pmf_rows(self.p_q, (q,), "p_q"))
        for u, v in (("p_u1", "p_v1"), ("p_u2", "p_v2")):
            ua, va = np.asarray(getattr(self, u)), np.asarray(getattr(self, v))
            object.__setattr__(self, u, _pmf_rows(ua, (q, s, ua.shape[-1]), u))
            object.__setattr__(self, v, _pmf_rows(va, (q, s, ua.shape[-1], va.shape[-1]), v))
        _check_map(self.g1, self.p_u1.shape[-1], self.p_v1.shape[-1], s, "g1")
        _check_map(self.g2, self.p_u2.shape[-1], self.p_v2.shape[-1], s, "g2")

    @property
    def cards(self) -> dict[str, int]:
        return {"Q": self.p_q.shape[0], "S": self.p_u1.shape[1],
                "U1": self.p_u1.shape[-1], "V1": self.p_v1.shape[-1],
                "U2": self.p_u2.shape[-1], "V2": self.p_v2.shape[-1]}

    # maps are named per scheme in the math, but callers mostly want "the maps"
    @property
    def f1(self):
        return self.g1

    @property
    def f2(self):
        return self.g2


def _check_map(m: EncoderMap, cu, cv, cs, what):
    if m.table.shape != (cu, cv, cs):
        raise ShapeMismatch(f"{what} table shape {m.table.shape} != {(cu, cv, cs)}")


def _check_consistent(channel: ChannelSpec, dist) -> None:
    c = dist.cards
    if c["S"] != channel.card("S"):
        raise ShapeMismatch(f"distribution has |S|={c['S']}, channel has {channel.card('S')}")
    if dist.f1.card_x != channel.card("X1") or dist.f2.card_x != channel.card("X2"):
        raise ShapeMismatch("encoder map output alphabets disagree with the channel inputs")


def _common_factors(channel: ChannelSpec, dist):
    c = dist.cards
    Q, S = VarId("Q", c["Q"]), VarId("S", c["S"])
    U1, V1, U2, V2 = (VarId(n, c[n]) for n in ("U1", "V1", "U2", "V2"))
    X1, X2 = VarId("X1", channel.card("X1")), VarId("X2", channel.card("X2"))
    Y1, Y2 = VarId("Y1", channel.card("Y1")), VarId("Y2", channel.card("Y2"))
    head = [ConditionalPmf.from_table((Q,), (), dist.p_q),
            ConditionalPmf.from_table((S,), (), channel.state_pmf)]
    tail = [
        ConditionalPmf.deterministic(X1, (U1, V1, S), dist.f1),
        ConditionalPmf.deterministic(X2, (U2, V2, S), dist.f2),
        ConditionalPmf.from_table((Y1, Y2), (S, X1, X2), channel.law),
    ]
    return (Q, S, U1, V1, U2, V2), head, tail


def build_joint_scheme1(channel: ChannelSpec, dist: Scheme1Distribution) -> JointPmf:
    _check_consistent(channel, dist)
    (Q, S, U1, V1, U2, V2), head, tail = _common_factors(channel, dist)
    mid = [ConditionalPmf.from_table((U1,), (Q, S), dist.p_u1),
           ConditionalPmf.from_table((V1,), (Q, S), dist.p_v1),
           ConditionalPmf.from_table((U2,), (Q, S), dist.p_u2),
           ConditionalPmf.from_table((V2,), (Q, S), dist.p_v2)]
    return product_join(head + mid + tail)


def build_joint_scheme2(channel: ChannelSpec, dist: Scheme2Distribution) -> JointPmf:
    _check_consistent(channel, dist)
    (Q, S, U1, V1, U2, V2), head, tail = _common_factors(channel, dist)
    mid = [ConditionalPmf.from_table((U1,), (Q, S), dist.p_u1),
           ConditionalPmf.from_table((V1,), (Q, S, U1), dist.p_v1),
           ConditionalPmf.from_table((U2,), (Q, S), dist.p_u2),
           ConditionalPmf.from_table((V2,), (Q, S, U2), dist.p_v2)]
    return product_join(head + mid + tail)


def build_joint(channel: ChannelSpec, dist) -> JointPmf:
    if dist.scheme == 1:
        return build_joint_scheme1(channel, dist)
    return build_joint_scheme2(channel, dist)


def embed_scheme1_in_scheme2(dist: Scheme1Distribution) -> Scheme2Distribution:
    """Superposition form of a scheme-1 input: p(v|u,s,q) := p(v|s,q)."""
    def lift(pu, pv):
        return np.broadcast_to(pv[:, :, None, :], pu.shape + (pv.shape[-1],)).copy()

    return Scheme2Distribution(
        p_q=dist.p_q, p_u1=dist.p_u1, p_v1=lift(dist.p_u1, dist.p_v1),
        p_u2=dist.p_u2, p_v2=lift(dist.p_u2, dist.p_v2), g1=dist.f1, g2=dist.f2)


def constant_distribution(channel: ChannelSpec, scheme: int = 1, cards: dict | None = None):
    """Every auxiliary is a point mass at symbol 0; maps are the defaults."""
    cards = dict(cards or {})
    s = channel.card("S")
    c = {n: int(cards.get(n, 1 if n == "Q" else channel.card("X" + n[1]))) for n in AUX_NAMES}

    def point(*shape):
        a = np.zeros(shape)
        a[..., 0] = 1.0
        return a

    maps = [default_map(c[f"U{j}"], c[f"V{j}"], s, channel.card(f"X{j}"), scheme) for j in (1, 2)]
    if scheme == 1:
        return Scheme1Distribution(point(c["Q"]), point(c["Q"], s, c["U1"]), point(c["Q"], s, c["V1"]),
                                   point(c["Q"], s, c["U2"]), point(c["Q"], s, c["V2"]), *maps)
    return Scheme2Distribution(point(c["Q"]), point(c["Q"], s, c["U1"]),
                               point(c["Q"], s, c["U1"], c["V1"]),
                               point(c["Q"], s, c["U2"]), point(c["Q"], s, c["U2"], c["V2"]), *maps)


# ---------------------------------------------------------------- standard channels

def identity_channel(card: int = 2) -> ChannelSpec:
    """Y1 = X1, Y2 = X2, no state."""
    law = np.zeros((1, card, card, card, card))
    for x1 in range(card):
        for x2 in range(card):
            law[0, x1, x2, x1, x2] = 1.0
    return ChannelSpec(np.ones(1), law)


def noise_channel(card_x: int = 2, card_y: int = 2) -> ChannelSpec:
    """Outputs uniform and independent of every input."""
    law = np.full((1, card_x, card_x, card_y, card_y), 1.0 / card_y**2)
    return ChannelSpec(np.ones(1), law)


def stuck_at_channel(p0: float = 0.25, p1: float = 0.25, users: int = 1) -> ChannelSpec:
    """Binary memory with defects: S = 0 stuck-at-0, 1 stuck-at-1, 2 working.

    With ``users=1`` user 2 is degenerate (unary X2, Y2).  With ``users=2``
    both users write through the same defect pattern.
    """
    pmf = np.array([p0, p1, 1.0 - p0 - p1])

    def cell(s, x):
        return x if s == 2 else s

    c2 = 2 if users == 2 else 1
    law = np.zeros((3, 2, c2, 2, c2))
    for s in range(3):
        for x1 in range(2):
            for x2 in range(c2):
                law[s, x1, x2, cell(s, x1), cell(s, x2) if users == 2 else 0] = 1.0
    return ChannelSpec(pmf, law)


def binary_state_channel(p: float = 0.5) -> ChannelSpec:
    """Y1 = X1 xor S with S ~ Bern(p); user 2 degenerate."""
    law = np.zeros((2, 2, 1, 2, 1))
    for s in range(2):
        for x in range(2):
            law[s, x, 0, x ^ s, 0] = 1.0
    return ChannelSpec(np.array([1.0 - p, p]), law)


def single_user_noiseless(card: int = 2) -> ChannelSpec:
    """Y1 = X1 with user 2 degenerate (unary alphabets) and no state."""
    law = np.zeros((1, card, 1, card, 1))
    for x in range(card):
        law[0, x, 0, x, 0] = 1.0
    return ChannelSpec(np.ones(1), law)


# ---------------------------------------------------------------- JSON interfaces

def _get(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"missing field {key!r}", where)
    return obj[key]


def channel_from_json(obj: Any) -> ChannelSpec:
    alph = _get(obj, "alphabets", "channel")
    cards = {}
    for name in CHANNEL_ALPHABETS:
        v = _get(alph, name, "channel.alphabets")
        if not isinstance(v, int) or v < 1:
            raise SpecError(f"cardinality must be a positive integer, got {v!r}", f"channel.alphabets.{name}")
        cards[name] = v
    s, x1, x2, y1, y2 = (cards[k] for k in ("S", "X1", "X2", "Y1", "Y2"))
    law = np.asarray(_get(obj, "law", "channel"), dtype=float) if _rect(obj["law"]) else None
    if law is None or law.shape != (s, x1, x2, y1 * y2):
        got = None if law is None else law.shape
        raise SpecError(f"expected nested shape {(s, x1, x2, y1 * y2)}, got {got}", "channel.law")
    try:
        return ChannelSpec(np.asarray(_get(obj, "state_pmf", "channel"), dtype=float),
                           law.reshape(s, x1, x2, y1, y2))
    except (PmfError, ValueError) as exc:
        raise SpecError(str(exc), "channel") from exc


def _rect(x) -> bool:
    try:
        np.asarray(x, dtype=float)
        return True
    except (ValueError, TypeError):
        return False


def _map_to_json(m: EncoderMap) -> list:
    return m.table.tolist()


def dist_to_json(dist) -> dict:
    return {
        "scheme": dist.scheme,
        "p_q": dist.p_q.tolist(),
        "p_u1": dist.p_u1.tolist(), "p_v1": dist.p_v1.tolist(),
        "p_u2": dist.p_u2.tolist(), "p_v2": dist.p_v2.tolist(),
        "F1": _map_to_json(dist.f1), "F2": _map_to_json(dist.f2),
    }


def dist_from_json(obj: Any, channel: ChannelSpec, scheme: int | None = None):
    """Parse a scheme distribution; ``F1``/``F2`` default to :func:`default_map`."""
    if not isinstance(obj, dict):
        raise SpecError("distribution must be a JSON object", "dist")
    scheme = int(obj.get("scheme", scheme or 1))
    if scheme not in (1, 2):
        raise SpecError(f"scheme must be 1 or 2, got {scheme}", "dist.scheme")
    arrs = {}
    for key in ("p_q", "p_u1", "p_v1", "p_u2", "p_v2"):
        raw = _get(obj, key, "dist")
        if not _rect(raw):
            raise SpecError("ragged or non-numeric array", f"dist.{key}")
        arrs[key] = np.asarray(raw, dtype=float)
    s = channel.card("S")
    maps = []
    for j, (u, v) in enumerate((("p_u1", "p_v1"), ("p_u2", "p_v2")), start=1):
        try:
            cu, cv = arrs[u].shape[-1], arrs[v].shape[-1]
        except IndexError:
            raise SpecError("array has too few dimensions", f"dist.{u}") from None
        cx = channel.card(f"X{j}")
        raw = obj.get(f"F{j}", obj.get(f"G{j}"))
        try:
            maps.append(default_map(cu, cv, s, cx, scheme) if raw is None else EncoderMap(np.asarray(raw), cx))
        except (ValueError, TypeError) as exc:
            raise SpecError(str(exc), f"dist.F{j}") from exc
    cls = Scheme1Distribution if scheme == 1 else Scheme2Distribution
    try:
        return cls(arrs["p_q"], arrs["p_u1"], arrs["p_v1"], arrs["p_u2"], arrs["p_v2"], *maps)
    except (PmfError, ValueError, IndexError) as exc:
        raise SpecError(str(exc), "dist") from exc


def load_json(path) -> Any:
    """Read JSON, converting decode errors into :class:`SpecError` with a line number."""
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
    except OSError as exc:
        raise SpecError(str(exc), str(path)) from exc
