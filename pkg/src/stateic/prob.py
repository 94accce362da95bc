"""Finite probability tensors and exact information measures.

A :class:`JointPmf` is a dense ``numpy`` array with one named axis per
variable.  Every information quantity used elsewhere in the package is
derived from it, in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
RENORM_TOL = 1e-9
MAX_CELLS = 10**8


class PmfError(ValueError):
    """Base class for malformed distributions."""


class NotNormalized(PmfError):
    pass


class NegativeWeight(PmfError):
    pass


class ShapeMismatch(PmfError):
    pass


class DanglingVariable(PmfError):
    pass


class UnknownVariable(PmfError, KeyError):
    pass


class OverlappingSets(PmfError):
    pass


@dataclass(frozen=True)
class VarId:
    name: str
    card: int

    def __post_init__(self):
        if int(self.card) < 1:
            raise ShapeMismatch(f"variable {self.name!r} has cardinality {self.card}")


def _as_vars(vars_: Iterable) -> tuple[VarId, ...]:
    out = []
    for v in vars_:
        out.append(v if isinstance(v, VarId) else VarId(*v))
    names = [v.name for v in out]
    if len(set(names)) != len(names):
        raise ShapeMismatch(f"duplicate variable names in {names}")
    return tuple(out)


def _check_weights(w: np.ndarray, what: str, axis=None) -> np.ndarray:
    if np.any(~np.isfinite(w)):
        raise NotNormalized(f"{what}: non-finite weight")
    if np.any(w < 0):
        raise NegativeWeight(f"{what}: negative weight {w.min():g}")
    total = w.sum(axis=axis, keepdims=axis is not None)
    dev = np.max(np.abs(total - 1.0)) if w.size else 1.0
    if dev > RENORM_TOL:
        raise NotNormalized(f"{what}: sums deviate from 1 by {dev:g}")
    if dev > NORM_TOL:
        w = w / total
    return w


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint pmf over ``vars``; ``weights`` has shape ``(card_1, ..., card_k)``.

    Construct through :meth:`from_weights` to get validation.  Instances are
    immutable; marginal entropies are memoised per instance.
    """

    vars: tuple[VarId, ...]
    weights: np.ndarray
    _hcache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_weights(cls, vars_: Iterable, weights) -> "JointPmf":
        vs = _as_vars(vars_)
        shape = tuple(v.card for v in vs)
        cells = int(np.prod(shape, dtype=np.int64)) if shape else 1
        if cells > MAX_CELLS:
            raise ShapeMismatch(f"{cells} cells exceeds the dense cap {MAX_CELLS}")
        w = np.asarray(weights, dtype=float)
        if w.size != cells:
            raise ShapeMismatch(f"expected {cells} weights for shape {shape}, got {w.size}")
        w = _check_weights(w.reshape(shape), "joint")
        w = np.array(w, copy=True)
        w.setflags(write=False)
        return cls(vs, w)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.weights.shape

    def card(self, name: str) -> int:
        return self.vars[self.axis(name)].card

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"{name!r} not in {self.names}") from None

    def flat(self) -> np.ndarray:
        return self.weights.ravel()

    def reorder(self, names: Sequence[str]) -> "JointPmf":
        if sorted(names) != sorted(self.names):
            raise UnknownVariable(f"{list(names)} is not a permutation of {self.names}")
        axes = [self.axis(n) for n in names]
        return JointPmf(tuple(self.vars[a] for a in axes), np.transpose(self.weights, axes))

    def __repr__(self):
        return f"JointPmf({', '.join(f'{v.name}:{v.card}' for v in self.vars)})"


@dataclass(frozen=True, eq=False)
class ConditionalPmf:
    """p(targets | given) stored as an array of shape given-cards + target-cards."""

    targets: tuple[VarId, ...]
    given: tuple[VarId, ...]
    table: np.ndarray

    @classmethod
    def from_table(cls, targets: Iterable, given: Iterable, table) -> "ConditionalPmf":
        t, g = _as_vars(targets), _as_vars(given)
        _as_vars(t + g)
        shape = tuple(v.card for v in g) + tuple(v.card for v in t)
        arr = np.asarray(table, dtype=float)
        if arr.size != int(np.prod(shape, dtype=np.int64)):
            raise ShapeMismatch(f"conditional table needs shape {shape}, got {arr.shape}")
        arr = arr.reshape(shape)
        nt = len(t)
        flat = arr.reshape(arr.shape[: arr.ndim - nt] + (-1,))
        flat = _check_weights(flat, f"p({','.join(v.name for v in t)}|...)", axis=-1)
        arr = np.array(flat.reshape(shape), copy=True)
        arr.setflags(write=False)
        return cls(t, g, arr)

    @classmethod
    def deterministic(cls, target: VarId, given: Iterable, fn) -> "ConditionalPmf":
        """Point-mass conditional ``target = fn(*given_values)``."""
        g = _as_vars(given)
        shape = tuple(v.card for v in g)
        arr = np.zeros(shape + (target.card,))
        for idx in np.ndindex(*shape):
            out = int(fn(*idx))
            if not 0 <= out < target.card:
                raise ShapeMismatch(f"map output {out} outside alphabet of {target.name}")
            arr[idx + (out,)] = 1.0
        return cls.from_table((target,), g, arr)


def validate(joint: JointPmf) -> None:
    """Raise if ``joint`` violates the pmf invariants."""
    shape = tuple(v.card for v in joint.vars)
    if joint.weights.shape != shape:
        raise ShapeMismatch(f"weights shape {joint.weights.shape} != {shape}")
    w = joint.weights
    if np.any(w < 0):
        raise NegativeWeight(f"negative weight {w.min():g}")
    if abs(w.sum() - 1.0) > NORM_TOL:
        raise NotNormalized(f"weights sum to {w.sum():.15g}")


def validate_weights(weights) -> None:
    """Check a bare weight vector (used for parsed user input)."""
    _check_weights(np.asarray(weights, dtype=float), "weights")
    if abs(float(np.sum(weights)) - 1.0) > NORM_TOL:
        raise NotNormalized(f"weights sum to {float(np.sum(weights)):.15g}")


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def product_join(factors: Sequence) -> JointPmf:
    """Multiply a factorisation, given in dependency order, into one joint.

    Each factor is a :class:`ConditionalPmf` (or a :class:`JointPmf`, treated
    as unconditional).  A factor may only condition on variables produced by
    earlier factors and may not produce a variable twice.
    """
    produced: list[VarId] = []
    cur = np.ones(())
    for f in factors:
        if isinstance(f, JointPmf):
            f = ConditionalPmf(f.vars, (), f.weights)
        pnames = [v.name for v in produced]
        for g in f.given:
            if g.name not in pnames:
                raise DanglingVariable(f"factor conditions on unproduced {g.name!r}")
            if produced[pnames.index(g.name)].card != g.card:
                raise ShapeMismatch(f"cardinality of {g.name!r} disagrees between factors")
        for t in f.targets:
            if t.name in pnames:
                raise DanglingVariable(f"variable {t.name!r} produced twice")
        allv = produced + list(f.targets)
        if len(allv) > len(_LETTERS):
            raise ShapeMismatch("too many variables")
        letter = {v.name: _LETTERS[i] for i, v in enumerate(allv)}
        cur_sub = "".join(letter[v.name] for v in produced)
        tab_sub = "".join(letter[v.name] for v in f.given + f.targets)
        out_sub = "".join(letter[v.name] for v in allv)
        cur = np.einsum(f"{cur_sub},{tab_sub}->{out_sub}", cur, f.table)
        produced = allv
        if cur.size > MAX_CELLS:
            raise ShapeMismatch(f"joint exceeds the dense cap {MAX_CELLS}")
    return JointPmf.from_weights(produced, cur)


def _names(vs) -> tuple[str, ...]:
    if isinstance(vs, str):
        return (vs,)
    return tuple(v.name if isinstance(v, VarId) else v for v in vs)


def marginalize(joint: JointPmf, keep) -> JointPmf:
    """Sum out every variable not in ``keep``; kept axes retain joint order."""
    keep = set(_names(keep))
    for k in keep:
        joint.axis(k)
    drop = tuple(i for i, v in enumerate(joint.vars) if v.name not in keep)
    kept = tuple(v for v in joint.vars if v.name in keep)
    w = joint.weights.sum(axis=drop) if drop else joint.weights
    w = np.array(w, copy=True)
    w.setflags(write=False)
    return JointPmf(kept, w)


def _h_subset(joint: JointPmf, names: frozenset) -> float:
    cached = joint._hcache.get(names)
    if cached is not None:
        return cached
    for k in names:
        joint.axis(k)
    drop = tuple(i for i, v in enumerate(joint.vars) if v.name not in names)
    p = joint.weights.sum(axis=drop) if drop else joint.weights
    p = p[p > 0]
    h = float(-(p * np.log2(p)).sum())
    joint._hcache[names] = h
    return h


def entropy(joint: JointPmf, a, given=()) -> float:
    """H(A | C) in bits."""
    A, C = set(_names(a)), set(_names(given))
    if A & C:
        raise OverlappingSets(f"{sorted(A & C)} appear on both sides")
    return _h_subset(joint, frozenset(A | C)) - _h_subset(joint, frozenset(C))


def cond_mutual_info(joint: JointPmf, a, b, c=()) -> float:
    """I(A; B | C) in bits, clipped at zero only for round-off below 1e-12."""
    A, B, C = set(_names(a)), set(_names(b)), set(_names(c))
    if A & B or A & C or B & C:
        raise OverlappingSets(f"sets not disjoint: {sorted(A)}, {sorted(B)}, {sorted(C)}")
    h = lambda s: _h_subset(joint, frozenset(s))  # noqa: E731
    val = h(A | C) + h(B | C) - h(A | B | C) - h(C)
    if -1e-12 < val < 0:
        return 0.0
    return val
