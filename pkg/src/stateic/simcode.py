"""Monte Carlo random-coding simulator for both schemes.

Codebooks are generated lazily in fixed-size chunks, each from its own
seeded generator, so the encoder can stop early while the decoder sees the
very same codewords.  Index arguments and results of the public functions
are 1-based; internal arrays are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .channel import ChannelSpec, build_joint
from .prob import JointPmf, marginalize

DECODER_CAP = 2**24
BIN_CAP = 2**26
CHUNK = 16384
BLOCK = 2**16  # candidate tuples per vectorised typicality batch

# stream tags for the per-trial generators
_Q_STREAM, _S_STREAM, _NOISE_STREAM = 1001, 1002, 1003


class SimError(ValueError):
    pass


class CapExceeded(SimError):
    def __init__(self, msg: str, exponent: float):
        super().__init__(f"{msg} (2^{exponent:.2f})")
        self.exponent = exponent


class LengthMismatch(SimError):
    pass


class DecodeError(Exception):
    pass


class DecodeAmbiguous(DecodeError):
    pass


class DecodeEmpty(DecodeError):
    pass


def index_count(n: int, rate: float) -> int:
    """ceil(2^(n R)), at least 1; a hair of slack keeps integer exponents exact."""
    return max(1, math.ceil(2.0 ** (n * float(rate)) - 1e-9))


@dataclass(frozen=True)
class SimConfig:
    n: int
    epsilon: float
    rates: tuple = (0.0, 0.0, 0.0, 0.0)
    bin_rates: tuple = (0.0, 0.0, 0.0, 0.0)
    trials: int = 100
    seed: int = 0
    scheme: int = 1
    decode: bool = True

    def __post_init__(self):
        if int(self.n) < 1:
            raise SimError("block length must be >= 1")
        if not 0 < self.epsilon < 1:
            raise SimError("epsilon must lie in (0, 1)")
        if len(self.rates) != 4 or len(self.bin_rates) != 4:
            raise SimError("rates and bin_rates need four entries (R10, R11, R20, R22)")
        if any(float(r) < 0 for r in tuple(self.rates) + tuple(self.bin_rates)):
            raise SimError("rates must be non-negative")
        if self.trials < 0:
            raise SimError("trials must be >= 0")
        if self.scheme not in (1, 2):
            raise SimError("scheme must be 1 or 2")
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        object.__setattr__(self, "bin_rates", tuple(float(r) for r in self.bin_rates))

    @property
    def counts(self) -> dict[str, int]:
        """Message counts M and bin sizes L per sub-message."""
        names = ("10", "11", "20", "22")
        out = {f"M{k}": index_count(self.n, r) for k, r in zip(names, self.rates)}
        out.update({f"L{k}": index_count(self.n, r) for k, r in zip(names, self.bin_rates)})
        return out

    def decoder_tuples(self, receiver: int) -> int:
        c = self.counts
        j, i = (1, 2) if receiver == 1 else (2, 1)
        return (c[f"M{j}0"] * c[f"L{j}0"] * c[f"M{i}0"] * c[f"L{i}0"]
                * c[f"M{j}{j}"] * c[f"L{j}{j}"])

    def check_caps(self) -> None:
        c = self.counts
        for k in ("L10", "L11", "L20", "L22"):
            if c[k] > BIN_CAP:
                raise CapExceeded(f"bin {k} has {c[k]} codewords, cap {BIN_CAP}", math.log2(c[k]))
        if self.decode:
            for r in (1, 2):
                t = self.decoder_tuples(r)
                if t > DECODER_CAP:
                    raise CapExceeded(f"decoder {r} would scan {t} tuples, cap {DECODER_CAP}",
                                      math.log2(t))

    def to_json(self) -> dict:
        return {"n": self.n, "epsilon": self.epsilon, "rates": list(self.rates),
                "bin_rates": list(self.bin_rates), "trials": self.trials, "seed": self.seed,
                "scheme": self.scheme, "decode": self.decode}


def default_bin_rates(joint: JointPmf, scheme: int = 1, margin: float = 0.1) -> tuple:
    """R' = I(aux; S | .) + margin for each of the four bins."""
    from .prob import cond_mutual_info as I

    if scheme == 1:
        vals = [I(joint, a, "S", "Q") for a in ("U1", "V1", "U2", "V2")]
    else:
        vals = [I(joint, "U1", "S", "Q"), I(joint, "V1", "S", ("U1", "Q")),
                I(joint, "U2", "S", "Q"), I(joint, "V2", "S", ("U2", "Q"))]
    return tuple(v + margin for v in vals)


# ------------------------------------------------------------------ typicality


def typical_bounds(pmf: np.ndarray, n: int, epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer count window per cell: |N/n - p| <= eps * p, and N = 0 where p = 0."""
    p = np.asarray(pmf, dtype=float).ravel()
    lo = np.ceil(n * p * (1 - epsilon) - 1e-9).astype(np.int64)
    hi = np.floor(n * p * (1 + epsilon) + 1e-9).astype(np.int64)
    lo[p <= 0] = 0
    hi[p <= 0] = 0
    return lo, hi


def _cell_keys(columns: Sequence[np.ndarray], cards: Sequence[int]) -> np.ndarray:
    key = None
    for col, k in zip(columns, cards):
        col = np.asarray(col, dtype=np.int64)
        key = col if key is None else key * k + col
    return key


def _typical_mask(columns, cards, lo, hi) -> np.ndarray:
    """Typicality of each row of the broadcast of ``columns`` (each (n,) or (C, n))."""
    key = np.atleast_2d(_cell_keys(columns, cards))
    rows, n = key.shape
    size = int(np.prod(cards))
    flat = (np.arange(0, rows * size, size, dtype=np.int64)[:, None] + key).ravel()
    counts = np.bincount(flat, minlength=rows * size).reshape(rows, size)
    return np.all((counts >= lo) & (counts <= hi), axis=1)


def typical(seqs, ref: JointPmf, epsilon: float) -> bool:
    """Robust typicality of sequences (ordered as ``ref.vars`` or keyed by name)."""
    if isinstance(seqs, Mapping):
        seqs = [seqs[name] for name in ref.names]
    seqs = [np.asarray(s, dtype=np.int64) for s in seqs]
    if len(seqs) != len(ref.vars):
        raise LengthMismatch(f"{len(seqs)} sequences for {len(ref.vars)} variables")
    n = len(seqs[0]) if seqs else 0
    if any(len(s) != n for s in seqs):
        raise LengthMismatch(f"sequence lengths {[len(s) for s in seqs]}")
    if n == 0:
        raise LengthMismatch("empty sequences")
    for s, v in zip(seqs, ref.vars):
        if s.min() < 0 or s.max() >= v.card:
            return False
    lo, hi = typical_bounds(ref.weights, n, epsilon)
    return bool(_typical_mask(seqs, ref.shape, lo, hi)[0])


def composition_feasible(fixed_key: np.ndarray, n_fixed: int, k: int, lo, hi) -> bool:
    """Can any candidate column make (fixed, candidate) typical?

    Cells group by the fixed symbol, so existence reduces to a count window
    per fixed symbol.
    """
    nf = np.bincount(fixed_key, minlength=n_fixed)
    lo2, hi2 = lo.reshape(n_fixed, k), hi.reshape(n_fixed, k)
    return bool(np.all(lo2 <= hi2) and np.all(lo2.sum(1) <= nf) and np.all(nf <= hi2.sum(1)))


def _rows_typical(fixed_key: np.ndarray, nf: int, rows: np.ndarray, k: int, lo, hi) -> np.ndarray:
    """Typicality of (fixed, row) for every candidate row.

    The fixed columns are shared, so the joint counts are a one-hot product
    ``(rows == a) @ onehot(fixed)`` per candidate symbol ``a``.
    """
    n = len(fixed_key)
    onehot = np.zeros((n, nf), dtype=np.float32)
    onehot[np.arange(n), fixed_key] = 1.0
    lo2, hi2 = lo.reshape(nf, k), hi.reshape(nf, k)
    rest = np.broadcast_to(onehot.sum(0), (len(rows), nf))
    mask = np.ones(len(rows), dtype=bool)
    for a in range(1, k):
        cnt = (rows == a).astype(np.float32) @ onehot
        rest = rest - cnt
        mask &= np.all((cnt >= lo2[:, a]) & (cnt <= hi2[:, a]), axis=1)
    mask &= np.all((rest >= lo2[:, 0]) & (rest <= hi2[:, 0]), axis=1)
    return mask


# ------------------------------------------------------------------ codebooks


class LazyBook:
    """``size`` codewords of length n with position-wise distributions ``cdf[i]``.

    Chunk ``c`` always comes from ``default_rng(key + (c,))``, so any subset
    of rows can be produced on demand and agrees with a full materialisation.
    """

    def __init__(self, key: tuple, cdf: np.ndarray, size: int, chunk: int = CHUNK):
        self.key = tuple(int(k) for k in key)
        self.cdf = np.asarray(cdf, dtype=float)
        self._cut = self.cdf[:, :-1].astype(np.float32)
        self.size = int(size)
        self.chunk = chunk
        self._cache: dict[int, np.ndarray] = {}

    @property
    def n(self) -> int:
        return self.cdf.shape[0]

    def _chunk(self, c: int) -> np.ndarray:
        got = self._cache.get(c)
        if got is None:
            rows = min(self.chunk, self.size - c * self.chunk)
            k = self.cdf.shape[1]
            if k == 1:
                got = np.zeros((rows, self.n), dtype=np.int8)
            else:
                r = np.random.default_rng(self.key + (c,)).random((rows, self.n), dtype=np.float32)
                got = (r[:, :, None] >= self._cut[None]).sum(-1, dtype=np.int8)
            if len(self._cache) < 64:
                self._cache[c] = got
        return got

    def rows(self, start: int, stop: int) -> np.ndarray:
        if not 0 <= start <= stop <= self.size:
            raise IndexError(f"rows {start}:{stop} outside book of {self.size}")
        parts = []
        c = start // self.chunk
        while start < stop:
            block = self._chunk(c)
            base = c * self.chunk
            hi = min(stop, base + len(block))
            parts.append(block[start - base: hi - base])
            start, c = hi, c + 1
        if not parts:
            return np.zeros((0, self.n), dtype=np.int8)
        return parts[0] if len(parts) == 1 else np.concatenate(parts)

    def all(self) -> np.ndarray:
        return self.rows(0, self.size)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.rows(i, i + 1)[0]

    def __len__(self):
        return self.size


def _cdf_rows(cond: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Per-position CDF from a conditional table indexed by the centre symbols."""
    rows = cond[tuple(centers)] if centers.ndim > 1 else cond[centers]
    cdf = np.cumsum(rows, axis=-1)
    cdf[:, -1] = 1.0
    return cdf


@dataclass
class SchemeTables:
    """Everything derived from the joint that the simulator needs."""

    joint: JointPmf
    cards: dict
    p_q: np.ndarray
    gen_u: list  # p(u_j | q), shape (Q, U_j)
    gen_v: list  # scheme 1: p(v_j | q); scheme 2: p(v_j | q, u_j)
    refs: dict = field(default_factory=dict)

    def ref(self, names: tuple) -> np.ndarray:
        got = self.refs.get(names)
        if got is None:
            m = marginalize(self.joint, names).reorder(names)
            got = self.refs[names] = np.asarray(m.weights)
        return got


def _conditional(joint: JointPmf, target: str, given: tuple) -> np.ndarray:
    names = given + (target,)
    w = np.asarray(marginalize(joint, names).reorder(names).weights)
    tot = w.sum(axis=-1, keepdims=True)
    k = w.shape[-1]
    return np.where(tot > 0, w / np.where(tot > 0, tot, 1.0), 1.0 / k)


def scheme_tables(channel: ChannelSpec, dist) -> SchemeTables:
    joint = build_joint(channel, dist)
    cards = {v.name: v.card for v in joint.vars}
    gen_u = [_conditional(joint, f"U{j}", ("Q",)) for j in (1, 2)]
    if dist.scheme == 1:
        gen_v = [_conditional(joint, f"V{j}", ("Q",)) for j in (1, 2)]
    else:
        gen_v = [_conditional(joint, f"V{j}", ("Q", f"U{j}")) for j in (1, 2)]
    p_q = np.asarray(marginalize(joint, ("Q",)).weights)
    return SchemeTables(joint, cards, p_q, gen_u, gen_v)


@dataclass
class Codebook:
    scheme: int
    q: np.ndarray
    counts: dict
    u: list  # LazyBook per user, index m0 * L0 + l0
    v: list  # scheme 1: LazyBook per user; scheme 2: unused
    tables: SchemeTables
    key: tuple

    def satellites(self, user: int, center: int) -> LazyBook:
        """Scheme-2 private book attached to cloud centre ``center`` of ``user``."""
        if self.scheme == 1:
            return self.v[user - 1]
        cache = self.v[user - 1]
        book = cache.get(center)
        if book is None:
            j = user
            cen = self.u[j - 1][center]
            cdf = _cdf_rows(self.tables.gen_v[j - 1], np.stack([self.q, cen]))
            size = self.counts[f"M{j}{j}"] * self.counts[f"L{j}{j}"]
            book = LazyBook(self.key + (j, 1, center + 1), cdf, size)
            if len(cache) < 4096:
                cache[center] = book
        return book

    def v_book(self, user: int) -> LazyBook:
        if self.scheme != 1:
            raise SimError("scheme-2 private books hang off cloud centres; use satellites()")
        return self.v[user - 1]


def _trial_key(cfg_or_key) -> tuple:
    if isinstance(cfg_or_key, (tuple, list)):
        return tuple(int(k) for k in cfg_or_key)
    return (int(cfg_or_key),)


def generate_codebooks(channel: ChannelSpec, dist, cfg: SimConfig, key=(0, 0),
                       tables: SchemeTables | None = None) -> Codebook:
    """Random codebooks for one trial; ``key`` (e.g. ``(seed, trial)``) fixes every draw."""
    cfg.check_caps()
    key = _trial_key(key)
    tables = tables or scheme_tables(channel, dist)
    if dist.scheme != cfg.scheme:
        raise SimError(f"distribution is scheme {dist.scheme}, config says {cfg.scheme}")
    rng = np.random.default_rng(key + (_Q_STREAM,))
    q = rng.choice(len(tables.p_q), size=cfg.n, p=tables.p_q)
    c = cfg.counts
    u = [LazyBook(key + (j, 0, 0), _cdf_rows(tables.gen_u[j - 1], q), c[f"M{j}0"] * c[f"L{j}0"])
         for j in (1, 2)]
    if cfg.scheme == 1:
        v = [LazyBook(key + (j, 1, 0), _cdf_rows(tables.gen_v[j - 1], q), c[f"M{j}{j}"] * c[f"L{j}{j}"])
             for j in (1, 2)]
    else:
        v = [{}, {}]
    return Codebook(cfg.scheme, q, c, u, v, tables, key)


# ------------------------------------------------------------------ encoder


@dataclass(frozen=True)
class EncodeResult:
    indices: tuple  # (l_j0, l_jj), 1-based
    event: str | None  # None, "xi1" or "xi2"
    found: tuple  # raw search outcome per search (None = failed, skipped = -1)


def _first_typical(book: LazyBook, start: int, stop: int, fixed_cols, fixed_cards, k, lo, hi):
    """First index in [start, stop) whose codeword completes a typical tuple."""
    fixed_key = _cell_keys(fixed_cols, fixed_cards)
    nf = int(np.prod(fixed_cards))
    if not composition_feasible(fixed_key, nf, k, lo, hi):
        return None
    pos = start
    while pos < stop:
        end = min(stop, (pos // book.chunk + 1) * book.chunk)
        mask = _rows_typical(fixed_key, nf, book.rows(pos, end), k, lo, hi)
        hit = np.flatnonzero(mask)
        if hit.size:
            return pos + int(hit[0])
        pos = end
    return None


def gp_encode(codebook: Codebook, state_seq, message=(1, 1), cfg: SimConfig | None = None,
              user: int = 1, epsilon: float | None = None) -> EncodeResult:
    """Bin search for codewords jointly typical with the state."""
    eps = epsilon if epsilon is not None else cfg.epsilon
    s = np.asarray(state_seq, dtype=np.int64)
    q = codebook.q
    if len(s) != len(q):
        raise LengthMismatch(f"state sequence has length {len(s)}, block length {len(q)}")
    j = user
    t = codebook.tables
    c = codebook.counts
    m0, mj = message[0] - 1, message[1] - 1
    L0, Lj = c[f"L{j}0"], c[f"L{j}{j}"]
    if not (0 <= m0 < c[f"M{j}0"] and 0 <= mj < c[f"M{j}{j}"]):
        raise IndexError(f"message {message} outside the message sets")
    cq, cs = t.cards["Q"], t.cards["S"]
    cu, cv = t.cards[f"U{j}"], t.cards[f"V{j}"]
    n = len(q)

    lo, hi = typical_bounds(t.ref(("Q", "S", f"U{j}")), n, eps)
    l0 = _first_typical(codebook.u[j - 1], m0 * L0, m0 * L0 + L0, [q, s], (cq, cs), cu, lo, hi)
    if codebook.scheme == 1:
        lo, hi = typical_bounds(t.ref(("Q", "S", f"V{j}")), n, eps)
        lj = _first_typical(codebook.v[j - 1], mj * Lj, mj * Lj + Lj, [q, s], (cq, cs), cv, lo, hi)
        event = "xi1" if l0 is None else ("xi2" if lj is None else None)
        found = (l0, lj)
        both = l0 is not None and lj is not None
    else:
        lj = -1
        if l0 is not None:
            sat = codebook.satellites(j, l0)
            u_row = codebook.u[j - 1][l0]
            lo, hi = typical_bounds(t.ref(("Q", "S", f"U{j}", f"V{j}")), n, eps)
            lj = _first_typical(sat, mj * Lj, mj * Lj + Lj, [q, s, u_row], (cq, cs, cu), cv, lo, hi)
        event = "xi1" if l0 is None else ("xi2" if lj is None else None)
        found = (l0, lj)
        both = event is None
    if not both:
        return EncodeResult((1, 1), event, found)
    return EncodeResult((l0 - m0 * L0 + 1, lj - mj * Lj + 1), None, found)


# ------------------------------------------------------------------ channel


def _codewords(codebook: Codebook, user: int, message, indices):
    c = codebook.counts
    j = user
    L0, Lj = c[f"L{j}0"], c[f"L{j}{j}"]
    ui = (message[0] - 1) * L0 + indices[0] - 1
    vi = (message[1] - 1) * Lj + indices[1] - 1
    u = codebook.u[j - 1][ui]
    v = codebook.satellites(j, ui)[vi]
    return u, v


def transmit(channel: ChannelSpec, codebook: Codebook, maps, indices, state_seq, rng,
             messages=((1, 1), (1, 1))):
    """Apply the encoder maps symbol by symbol and draw the memoryless channel outputs."""
    s = np.asarray(state_seq, dtype=np.int64)
    xs = []
    for j in (1, 2):
        u, v = _codewords(codebook, j, messages[j - 1], indices[j - 1])
        xs.append(np.asarray(maps[j - 1].table[u, v, s]))
    law = channel.law
    _, _, _, ny1, ny2 = law.shape
    p = law[s, xs[0], xs[1]].reshape(len(s), -1)
    cdf = np.cumsum(p, axis=1)
    cdf[:, -1] = 1.0
    r = rng.random(len(s))
    flat = (r[:, None] >= cdf[:, :-1]).sum(axis=1)
    return flat // ny2, flat % ny2


# ------------------------------------------------------------------ decoder


def _survivors(rows: np.ndarray, fixed_cols, fixed_cards, k, lo, hi) -> np.ndarray:
    """Indices of ``rows`` typical together with the fixed columns."""
    fixed_key = _cell_keys(fixed_cols, fixed_cards)
    nf = int(np.prod(fixed_cards))
    out = []
    for a in range(0, len(rows), CHUNK):
        block = rows[a:a + CHUNK]
        mask = _rows_typical(fixed_key, nf, block, k, lo, hi)
        out.append(np.flatnonzero(mask) + a)
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def _decode_order(receiver: int):
    j, i = (1, 2) if receiver == 1 else (2, 1)
    return j, i, f"Y{j}"


def jt_decode(receiver: int, codebook: Codebook, y_seq, ref_joint: JointPmf | None = None,
              cfg: SimConfig | None = None, epsilon: float | None = None) -> tuple:
    """Exhaustive joint-typicality decoding of the receiver's own (m_j0, m_jj).

    Candidates are pruned with marginal typicality first (a typical tuple
    has typical sub-tuples), then checked on the full tuple.
    """
    eps = epsilon if epsilon is not None else cfg.epsilon
    t = codebook.tables
    if ref_joint is not None and ref_joint is not t.joint:
        t = SchemeTables(ref_joint, {v.name: v.card for v in ref_joint.vars}, t.p_q, t.gen_u, t.gen_v)
    j, i, yname = _decode_order(receiver)
    y = np.asarray(y_seq, dtype=np.int64)
    q = codebook.q
    n = len(q)
    if len(y) != n:
        raise LengthMismatch(f"output length {len(y)} != block length {n}")
    c = codebook.counts
    cq, cy = t.cards["Q"], t.cards[yname]
    cuj, cui, cvj = t.cards[f"U{j}"], t.cards[f"U{i}"], t.cards[f"V{j}"]
    uj_rows = codebook.u[j - 1].all()
    ui_rows = codebook.u[i - 1].all()

    def bounds(names):
        return typical_bounds(t.ref(names), n, eps)

    lo, hi = bounds(("Q", yname, f"U{j}"))
    s_uj = _survivors(uj_rows, [q, y], (cq, cy), cuj, lo, hi)
    lo, hi = bounds(("Q", yname, f"U{i}"))
    s_ui = _survivors(ui_rows, [q, y], (cq, cy), cui, lo, hi)

    # (centre index, private index, private codeword) candidates that pass the pair test
    pairs = []
    lo_p, hi_p = bounds(("Q", yname, f"U{j}", f"V{j}"))
    if codebook.scheme == 1 and len(s_uj):
        v_rows = codebook.v[j - 1].all()
        lo, hi = bounds(("Q", yname, f"V{j}"))
        s_v = _survivors(v_rows, [q, y], (cq, cy), cvj, lo, hi)
        for a in s_uj:
            ok = _survivors(v_rows[s_v], [q, y, uj_rows[a]], (cq, cy, cuj), cvj, lo_p, hi_p)
            pairs += [(int(a), int(s_v[b]), v_rows[s_v[b]]) for b in ok]
    elif len(s_uj):
        for a in s_uj:
            v_rows = codebook.satellites(j, int(a)).all()
            ok = _survivors(v_rows, [q, y, uj_rows[a]], (cq, cy, cuj), cvj, lo_p, hi_p)
            pairs += [(int(a), int(b), v_rows[b]) for b in ok]

    found = set()
    if pairs and len(s_ui):
        lo, hi = bounds(("Q", yname, f"U{j}", f"V{j}", f"U{i}"))
        cand_ui = ui_rows[s_ui]
        for a, b, v in pairs:
            key = (a // c[f"L{j}0"], b // c[f"L{j}{j}"])
            if key in found:
                continue
            ok = _survivors(cand_ui, [q, y, uj_rows[a], v], (cq, cy, cuj, cvj), cui, lo, hi)
            if ok.size:
                found.add(key)
                if len(found) > 1:
                    raise DecodeAmbiguous(f"pairs {sorted((m0 + 1, m1 + 1) for m0, m1 in found)}")
    if not found:
        raise DecodeEmpty("no jointly typical candidate")
    m0, m1 = found.pop()
    return (m0 + 1, m1 + 1)


# ------------------------------------------------------------------ trials


@dataclass
class SimReport:
    trials: int
    counts: dict
    decode: bool = True

    @property
    def rates(self) -> dict:
        out = {}
        for k, v in self.counts.items():
            denom = self.trials
            if k.endswith("_xi2_given_xi1_ok"):
                denom = self.trials - self.counts[k.replace("xi2_given_xi1_ok", "xi1")]
            out[k] = v / denom if denom else 0.0
        return out

    def rate(self, name: str) -> float:
        return self.rates[name]

    @property
    def overall_error(self) -> float | None:
        return self.rates["overall_error"] if self.decode else None

    @property
    def halfwidth95(self) -> float | None:
        if not self.decode or not self.trials:
            return None if not self.decode else 0.0
        p = self.rates["overall_error"]
        return 1.96 * math.sqrt(p * (1 - p) / self.trials)

    def to_json(self) -> dict:
        return {"trials": self.trials, "counts": dict(self.counts),
                "rates": self.rates, "overall_error": self.overall_error,
                "overall_halfwidth95": self.halfwidth95}


def _empty_counts(decode: bool) -> dict:
    keys = []
    for j in (1, 2):
        keys += [f"enc{j}_xi1", f"enc{j}_xi2", f"enc{j}_xi2_given_xi1_ok", f"enc{j}_fail"]
    if decode:
        for r in (1, 2):
            keys += [f"dec{r}_error", f"dec{r}_empty", f"dec{r}_ambiguous", f"dec{r}_wrong"]
        keys.append("overall_error")
    return {k: 0 for k in keys}


def run_trial(channel: ChannelSpec, dist, cfg: SimConfig, trial: int,
              tables: SchemeTables | None = None) -> dict:
    """Event indicators of one trial (messages fixed to (1,1) for both users)."""
    key = (cfg.seed, trial)
    tables = tables or scheme_tables(channel, dist)
    srng = np.random.default_rng(key + (_S_STREAM,))
    s = srng.choice(len(channel.state_pmf), size=cfg.n, p=channel.state_pmf)
    code = generate_codebooks(channel, dist, cfg, key, tables)
    ev = _empty_counts(cfg.decode)
    chosen = []
    for j in (1, 2):
        res = gp_encode(code, s, (1, 1), cfg, user=j)
        l0, lj = res.found
        ev[f"enc{j}_xi1"] = int(l0 is None)
        if cfg.scheme == 1:
            ev[f"enc{j}_xi2"] = int(lj is None)
        else:
            ev[f"enc{j}_xi2"] = int(l0 is not None and lj is None)
        ev[f"enc{j}_xi2_given_xi1_ok"] = ev[f"enc{j}_xi2"] if l0 is not None else 0
        ev[f"enc{j}_fail"] = int(res.event is not None)
        chosen.append(res.indices)
    if not cfg.decode:
        return ev
    maps = (dist.f1, dist.f2)
    y1, y2 = transmit(channel, code, maps, chosen, s, np.random.default_rng(key + (_NOISE_STREAM,)))
    for r, y in ((1, y1), (2, y2)):
        try:
            hat = jt_decode(r, code, y, None, cfg)
            wrong = hat != (1, 1)
            ev[f"dec{r}_wrong"] = int(wrong)
        except DecodeAmbiguous:
            ev[f"dec{r}_ambiguous"] = 1
        except DecodeEmpty:
            ev[f"dec{r}_empty"] = 1
        ev[f"dec{r}_error"] = int(ev[f"dec{r}_wrong"] or ev[f"dec{r}_ambiguous"] or ev[f"dec{r}_empty"])
    ev["overall_error"] = int(ev["dec1_error"] or ev["dec2_error"])
    return ev


def run_trials(channel: ChannelSpec, dist, cfg: SimConfig) -> SimReport:
    """Aggregate event counts over ``cfg.trials`` independent trials."""
    cfg.check_caps()
    if dist.scheme != cfg.scheme:
        raise SimError(f"distribution is scheme {dist.scheme}, config says {cfg.scheme}")
    counts = _empty_counts(cfg.decode)
    if cfg.trials:
        tables = scheme_tables(channel, dist)
        for t in range(cfg.trials):
            for k, v in run_trial(channel, dist, cfg, t, tables).items():
                counts[k] += v
    return SimReport(cfg.trials, counts, cfg.decode)
