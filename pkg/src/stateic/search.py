"""Sampling of auxiliary distributions and union-region approximation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from . import fm, regions
from .channel import (
    AUX_NAMES,
    ChannelSpec,
    EncoderMap,
    Scheme1Distribution,
    Scheme2Distribution,
    build_joint,
    constant_distribution,
    default_map,
    dist_to_json,
    embed_scheme1_in_scheme2,
)
from .fm import EmptyRegion

CONTAIN_SLACK = 1e-9
MAX_GRID = 10**6


class SearchError(ValueError):
    pass


class GridTooLarge(SearchError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    cards: Mapping[str, int] = field(default_factory=dict)
    samples: int | None = None
    grid_step: float | None = None
    seed: int = 0
    lambdas: int = 11

    def __post_init__(self):
        bad = set(self.cards) - set(AUX_NAMES)
        if bad:
            raise SearchError(f"unknown auxiliary names {sorted(bad)}")
        for k, v in self.cards.items():
            if int(v) < 1:
                raise SearchError(f"cardinality of {k} must be >= 1, got {v}")
        if self.samples is not None and self.grid_step is not None:
            raise SearchError("choose either random samples or a grid step, not both")
        if self.samples is not None and self.samples < 1:
            raise SearchError("sample count must be >= 1")
        if self.grid_step is not None and not 0 < self.grid_step <= 1:
            raise SearchError("grid step must lie in (0, 1]")
        if self.lambdas < 1:
            raise SearchError("lambda sweep needs at least one angle")

    def resolved_cards(self, channel: ChannelSpec) -> dict[str, int]:
        out = {"Q": 1}
        for j in (1, 2):
            out[f"U{j}"] = out[f"V{j}"] = channel.card(f"X{j}")
        out.update({k: int(v) for k, v in self.cards.items()})
        return out

    @property
    def mode(self) -> str:
        return "grid" if self.grid_step is not None else "random"

    def lambda_values(self) -> list[Fraction]:
        if self.lambdas == 1:
            return [Fraction(1, 2)]
        return [Fraction(k, self.lambdas - 1) for k in range(self.lambdas)]

    def to_json(self) -> dict:
        return {"cards": dict(sorted(self.cards.items())), "samples": self.samples,
                "grid_step": self.grid_step, "seed": self.seed, "lambdas": self.lambdas}


# ------------------------------------------------------------------ samplers


def _random_pmf(rng: np.random.Generator, k: int) -> np.ndarray:
    """Mixture over the simplex and its faces.

    Half the draws are Dirichlet(1, ..., 1) on the whole simplex; the rest
    pick a face (a point mass with probability 1/2) and draw Dirichlet(1) on
    it, so boundary distributions such as deterministic state-to-codeword
    maps are reachable.
    """
    if k == 1:
        return np.ones(1)
    r = rng.random()
    if r < 0.5:
        return rng.dirichlet(np.ones(k))
    p = np.zeros(k)
    if r < 0.75:
        p[rng.integers(k)] = 1.0
        return p
    m = int(rng.integers(1, k + 1))
    support = rng.choice(k, m, replace=False)
    p[support] = rng.dirichlet(np.ones(m))
    return p


def _random_table(rng, shape) -> np.ndarray:
    out = np.empty(shape)
    for idx in np.ndindex(*shape[:-1]):
        out[idx] = _random_pmf(rng, shape[-1])
    return out


def _random_map(rng, cu, cv, cs, cx) -> EncoderMap:
    return EncoderMap(rng.integers(0, cx, size=(cu, cv, cs)), cx)


def random_distribution(channel: ChannelSpec, scheme: int, cards: Mapping[str, int],
                        rng: np.random.Generator):
    s = channel.card("S")
    q = cards["Q"]
    p_q = _random_pmf(rng, q)
    tabs, maps = [], []
    for j in (1, 2):
        cu, cv, cx = cards[f"U{j}"], cards[f"V{j}"], channel.card(f"X{j}")
        pu = _random_table(rng, (q, s, cu))
        pv = _random_table(rng, (q, s, cv) if scheme == 1 else (q, s, cu, cv))
        tabs += [pu, pv]
        maps.append(_random_map(rng, cu, cv, s, cx))
    cls = Scheme1Distribution if scheme == 1 else Scheme2Distribution
    return cls(p_q, *tabs, *maps)


def _grid_points(step: float) -> list[float]:
    n = int(round(1.0 / step))
    if abs(n * step - 1.0) > 1e-9:
        pts = list(np.arange(0.0, 1.0, step)) + [1.0]
    else:
        pts = [k / n for k in range(n + 1)]
    return [float(p) for p in pts]


def _grid_distributions(channel: ChannelSpec, scheme: int, cards, step) -> Iterator:
    """Every Bernoulli parameter on the grid; only binary (or unary) auxiliaries."""
    wide = [k for k, v in cards.items() if v > 2]
    if wide:
        raise SearchError(f"grid sampling needs binary auxiliaries; {wide} are larger")
    s, q = channel.card("S"), cards["Q"]
    slots = []  # (name, index) for each free Bernoulli parameter
    if q == 2:
        slots.append(("p_q", ()))
    for j in (1, 2):
        if cards[f"U{j}"] == 2:
            slots += [(f"p_u{j}", (a, b)) for a in range(q) for b in range(s)]
        if cards[f"V{j}"] == 2:
            if scheme == 1:
                slots += [(f"p_v{j}", (a, b)) for a in range(q) for b in range(s)]
            else:
                slots += [(f"p_v{j}", (a, b, u)) for a in range(q) for b in range(s)
                          for u in range(cards[f"U{j}"])]
    pts = _grid_points(step)
    total = len(pts) ** len(slots)
    if total > MAX_GRID:
        raise GridTooLarge(f"grid has {len(pts)}^{len(slots)} = {total} points (cap {MAX_GRID})")
    maps = [default_map(cards[f"U{j}"], cards[f"V{j}"], s, channel.card(f"X{j}"), scheme) for j in (1, 2)]

    def blank(*shape):
        a = np.zeros(shape)
        a[..., 0] = 1.0
        return a

    for combo in itertools.product(pts, repeat=len(slots)):
        arrs = {"p_q": blank(q)}
        for j in (1, 2):
            cu, cv = cards[f"U{j}"], cards[f"V{j}"]
            arrs[f"p_u{j}"] = blank(q, s, cu)
            arrs[f"p_v{j}"] = blank(q, s, cv) if scheme == 1 else blank(q, s, cu, cv)
        for (name, idx), p in zip(slots, combo):
            arrs[name][idx] = (1.0 - p, p)
        cls = Scheme1Distribution if scheme == 1 else Scheme2Distribution
        yield cls(arrs["p_q"], arrs["p_u1"], arrs["p_v1"], arrs["p_u2"], arrs["p_v2"], *maps)


def sample_distributions(channel: ChannelSpec, scheme: int, cfg: SearchConfig) -> Iterator[tuple]:
    """``(dist_id, distribution)`` pairs; id 0 is always the all-constant distribution.

    Random draws use a generator seeded by ``(seed, id)``, so the first ``k``
    samples of a run do not depend on the total count.
    """
    cards = cfg.resolved_cards(channel)
    yield 0, constant_distribution(channel, scheme, cards)
    if cfg.mode == "grid":
        for i, d in enumerate(_grid_distributions(channel, scheme, cards, cfg.grid_step), start=1):
            yield i, d
        return
    count = cfg.samples if cfg.samples is not None else 200
    for i in range(1, count):
        rng = np.random.default_rng([cfg.seed, scheme, i])
        yield i, random_distribution(channel, scheme, cards, rng)


# ------------------------------------------------------------------ region approximation


@dataclass
class RegionApproximation:
    """Support-function optima, their convex hull and the per-distribution polygons.

    ``points`` holds ``(lambda, R1, R2, dist_id)`` with exact rationals;
    ``raw_union`` holds ``(dist_id, vertices)``.
    """

    points: list
    hull: list
    raw_union: list
    evaluated: int = 0
    empty: int = 0
    certificates: dict = field(default_factory=dict)

    @property
    def all_empty(self) -> bool:
        return not self.raw_union


def distribution_polygon(channel: ChannelSpec, dist) -> tuple:
    """``(polytope, vertices)``; vertices is ``None`` for an empty region."""
    theorem = dist.scheme
    poly = regions.rate_polytope(build_joint(channel, dist), theorem)
    if poly.is_empty:
        return poly, None
    try:
        return poly, regions.pair_polygon(poly, theorem)
    except EmptyRegion:
        return poly, None


def union_region(channel: ChannelSpec, scheme: int, cfg: SearchConfig, certify: bool = True,
                 stream=None) -> RegionApproximation:
    lams = cfg.lambda_values()
    best: list = [None] * len(lams)
    polytopes = {}
    raw, evaluated, empty = [], 0, 0
    for dist_id, dist in (stream if stream is not None else sample_distributions(channel, scheme, cfg)):
        evaluated += 1
        poly, verts = distribution_polygon(channel, dist)
        if verts is None:
            empty += 1
            continue
        raw.append((dist_id, verts))
        for k, lam in enumerate(lams):
            val, v = fm.max_linear(verts, (lam, 1 - lam))
            if best[k] is None or val > best[k][0]:
                best[k] = (val, v, dist_id)
                polytopes[dist_id] = poly
    points = [(lam, b[1][0], b[1][1], b[2]) for lam, b in zip(lams, best) if b is not None]
    hull = fm.convex_hull([v for _, vs in raw for v in vs]) if raw else []
    certs = {}
    if certify:
        for lam, r1, r2, dist_id in points:
            t = regions.lift_pair(polytopes[dist_id], r1, r2)
            certs[(lam, dist_id)] = t is not None and regions.membership(
                polytopes[dist_id], [float(x) for x in t])
    return RegionApproximation(points, hull, raw, evaluated, empty, certs)


# ------------------------------------------------------------------ inclusion check


def _violation(system: fm.LinearSystem, point) -> float:
    """Largest sup-norm-scaled excess of ``point`` over the rows of a 2-D system."""
    worst = 0
    for r in system.rows:
        scale = max(abs(c) for c in r.coeffs) if not r.is_zero() else 1
        excess = (r.value(point) - r.rhs) / scale
        if excess > worst:
            worst = excess
    return float(worst)


def hull_violation(outer: list, points) -> float:
    """Largest distance (per edge, sup-norm scaled) of ``points`` outside a convex polygon."""
    if not points:
        return 0.0
    if not outer:
        return max(float(max(abs(x), abs(y))) for x, y in points)
    return max(fm.polygon_violation(outer, p) for p in points)


def compare_regions(channel: ChannelSpec, cfg: SearchConfig, slack: float = CONTAIN_SLACK) -> dict:
    """Per-distribution and union containment of scheme-1 regions in scheme-2 regions."""
    pairs, witnesses = [], {}
    v1_all, v2_all = [], []
    for dist_id, d1 in sample_distributions(channel, 1, cfg):
        d2 = embed_scheme1_in_scheme2(d1)
        p1, verts1 = distribution_polygon(channel, d1)
        p2, verts2 = distribution_polygon(channel, d2)
        entry = {"id": dist_id, "scheme1_empty": verts1 is None, "scheme2_empty": verts2 is None}
        if verts1 is None:
            viol = 0.0
        elif verts2 is None:
            viol = max(float(max(x, y)) for x, y in verts1)
        else:
            sys2 = regions.pair_plan(2).instantiate(p2.snapped_rhs())
            viol = max(_violation(sys2, v) for v in verts1)
        entry["contained"] = viol <= slack
        entry["max_violation_bits"] = viol
        pairs.append(entry)
        if not entry["contained"]:
            witnesses[str(dist_id)] = dist_to_json(d1)
        v1_all += verts1 or []
        v2_all += verts2 or []
    hull1 = fm.convex_hull(v1_all) if v1_all else []
    hull2 = fm.convex_hull(v2_all) if v2_all else []
    union_viol = hull_violation(hull2, hull1)
    return {
        "pairs": pairs,
        "union_contained": union_viol <= slack,
        "union_max_violation_bits": union_viol,
        "counterexamples": [p["id"] for p in pairs if not p["contained"]],
        "counterexample_distributions": witnesses,
        "max_violation_bits": max((p["max_violation_bits"] for p in pairs), default=0.0),
        "hull1": [[float(x), float(y)] for x, y in hull1],
        "hull2": [[float(x), float(y)] for x, y in hull2],
    }
