"""Command-line front end: info, region, project, compare, simulate, rerun.

Every artifact starts with (or embeds) a run manifest holding the command,
input paths and digests, the resolved configuration, the tool version and
the seed.  ``rerun`` feeds a manifest back through the same code path, so
the artifact is reproduced byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field

from . import __version__, fm, regions, search, simcode
from .channel import SpecError, build_joint, channel_from_json, dist_from_json, load_json
from .prob import PmfError

EXIT_OK, EXIT_INPUT, EXIT_EMPTY, EXIT_CAP = 0, 2, 3, 4
MANIFEST_PREFIX = "# manifest: "


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_INPUT):
        super().__init__(msg)
        self.code = code


@dataclass
class RunManifest:
    command: str
    inputs: dict
    config: dict
    version: str = __version__
    seed: int | None = None
    digests: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "digests": self.digests,
                "config": self.config, "version": self.version, "seed": self.seed}

    @classmethod
    def from_json(cls, obj) -> "RunManifest":
        try:
            return cls(obj["command"], dict(obj["inputs"]), dict(obj["config"]),
                       obj.get("version", __version__), obj.get("seed"), dict(obj.get("digests", {})))
        except (KeyError, TypeError) as exc:
            raise CliError(f"malformed manifest: {exc}") from exc

    def line(self) -> str:
        return MANIFEST_PREFIX + _dumps(self.to_json())


def _dumps(obj, indent=None) -> str:
    return json.dumps(obj, sort_keys=True, indent=indent, allow_nan=False)


def _digest(path: str) -> str:
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from exc


def _manifest(command: str, inputs: dict, config: dict, seed=None) -> RunManifest:
    digests = {k: _digest(p) for k, p in inputs.items()}
    return RunManifest(command, inputs, config, seed=seed, digests=digests)


def _num(x) -> str:
    return repr(float(x))


# ------------------------------------------------------------------ loaders


def _load_channel(path: str):
    try:
        return channel_from_json(load_json(path))
    except SpecError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_dist(path: str, channel, scheme):
    try:
        return dist_from_json(load_json(path), channel, scheme)
    except SpecError as exc:
        raise CliError(f"{path}: {exc}") from exc


def parse_cards(text: str | None) -> dict:
    """``Q=2,U1=3`` -> ``{"Q": 2, "U1": 3}``."""
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or name not in search.AUX_NAMES:
            raise CliError(f"--card: cannot read {part!r} (expected NAME=N with NAME in {search.AUX_NAMES})")
        try:
            out[name] = int(value)
        except ValueError:
            raise CliError(f"--card: {name} needs an integer, got {value!r}") from None
    return out


def _search_config(cfg: dict) -> search.SearchConfig:
    try:
        return search.SearchConfig(cards=cfg.get("cards", {}), samples=cfg.get("samples"),
                                   grid_step=cfg.get("grid_step"), seed=cfg.get("seed", 0),
                                   lambdas=cfg.get("lambdas", 11))
    except search.SearchError as exc:
        raise CliError(str(exc)) from exc


# ------------------------------------------------------------------ commands
# Each ``run_*`` maps a manifest to (artifact text, exit code).


def run_info(m: RunManifest) -> tuple[str, int]:
    channel = _load_channel(m.inputs["channel"])
    scheme = m.config["scheme"]
    dist = _load_dist(m.inputs["dist"], channel, scheme)
    if dist.scheme != scheme:
        raise CliError(f"distribution file declares scheme {dist.scheme}, --scheme is {scheme}")
    joint = build_joint(channel, dist)
    lines = [m.line(), "tag\trhs_bits\tterms"]
    for c in regions.theorem_constraints(joint, scheme):
        terms = " ".join(f"{'+' if s > 0 else '-'}{sym}={bits:.6f}" for s, sym, bits in c.terms)
        lines.append(f"{c.tag}\t{float(c.rhs):.6f}\t{terms}")
    return "\n".join(lines) + "\n", EXIT_OK


def run_region(m: RunManifest) -> tuple[str, int]:
    channel = _load_channel(m.inputs["channel"])
    cfg = _search_config(m.config["search"])
    try:
        approx = search.union_region(channel, m.config["scheme"], cfg)
    except search.SearchError as exc:
        raise CliError(str(exc)) from exc
    lines = [m.line(), "lambda,R1,R2,dist_id"]
    lines += [f"{_num(lam)},{_num(r1)},{_num(r2)},{i}" for lam, r1, r2, i in approx.points]
    lines.append("hull,R1,R2")
    lines += [f"hull,{_num(x)},{_num(y)}" for x, y in approx.hull]
    lines.append(f"# evaluated {approx.evaluated} empty {approx.empty}")
    return "\n".join(lines) + "\n", EXIT_EMPTY if approx.all_empty else EXIT_OK


def run_project(m: RunManifest) -> tuple[str, int]:
    path = m.inputs["constraints"]
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from exc
    try:
        poly = regions.parse_constraints(text)
    except fm.ParseError as exc:
        raise CliError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc
    try:
        out = regions.project_to_pairs(poly)
    except fm.EmptyRegion as exc:
        return f"{m.line()}\n# empty: {exc}\n", EXIT_EMPTY
    return f"{m.line()}\n{fm.format_system(out).rstrip()}\n", EXIT_OK


def run_compare(m: RunManifest) -> tuple[str, int]:
    channel = _load_channel(m.inputs["channel"])
    cfg = _search_config(m.config["search"])
    try:
        report = search.compare_regions(channel, cfg)
    except search.SearchError as exc:
        raise CliError(str(exc)) from exc
    return _dumps({"manifest": m.to_json(), "report": report}, indent=2) + "\n", EXIT_OK


def _sim_inputs(path: str) -> tuple[dict, dict]:
    """Input files and the simulation settings of a ``sim.json``."""
    try:
        spec = load_json(path)
    except SpecError as exc:
        raise CliError(str(exc)) from exc
    if not isinstance(spec, dict):
        raise CliError(f"{path}: simulation spec must be a JSON object")
    base = os.path.dirname(path)
    inputs = {"sim": path}
    for key in ("channel", "dist"):
        if not isinstance(spec.get(key), str):
            raise CliError(f"{path}: field {key!r} must name a JSON file")
        inputs[key] = os.path.join(base, spec[key])
    settings = {k: v for k, v in spec.items() if k not in ("channel", "dist")}
    return inputs, settings


def _sim_config(settings: dict, seed=None) -> simcode.SimConfig:
    known = {"scheme", "n", "epsilon", "rates", "bin_rates", "trials", "seed", "decode"}
    extra = set(settings) - known
    if extra:
        raise CliError(f"unknown simulation fields {sorted(extra)}")
    if "n" not in settings or "epsilon" not in settings:
        raise CliError("simulation spec needs 'n' and 'epsilon'")
    kw = dict(settings)
    if seed is not None:
        kw["seed"] = seed
    try:
        return simcode.SimConfig(**kw)
    except (simcode.SimError, TypeError, ValueError) as exc:
        raise CliError(f"simulation spec: {exc}") from exc


def run_simulate(m: RunManifest) -> tuple[str, int]:
    channel = _load_channel(m.inputs["channel"])
    cfg = _sim_config(m.config["sim"])
    dist = _load_dist(m.inputs["dist"], channel, cfg.scheme)
    try:
        report = simcode.run_trials(channel, dist, cfg)
    except simcode.CapExceeded:
        raise
    except simcode.SimError as exc:
        raise CliError(str(exc)) from exc
    body = {"manifest": m.to_json(), "config": cfg.to_json(), "report": report.to_json()}
    return _dumps(body, indent=2) + "\n", EXIT_OK


RUNNERS = {"info": run_info, "region": run_region, "project": run_project,
           "compare": run_compare, "simulate": run_simulate}


# ------------------------------------------------------------------ manifests from flags


def _search_flags(args) -> dict:
    return _search_dict(args.seed, args.samples, args.grid_step, args.lambdas, parse_cards(args.card))


def manifest_from_args(args) -> RunManifest:
    if args.command == "info":
        return _manifest("info", {"channel": args.channel, "dist": args.dist},
                         {"scheme": args.scheme})
    if args.command == "region":
        cfg = _search_flags(args)
        return _manifest("region", {"channel": args.channel},
                         {"scheme": args.scheme, "search": cfg}, seed=cfg["seed"])
    if args.command == "project":
        return _manifest("project", {"constraints": args.constraints}, {})
    if args.command == "compare":
        cfg = _search_flags(args)
        return _manifest("compare", {"channel": args.channel}, {"search": cfg}, seed=cfg["seed"])
    if args.command == "simulate":
        inputs, settings = _sim_inputs(args.sim)
        cfg = _sim_config(settings, args.seed).to_json()
        return _manifest("simulate", inputs, {"sim": cfg}, seed=cfg["seed"])
    raise CliError(f"unknown command {args.command}")


def _search_dict(seed=0, samples=None, grid_step=None, lambdas=11, cards=None) -> dict:
    return search.SearchConfig.to_json(_search_config({
        "cards": cards or {}, "samples": samples, "grid_step": grid_step, "seed": seed, "lambdas": lambdas}))


# Library entry points: same artifacts as the subcommands, returned as (text, exit code).

def cmd_info(channel: str, dist: str, scheme: int = 1) -> tuple[str, int]:
    return execute(_manifest("info", {"channel": channel, "dist": dist}, {"scheme": scheme}))


def cmd_region(channel: str, scheme: int = 1, **search_flags) -> tuple[str, int]:
    cfg = _search_dict(**search_flags)
    return execute(_manifest("region", {"channel": channel}, {"scheme": scheme, "search": cfg}, seed=cfg["seed"]))


def cmd_project(constraints: str) -> tuple[str, int]:
    return execute(_manifest("project", {"constraints": constraints}, {}))


def cmd_compare(channel: str, **search_flags) -> tuple[str, int]:
    cfg = _search_dict(**search_flags)
    return execute(_manifest("compare", {"channel": channel}, {"search": cfg}, seed=cfg["seed"]))


def cmd_simulate(sim: str, seed: int | None = None) -> tuple[str, int]:
    inputs, settings = _sim_inputs(sim)
    cfg = _sim_config(settings, seed).to_json()
    return execute(_manifest("simulate", inputs, {"sim": cfg}, seed=cfg["seed"]))


def read_manifest(path: str) -> RunManifest:
    """Manifest embedded in an artifact (JSON field or leading comment line)."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from exc
    first = text.split("\n", 1)[0]
    try:
        if first.startswith(MANIFEST_PREFIX):
            obj = json.loads(first[len(MANIFEST_PREFIX):])
        else:
            doc = json.loads(text)
            obj = doc.get("manifest", doc) if isinstance(doc, dict) else None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: no readable manifest ({exc.msg})") from exc
    return RunManifest.from_json(obj)


def execute(m: RunManifest, check_digests: bool = False) -> tuple[str, int]:
    if m.command not in RUNNERS:
        raise CliError(f"manifest names unknown command {m.command!r}")
    if check_digests:
        for k, p in m.inputs.items():
            if k in m.digests and _digest(p) != m.digests[k]:
                raise CliError(f"input {p} changed since the manifest was written")
    try:
        return RUNNERS[m.command](m)
    except PmfError as exc:  # e.g. distribution and channel alphabets disagree
        raise CliError(str(exc)) from exc


# ------------------------------------------------------------------ argparse


def _add_search(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--grid-step", type=float, default=None)
    p.add_argument("--lambdas", type=int, default=11)
    p.add_argument("--card", default=None, help="auxiliary cardinalities, e.g. Q=1,U1=2,V1=4")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stateic", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"stateic {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="constraint right-hand sides of one distribution")
    p.add_argument("channel")
    p.add_argument("dist")
    p.add_argument("--scheme", type=int, choices=(1, 2), default=1)

    p = sub.add_parser("region", help="inner-bound union region as CSV")
    p.add_argument("channel")
    p.add_argument("--scheme", type=int, choices=(1, 2), default=1)
    _add_search(p)

    p = sub.add_parser("project", help="project a sub-rate constraint file to (R1, R2)")
    p.add_argument("constraints")

    p = sub.add_parser("compare", help="check containment of scheme-1 regions in scheme-2 regions")
    p.add_argument("channel")
    _add_search(p)

    p = sub.add_parser("simulate", help="Monte Carlo coding run described by a JSON spec")
    p.add_argument("sim")
    p.add_argument("--seed", type=int, default=None, help="override the spec's seed")

    p = sub.add_parser("rerun", help="reproduce an artifact from its embedded manifest")
    p.add_argument("artifact")

    for p in sub.choices.values():
        p.add_argument("--out", default=None, help="output path (default: stdout)")
    return ap


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "rerun":
            text, code = execute(read_manifest(args.artifact), check_digests=True)
        else:
            text, code = execute(manifest_from_args(args))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except simcode.CapExceeded as exc:
        print(f"error: {exc}; exponent {exc.exponent:.4f}", file=sys.stderr)
        return EXIT_CAP
    _write(text, args.out)
    if code == EXIT_EMPTY:
        print("error: empty result", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
