"""Command-line entry point: ``lcsvar {simulate,bounds,oracle,chain,verify}``.

Every run first writes a manifest (subcommand, resolved config, source
version, seed, timestamp, output paths) to ``<output>.manifest.json``, or to
stderr when results go to stdout. ``simulate --config <manifest>`` replays it.

Exit status: 0 ok, 1 invariant check failed, 2 usage or invalid input,
3 exact-enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import subprocess
import sys
from importlib import metadata
from pathlib import Path

from .chain import build_chain, lcs_profile, materialize
from .constants import build_ledger
from .errors import BudgetExceeded, InvariantViolation
from .experiments import DEFAULT_SEED, EXPERIMENTS, ExperimentConfig, summaries_to_csv
from .oracle import (
    distributions_to_csv,
    distributions_to_json,
    exact_lc_distribution,
    exact_mixture_distribution,
    exact_uniform_lc_distribution,
)
from .verify import run_suite
from .words import ModelParams, SeedSpec, sample_y_word, word_from_text, word_to_text

__all__ = ["main", "run", "load_config", "resolve_config", "SIMULATE_DEFAULTS"]

MANIFEST_SCHEMA = 1
SIMULATE_DEFAULTS = {
    "n": [100],
    "m": 2,
    "p": 0.5,
    "reps": 10_000,
    "seed": DEFAULT_SEED,
    "experiment": "variance",
    "k": None,
    "K": None,
    "h": None,
    "nu": None,
    "D": None,
    "epsilon": None,
    "via": "direct",
    "exhaustive": False,
}
# keys that change results; workers and output paths do not
_RESULT_KEYS = tuple(SIMULATE_DEFAULTS)

CSV_HELP = """\
CSV columns: experiment, m, p, n, replicates, seed, estimate, std_error,
ci95_low, ci95_high, check (true/false/empty when no check applies), then
experiment-specific extras in sorted order (bounds, ledger values, windows).
Lines starting with '#' name the subcommand, seed and config hash.
"""


class UsageError(ValueError):
    """Bad input that argparse cannot catch (config file contents, values)."""


# -- config ---------------------------------------------------------------

def _parse_n(value) -> list[int]:
    if isinstance(value, int):
        return [value]
    if isinstance(value, list):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(",") if v.strip()]


def _read_config_file(path: str | Path) -> dict:
    text = Path(path).read_text()
    if not text.strip():
        return {}
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: expected a JSON object")
    # a manifest carries its resolved config under "config"
    if "subcommand" in obj and isinstance(obj.get("config"), dict):
        obj = obj["config"]
    unknown = sorted(set(obj) - set(SIMULATE_DEFAULTS) - {"workers"})
    if unknown:
        raise UsageError(f"{path}: unknown config keys {unknown}")
    return obj


def resolve_config(path: str | Path | None = None, overrides: dict | None = None) -> dict:
    """Defaults, then file values, then non-``None`` overrides."""
    merged = dict(SIMULATE_DEFAULTS)
    if path is not None:
        merged.update(_read_config_file(path))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    merged.pop("workers", None)
    merged["n"] = _parse_n(merged["n"])
    if merged["experiment"] not in EXPERIMENTS:
        raise UsageError(f"experiment must be one of {sorted(EXPERIMENTS)}, got {merged['experiment']!r}")
    # surface ModelParams / ExperimentConfig invariants now, naming the field
    for n in merged["n"]:
        _experiment_config(merged, n)
    return merged


def _experiment_config(cfg: dict, n: int) -> ExperimentConfig:
    try:
        params = ModelParams(cfg["m"], cfg["p"])
        return ExperimentConfig(
            params, n, int(cfg["reps"]), int(cfg["seed"]), k=cfg["k"], nu=cfg["nu"],
            K=cfg["K"], h=cfg["h"], D=cfg["D"], epsilon=cfg["epsilon"],
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid config: {exc}") from None


def load_config(path: str | Path, overrides: dict | None = None) -> ExperimentConfig:
    """The :class:`ExperimentConfig` described by a JSON file (first ``n`` if several)."""
    cfg = resolve_config(path, overrides)
    return _experiment_config(cfg, cfg["n"][0])


def config_hash(cfg: dict) -> str:
    blob = json.dumps({k: cfg[k] for k in _RESULT_KEYS if k in cfg}, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# -- manifest and output ----------------------------------------------------

def source_version() -> str:
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"], cwd=Path(__file__).parent,
            capture_output=True, text=True, timeout=5,
        )
        if rev.returncode == 0 and rev.stdout.strip():
            version += "+g" + rev.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return version


def write_manifest(subcommand: str, config: dict, output: str | None, extra_outputs=()) -> dict:
    manifest = {
        "schema_version": MANIFEST_SCHEMA,
        "subcommand": subcommand,
        "config": config,
        "config_hash": config_hash(config),
        "version": source_version(),
        "master_seed": config.get("seed"),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "outputs": [p for p in (output, *extra_outputs) if p],
    }
    text = json.dumps(manifest, indent=2, sort_keys=True)
    if output:
        Path(f"{output}.manifest.json").write_text(text + "\n")
    else:
        print(text, file=sys.stderr)
    return manifest


def emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _header(subcommand: str, cfg: dict) -> list[str]:
    return [f"subcommand={subcommand}", f"seed={cfg.get('seed')}", f"config_hash={config_hash(cfg)}"]


# -- subcommands -----------------------------------------------------------

def cmd_simulate(args) -> int:
    overrides = {
        "n": args.n, "m": args.m, "p": args.p, "reps": args.reps, "seed": args.seed,
        "experiment": args.experiment, "k": args.k, "K": args.K, "h": args.h, "nu": args.nu,
        "D": args.D, "epsilon": args.epsilon, "via": args.via,
        "exhaustive": True if args.exhaustive else None,
    }
    cfg = resolve_config(args.config, overrides)
    write_manifest("simulate", cfg, args.output)
    estimator = EXPERIMENTS[cfg["experiment"]]
    kwargs = {"workers": args.workers}
    if cfg["experiment"] == "variance":
        kwargs["via"] = cfg["via"]
    if cfg["experiment"] == "matches":
        kwargs["exhaustive"] = bool(cfg["exhaustive"])
    summaries = []
    for n in cfg["n"]:
        try:
            summaries.append(estimator(_experiment_config(cfg, n), **kwargs))
        except BudgetExceeded:
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.out == "csv":
        emit(summaries_to_csv(summaries, _header("simulate", cfg)), args.output)
    else:
        payload = {
            "schema_version": 1, "subcommand": "simulate", "seed": cfg["seed"],
            "config_hash": config_hash(cfg), "results": [s.to_dict() for s in summaries],
        }
        emit(json.dumps(payload, indent=2) + "\n", args.output)
    failed = [s for s in summaries if s.check is False]
    for s in failed:
        print(f"invariant check failed: {s.experiment} at n={s.config['n']}", file=sys.stderr)
    return 1 if failed else 0


def cmd_bounds(args) -> int:
    cfg = {"m": args.m, "p": args.p}
    write_manifest("bounds", cfg, args.output)
    try:
        params = ModelParams(args.m, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ledger = build_ledger(params)
    parts = []
    if args.format in ("json", "both"):
        parts.append(ledger.to_json() + "\n")
    if args.format in ("table", "both"):
        parts.append(ledger.to_table() + "\n")
    emit("".join(parts), args.output)
    return 0


def cmd_oracle(args) -> int:
    ns = _parse_n(args.n)
    cfg = {"m": args.m, "p": args.p, "n": ns, "law": args.law}
    write_manifest("oracle", cfg, args.output)
    try:
        params = ModelParams(args.m, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    compute = {
        "lc": lambda n: exact_lc_distribution(params, n),
        "mixture": lambda n: exact_mixture_distribution(params, n),
        "uniform": lambda n: exact_uniform_lc_distribution(params.m, n),
    }[args.law]
    table = {n: compute(n) for n in ns}
    if args.out == "csv":
        lines = "".join(f"# {line}\n" for line in _header("oracle", cfg))
        emit(lines + distributions_to_csv(table), args.output)
    else:
        emit(distributions_to_json(table, subcommand="oracle", law=args.law, m=args.m, p=args.p,
                                   config_hash=config_hash(cfg)) + "\n", args.output)
    return 0


def cmd_chain(args) -> int:
    cfg = {"m": args.m, "p": args.p, "n": args.n, "seed": args.seed, "stream": args.stream, "y": args.y}
    write_manifest("chain", cfg, args.output)
    try:
        params = ModelParams(args.m, args.p)
        rng = SeedSpec(args.seed, args.stream).rng()
        chain = build_chain(params, args.n, rng)
        y = word_from_text(args.y) if args.y else sample_y_word(params, args.n, rng)
        profile = lcs_profile(chain, y)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.dump == "profile":
        header = "".join(f"# {line}\n" for line in _header("chain", cfg))
        emit(header + profile.to_csv(), args.output)
    else:
        payload = {
            "schema_version": 1, "subcommand": "chain", "config_hash": config_hash(cfg),
            "chain": json.loads(chain.to_json()),
            "Z_n": word_to_text(materialize(chain, args.n)),
            "y": word_to_text(y),
            "profile": profile.values.tolist(),
        }
        emit(json.dumps(payload) + "\n", args.output)
    return 0


def cmd_verify(args) -> int:
    tier = "full" if args.full else "quick"
    write_manifest("verify", {"tier": tier}, args.output)
    lines = []

    def report(result):
        line = f"[{'PASS' if result.passed else 'FAIL'}] {result.name} ({result.seconds:.2f}s): {result.detail}"
        lines.append(line)
        if not args.output:
            print(line, flush=True)

    results = run_suite(tier, report)
    if args.output:
        Path(args.output).write_text("\n".join(lines) + "\n")
    return 0 if all(r.passed for r in results) else 1


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcsvar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_choices=None):
        p.add_argument("--output", help="write results here (manifest goes to <output>.manifest.json)")
        if out_choices:
            p.add_argument("--out", choices=out_choices, default=out_choices[0], help="result format")

    p = sub.add_parser("simulate", help="Monte Carlo experiments", epilog=CSV_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", help="JSON file (or manifest) with keys mirroring these flags")
    p.add_argument("--n", help="word length, or comma-separated list (default 100)")
    p.add_argument("--m", type=int, help="alphabet size (default 2)")
    p.add_argument("--p", type=float, help="extra-letter probability (default 0.5)")
    p.add_argument("--reps", type=int, help="replicates (default 10000)")
    p.add_argument("--seed", type=int, help="master seed (default $LCSVAR_SEED or 20190611)")
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--k", type=int, help="chain length for drift / matches")
    p.add_argument("--K", type=float, help="slope override (default: ledger K)")
    p.add_argument("--h", type=int, help="gap override (default: ledger h(n))")
    p.add_argument("--nu", type=float, help="nu override")
    p.add_argument("--D", type=int, help="compartment length threshold override")
    p.add_argument("--epsilon", type=float, help="unmatched-fraction threshold override")
    p.add_argument("--via", choices=["direct", "chain"], help="variance sampler")
    p.add_argument("--exhaustive", action="store_true", help="matches: also enumerate every minimal pair")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    common(p, ["csv", "json"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="constants ledger")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--format", choices=["json", "table", "both"], default="json")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", help="exact laws at tiny n")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--n", default="1", help="length, or comma-separated list")
    p.add_argument("--law", choices=["lc", "mixture", "uniform"], default="lc")
    common(p, ["json", "csv"])
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("chain", help="dump one insertion chain and its profile")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--y", help="Y-word as base-36 digits (default: sampled)")
    p.add_argument("--dump", choices=["chain", "profile"], default="chain")
    common(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verify", help="invariant suite")
    tier = p.add_mutually_exclusive_group()
    tier.add_argument("--quick", action="store_true", help="small grid, seconds (default)")
    tier.add_argument("--full", action="store_true", help="acceptance-scale grid, minutes")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
