"""Command-line driver: ``zetalab {eval,ladder,functional,scan,chain}``.

Output is CSV with a ``#``-prefixed JSON header carrying the run
configuration, or a single JSON document with ``--format json``.  Floats are
written with ``repr`` so reruns are byte-identical; only the header's
timestamp changes.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .constants import PRECISION_TARGET
from .errors import DomainError, NumericalError
from .store import CACHE_ENV, CheckpointStore, use_store

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict[str, Any]
    precision: float = PRECISION_TARGET
    mode: str = "asymptotic"
    cache: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    config_file: Optional[str] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.precision > 0:
            raise UsageError("--precision must be positive")
        if self.mode not in ("asymptotic", "quadrature"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")

    def echo(self) -> dict[str, Any]:
        """Everything that determines the data rows; the worker count is excluded on purpose."""
        d = asdict(self)
        d.pop("workers")
        d.pop("extra")
        return d


# ----------------------------------------------------------------------------
# parsing helpers


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"need finite numbers: {text!r}")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return v


def _number(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def read_config_file(path: str) -> dict[str, str]:
    """Plain ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--precision", type=_number, default=PRECISION_TARGET,
                   help="absolute tolerance for scalar evaluations")
    g.add_argument("--mode", choices=("asymptotic", "quadrature"), default="asymptotic",
                   help="how the ladder obtains J(T)")
    g.add_argument("--cache", default=os.environ.get(CACHE_ENV),
                   help=f"checkpoint store file (default ${CACHE_ENV})")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--workers", type=_positive_int, default=1)
    g.add_argument("--config", dest="config_file", help="key=value file supplying option defaults")

    parser = argparse.ArgumentParser(prog="zetalab", description="zeta moment and ladder experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate zeta, theta, Z, S or S_1 at points")
    p.add_argument("--fn", choices=("zeta", "theta", "hardy-z", "s", "s1"), required=True)
    p.add_argument("--t", type=_float_list, required=True, help="comma-separated t values")
    p.add_argument("--sigma", type=_number, default=0.5)

    p = sub.add_parser("ladder", parents=[common], help="reverse iterations and partition diagnostics")
    p.add_argument("--T", type=_number, required=True)
    p.add_argument("--k", type=_nonneg_int, default=1)
    p.add_argument("--segments", action="store_true",
                   help="integrate each segment (always on in quadrature mode)")

    functional_args = argparse.ArgumentParser(add_help=False)
    functional_args.add_argument("--l", type=_positive_int, default=1)
    functional_args.add_argument("--sigma", type=_number, default=1.0)
    functional_args.add_argument("--backend", choices=("real", "synthetic"), default="real")
    functional_args.add_argument("--family", default="unit:2,mobius:2",
                                 help="series family, e.g. unit:2,mobius:2 or @coeffs.txt")
    functional_args.add_argument("--cbar", type=_number, default=None,
                                 help="Selberg constant; estimated from --cbar-grid when omitted")
    functional_args.add_argument("--cbar-grid", type=_float_list, default=[500.0, 1000.0])

    p = sub.add_parser("functional", parents=[common, functional_args], help="a limit functional over a tau grid")
    p.add_argument("--kind", choices=("prod3", "lin3", "dprod", "divisor"), required=True)
    p.add_argument("--x", type=_float_list, default=[1.0])
    tau = p.add_mutually_exclusive_group()
    tau.add_argument("--tau", type=_number, default=None)
    tau.add_argument("--tau-grid", type=_float_list, default=None)

    p = sub.add_parser("scan", parents=[common, functional_args], help="Fermat-rational scan")
    p.add_argument("--kind", choices=("prod3", "lin3", "dprod", "divisor"), default="prod3")
    p.add_argument("--tau", type=_number, default=1e3)
    p.add_argument("--x-max", type=_positive_int, default=10)
    p.add_argument("--y-max", type=_positive_int, default=10)
    p.add_argument("--z-max", type=_positive_int, default=10)
    p.add_argument("--n-min", type=_positive_int, default=3)
    p.add_argument("--n-max", type=_positive_int, default=5)
    p.set_defaults(backend="synthetic")

    p = sub.add_parser("chain", parents=[common, functional_args], help="chained quantities and their ratios")
    p.add_argument("--x", type=_number, default=1.0)
    p.add_argument("--tau-grid", type=_float_list, default=[1e3])
    return parser


_GLOBALS = ("precision", "mode", "cache", "format", "workers", "config_file")


def _apply_config_file(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    """Install values from ``--config`` as subcommand defaults before the real parse."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", dest="config_file")
    pre.add_argument("command", nargs="?")
    known, _ = pre.parse_known_args(argv)
    if not known.config_file:
        return
    subparsers = parser._subparsers._group_actions[0].choices  # type: ignore[union-attr]
    if known.command not in subparsers:
        return  # the real parse reports the bad command
    try:
        values = read_config_file(known.config_file)
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")
    except UsageError as exc:
        parser.error(str(exc))
    sub = subparsers[known.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in actions or key in ("help", "config_file"):
            parser.error(f"unknown config key {key!r}")
        action = actions[key]
        try:
            defaults[key] = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            parser.error(f"config key {key}: {exc}")
        if action.choices is not None and defaults[key] not in action.choices:
            parser.error(f"config key {key}: {raw!r} is not one of {sorted(action.choices)}")
        # a value from the file satisfies a required flag; the command line still wins
        action.required = False
    sub.set_defaults(**defaults)


def parse_args(argv: Sequence[str]) -> RunConfig:
    parser = build_parser()
    _apply_config_file(parser, argv)
    args = parser.parse_args(argv)
    ns = vars(args)
    params = {k: v for k, v in ns.items() if k not in _GLOBALS and k != "command"}
    try:
        return RunConfig(
            command=args.command,
            params=params,
            precision=args.precision,
            mode=args.mode,
            cache=args.cache,
            format=args.format,
            workers=args.workers,
            config_file=args.config_file,
        )
    except UsageError as exc:
        parser.error(str(exc))
        raise  # unreachable


# ----------------------------------------------------------------------------
# workers


def _with_store(path: Optional[str], fn: Callable, *args):
    if path is None:
        return fn(*args)
    with use_store(CheckpointStore(path)):
        return fn(*args)


def _task(payload):
    path, fn, args = payload
    return _with_store(path, fn, *args)


def ordered_map(cfg: RunConfig, fn: Callable, arglists: Iterable[tuple]) -> list:
    """fn over the argument tuples, results in input order for any worker count."""
    items = [(cfg.cache, fn, tuple(a)) for a in arglists]
    if cfg.workers <= 1 or len(items) <= 1:
        return [_task(item) for item in items]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_task, items))


# ----------------------------------------------------------------------------
# commands


def _ladder_cfg(cfg: RunConfig):
    from .ladder import LadderConfig

    return LadderConfig(mode=cfg.mode)


def _eval_point(fn: str, sigma: float, t: float, precision: float) -> dict[str, Any]:
    from . import analytic

    row: dict[str, Any] = {"fn": fn, "sigma": sigma if fn == "zeta" else 0.5, "t": t}
    if fn == "zeta":
        v = analytic.zeta_em(sigma, t, precision)
        row.update(re=v.real, im=v.imag)
        return row
    if fn == "theta":
        v = float(analytic.rs_theta(t))
    elif fn == "hardy-z":
        v = float(analytic.hardy_z(t))
    elif fn == "s":
        v = analytic.s_of_t(t)
    else:
        v = analytic.s1_of_t(t)
    row.update(re=v, im=0.0)
    return row


def cmd_eval(cfg: RunConfig):
    p = cfg.params
    rows = ordered_map(cfg, _eval_point, [(p["fn"], p["sigma"], t, cfg.precision) for t in p["t"]])
    return rows, {"points": len(rows)}


def cmd_ladder(cfg: RunConfig):
    from .ladder import partition_report, reverse_iterates

    p = cfg.params
    lcfg = _ladder_cfg(cfg)
    segments = p["segments"] or cfg.mode == "quadrature"
    seq = reverse_iterates(p["T"], p["k"], lcfg, segments=segments and p["k"] > 0)
    rep = partition_report(seq)
    rows = []
    for r, T_r in enumerate(seq.iterates):
        row: dict[str, Any] = {"r": r, "T": T_r, "increment": None, "increment_ratio": None,
                               "segment": None, "segment_over_leading": None, "segment_ratio": None}
        if r >= 1:
            row["increment"] = seq.increments[r - 1]
            if seq.segment_integrals is not None:
                row["segment"] = seq.segment_integrals[r - 1]
                row["segment_over_leading"] = rep.segment_over_leading[r - 1]
        if r >= 2:
            row["increment_ratio"] = rep.increment_ratios[r - 2]
            if rep.segment_ratios is not None:
                row["segment_ratio"] = rep.segment_ratios[r - 2]
        rows.append(row)
    summary = {
        "increasing": all(b > a for a, b in zip(seq.iterates, seq.iterates[1:])),
        "telescoping_sum": rep.telescoping_sum,
        "whole_integral": rep.whole_integral,
        "error_budget": rep.error_budget,
        "telescoping_ok": rep.telescoping_ok,
    }
    return rows, summary


def _cbar(cfg: RunConfig) -> Optional[float]:
    p = cfg.params
    if p.get("cbar") is not None:
        return p["cbar"]
    if p.get("kind") in ("dprod", "divisor"):
        return None
    from .functionals import estimate_cbar

    return _with_store(cfg.cache, estimate_cbar, p["l"], p["cbar_grid"]).adopted


def _functional_point(kind: str, x: float, tau: float, p: dict, mode: str, cbar: Optional[float]):
    from .dirichlet import parse_family
    from .functionals import ScanSettings
    from .ladder import LadderConfig

    fam = parse_family(p["family"]) if kind == "dprod" else None
    settings = ScanSettings(kind, tau, p["backend"], p["l"], p["sigma"], cbar, fam, LadderConfig(mode=mode))
    return settings.evaluate(x).as_row()


def cmd_functional(cfg: RunConfig):
    p = cfg.params
    taus = p["tau_grid"] or [p["tau"] if p["tau"] is not None else 1e3]
    cbar = _cbar(cfg)
    tasks = [(p["kind"], x, tau, p, cfg.mode, cbar) for x in p["x"] for tau in taus]
    rows = ordered_map(cfg, _functional_point, tasks)
    summary = {"cbar": cbar, "max_abs_deviation": max(abs(r["deviation"]) for r in rows)}
    return rows, summary


def _scan_chunk(x: int, bounds, settings):
    from .functionals import _scan_x

    out = []
    for row in _scan_x(x, bounds, settings):
        exact = float(row.exact)
        out.append({
            "x": row.x, "y": row.y, "z": row.z, "n": row.n,
            "exact": f"{row.exact.numerator}/{row.exact.denominator}",
            "exact_float": exact,
            "estimate": row.estimate,
            "estimate_minus_1": row.estimate_gap,
            "exact_minus_1": float(row.exact_gap),
            "_is_one": row.exact == 1,
        })
    return out


def cmd_scan(cfg: RunConfig):
    from .dirichlet import parse_family
    from .functionals import ScanBounds, ScanSettings

    p = cfg.params
    bounds = ScanBounds(p["x_max"], p["y_max"], p["z_max"], p["n_min"], p["n_max"])
    fam = parse_family(p["family"]) if p["kind"] == "dprod" else None
    settings = ScanSettings(p["kind"], p["tau"], p["backend"], p["l"], p["sigma"], _cbar(cfg), fam, _ladder_cfg(cfg))
    chunks = ordered_map(cfg, _scan_chunk, [(x, bounds, settings) for x in range(1, bounds.x_max + 1)])
    rows = [r for chunk in chunks for r in chunk]
    equalities = sum(r.pop("_is_one") for r in rows)
    worst = max(abs(r["estimate"] - r["exact_float"]) / r["exact_float"] for r in rows)
    summary = {
        "tuples": len(rows),
        "fermat_equalities": equalities,
        "predicate_held_everywhere": equalities == 0,
        "max_relative_estimate_error": worst,
    }
    return rows, summary


def _chain_point(x, tau, p, mode, cbar):
    from .dirichlet import parse_family
    from .functionals import chain_compare
    from .ladder import LadderConfig

    c = chain_compare(x, p["l"], p["sigma"], parse_family(p["family"]), tau, LadderConfig(mode=mode),
                      p["backend"], cbar=cbar)
    row = {"x": x, "tau": tau, "prod3": c.prod3, "dprod": c.dprod, "divisor": c.divisor}
    row.update(c.ratios)
    return row


def cmd_chain(cfg: RunConfig):
    from .dirichlet import parse_family

    p = cfg.params
    parse_family(p["family"])  # validate before any heavy work
    cbar = _cbar(cfg)
    rows = ordered_map(cfg, _chain_point, [(p["x"], tau, p, cfg.mode, cbar) for tau in p["tau_grid"]])
    worst = max(max(abs(r[k] - 1) for k in ("prod3/dprod", "prod3/divisor", "dprod/divisor")) for r in rows)
    return rows, {"cbar": cbar, "max_ratio_deviation": worst}


COMMANDS = {
    "eval": cmd_eval,
    "ladder": cmd_ladder,
    "functional": cmd_functional,
    "scan": cmd_scan,
    "chain": cmd_chain,
}


# ----------------------------------------------------------------------------
# output


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(cfg: RunConfig, rows: list[dict], summary: dict, timestamp: str) -> str:
    config = {**cfg.echo(), "timestamp": timestamp}
    if cfg.format == "json":
        return json.dumps({"config": config, "rows": rows, "summary": summary}, indent=1) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(config, sort_keys=True) + "\n")
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(row.get(k)) for k in header])
    buf.write("# summary " + json.dumps(summary, sort_keys=True) + "\n")
    return buf.getvalue()


def main(argv: Optional[Sequence[str]] = None, *, out=None, timestamp: Optional[str] = None) -> int:
    out = sys.stdout if out is None else out
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    stamp = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    try:
        if cfg.cache:
            with use_store(CheckpointStore(cfg.cache)):
                rows, summary = COMMANDS[cfg.command](cfg)
        else:
            rows, summary = COMMANDS[cfg.command](cfg)
    except (DomainError, UsageError) as exc:
        print(f"zetalab {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"zetalab {cfg.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.write(render(cfg, rows, summary, stamp))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
