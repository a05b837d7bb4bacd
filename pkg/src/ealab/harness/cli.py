"""Command-line entry point.

Every subcommand accepts ``--seed``, ``--trials``, ``--out``, ``--config`` and
``--workers``.  Values come from (lowest precedence first) defaults, the
config file, ``EALAB_<OPTION>`` environment variables and flags.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .. import bounds
from ..bitcore import TabulatedObjective
from ..errors import DomainError, ResourceError, UsageError
from . import config as cfg
from .experiments import ExperimentSpec, run_trials, scaling_experiment, slowdown_experiment
from .verify import verify_suites

DEFAULTS = {
    "seed": "0",
    "trials": "300",
    "out": None,
    "workers": "1",
    "algorithm": "one-plus-one",
    "problem": "onemax",
    "n": "10",
    "mu": "1",
    "lam": "1",
    "parents": "uniform-random",
    "survivors": "elitist-truncation",
    "budget": str(10**9),
    "model": "nlogn",
    "grid": "1x1,10x100",
    "z": "3.0",
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed")
    p.add_argument("--trials")
    p.add_argument("--out")
    p.add_argument("--config")
    p.add_argument("--workers")


def _sim_options(p: argparse.ArgumentParser, with_n=True):
    p.add_argument("--problem", help="onemax, leadingones or table:<path>")
    if with_n:
        p.add_argument("--n", help="comma-separated list of lengths")
    p.add_argument("--budget")
    p.add_argument("--parents")
    p.add_argument("--survivors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ealab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="repeated runs, one CSV row per trial")
    _common(p)
    _sim_options(p)
    p.add_argument("--algorithm", help="mu-lambda-ea, one-plus-one or rls")
    p.add_argument("--mu")
    p.add_argument("--lam", "--lambda", dest="lam")

    p = sub.add_parser("scaling", help="mean evaluations over g(n) for several n")
    _common(p)
    _sim_options(p)
    p.add_argument("--algorithm")
    p.add_argument("--mu")
    p.add_argument("--lam", "--lambda", dest="lam")
    p.add_argument("--model", help="nlogn or n2")

    p = sub.add_parser("slowdown", help="(mu+lambda) cells against the (1+1) cell")
    _common(p)
    _sim_options(p)
    p.add_argument("--grid", help="e.g. 1x1,10x100")
    p.add_argument("--z", help="interval width in standard errors")

    for name in ("markov-verify", "switch-verify", "lemma-verify"):
        p = sub.add_parser(name, help=f"run the {name.split('-')[0]} verification suite")
        _common(p)
    return parser


def _resolve(args: argparse.Namespace, environ=None) -> dict:
    file_layer = cfg.load_config(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    return cfg.merge(DEFAULTS, file_layer, cfg.env_overrides(environ), flags)


def _int(opts, key):
    try:
        return int(opts[key])
    except (TypeError, ValueError):
        raise UsageError(f"{key}: expected an integer, got {opts[key]!r}") from None


def _problem(text: str):
    if text.startswith("table:"):
        return TabulatedObjective.from_text(Path(text[6:]).read_text())
    return text


def _ns(text: str) -> tuple:
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"n: expected comma-separated integers, got {text!r}") from None


def _spec(opts) -> ExperimentSpec:
    return ExperimentSpec(
        algorithm=opts["algorithm"],
        problem=_problem(opts["problem"]),
        n=_ns(opts["n"]),
        mu=_int(opts, "mu"),
        lam=_int(opts, "lam"),
        parents=opts["parents"],
        survivors=opts["survivors"],
        trials=_int(opts, "trials"),
        seed=_int(opts, "seed"),
        budget=_int(opts, "budget"),
        out=opts["out"],
        workers=_int(opts, "workers"),
    )


def _grid(text: str) -> list:
    try:
        return [tuple(int(v) for v in cell.split("x")) for cell in text.split(",")]
    except ValueError:
        raise UsageError(f"grid: expected cells like 10x100, got {text!r}") from None


def _emit(opts, text: str):
    if opts.get("out"):
        Path(opts["out"]).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv=None, environ=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _resolve(args, environ)
        cmd = args.command
        if cmd == "simulate":
            batch = run_trials(_spec(opts))
            if not opts["out"]:
                sys.stdout.write(batch.to_csv())
            for n, st in batch.stats.items():
                print(f"# n={n} mean={st.mean} sd={st.sd} median={st.median} timeouts={st.timeouts}",
                      file=sys.stderr)
            return 0
        if cmd == "scaling":
            table = scaling_experiment(_spec(opts), opts["model"])
            if not opts["out"]:
                sys.stdout.write(table.to_csv())
            return 0
        if cmd == "slowdown":
            ns = _ns(opts["n"])
            if len(ns) != 1:
                raise UsageError("n: slowdown takes a single length")
            table = slowdown_experiment(
                ns[0], _grid(opts["grid"]), _problem(opts["problem"]), _int(opts, "trials"),
                _int(opts, "seed"), float(opts["z"]), opts["parents"], opts["survivors"],
                _int(opts, "budget"), _int(opts, "workers"), opts["out"],
            )
            if not opts["out"]:
                sys.stdout.write(table.to_csv())
            return 0
        suite = cmd.split("-")[0]
        result = verify_suites(suite)
        if suite == "lemma":
            _emit(opts, bounds.verdicts_to_csv(result.artifacts))
        elif suite == "switch":
            _emit(opts, "".join(
                f"# n={k[0]} mu={k[1]} lambda={k[2]}\n" + rep.to_csv() for k, rep in result.artifacts
            ))
        else:
            _emit(opts, "check,passed,detail\n" + "".join(
                f"{c.name},{int(c.passed)},{c.detail.replace(',', ';')}\n" for c in result.checks
            ))
        print(result.summary())
        if not result.passed:
            print(f"FAILED: {result.first_failure.name}", file=sys.stderr)
        return result.exit_code
    except (DomainError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
