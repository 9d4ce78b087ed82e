"""``boolforge`` command line: run campaigns, summarize results, inspect a
truth table."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .core import enumerate_orbits, is_balanced, is_rotation_symmetric, nonlinearity, \
    parse_truth_table, walsh_transform, MAX_ORBIT_N
from .fitness import fitness_nl

# flag name -> (ExperimentConfig field, type)
_RUN_KEYS = {
    "n": ("n", int), "encoding": ("encoding", str), "algo": ("algo", str),
    "ls": ("ls", str), "runs": ("runs", int), "budget": ("budget", int),
    "time-limit": ("time_limit", float), "seed": ("seed", int), "pop": ("pop_size", int),
    "p-mut": ("p_mut", float), "ls-trials": ("ls_trials", int), "dec": ("dec", int),
    "max-depth": ("max_depth", int), "groups-seed": ("groups_seed", int),
    "workers": ("workers", int), "out": ("out", str),
}


def load_config_file(path) -> dict:
    """Read ``key=value`` lines; keys may use dashes or underscores. Blank
    lines and ``#`` comments are ignored."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemExit(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key == "pop-size":
            key = "pop"
        if key not in _RUN_KEYS:
            raise SystemExit(f"{path}:{lineno}: unknown key {key!r}")
        field, cast = _RUN_KEYS[key]
        try:
            out[field] = cast(value)
        except ValueError:
            raise SystemExit(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boolforge",
                                description="Evolve highly nonlinear Boolean functions.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a multi-run campaign")
    r.add_argument("--config", help="key=value file; explicit flags override it")
    for flag, (field, cast) in _RUN_KEYS.items():
        kw = {"type": cast, "dest": field, "default": None}
        if flag == "encoding":
            kw["choices"] = harness.ENCODINGS
        elif flag == "algo":
            kw["choices"] = harness.ALGORITHMS
        elif flag == "ls":
            kw["choices"] = ("none", "ls1", "ls2", "ls3")
        r.add_argument(f"--{flag}", **kw)

    s = sub.add_parser("summarize", help="per-variant max/avg/std of best fitness")
    s.add_argument("results", nargs="+")
    s.add_argument("--out", help="also write the summary table as CSV")
    s.add_argument("--plot-data", help="write long-format best-fitness lists")

    e = sub.add_parser("eval", help="report properties of one truth table")
    e.add_argument("--tt-file", required=True)
    e.add_argument("--format", choices=("auto", "bin", "hex"), default="auto")
    return p


def cmd_run(args) -> int:
    values = load_config_file(args.config) if args.config else {}
    for field, _ in _RUN_KEYS.values():
        v = getattr(args, field)
        if v is not None:
            values[field] = v
    try:
        cfg = harness.ExperimentConfig(**values)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.out is None:
        print("run_id,seed,best_fitness,best_nl,evals_used,wall_time_s")

    def show(rec):
        if cfg.out is None:
            print(f"{rec.run_id},{rec.seed},{rec.best_fitness:.6f},{rec.best_nl},"
                  f"{rec.evals_used},{rec.wall_time_s:.3f}", flush=True)

    records = harness.run_experiment(cfg, progress=show)
    s = harness.summarize(records)
    label = harness.variant_label(cfg.encoding, cfg.ls)
    print(f"{label} n={cfg.n} runs={s.runs} max={s.max:.6f} avg={s.avg:.6f} std={s.std:.6f}",
          file=sys.stderr)
    return 0


def cmd_summarize(args) -> int:
    records = []
    for path in args.results:
        records.extend(harness.read_csv(path))
    groups = harness.group_records(records)
    rows = harness.summary_rows(groups)
    print(",".join(harness.SUMMARY_COLUMNS))
    for row in rows:
        print(",".join(str(x) for x in row))
    if args.out:
        harness._write_table(Path(args.out), harness.SUMMARY_COLUMNS, rows)
    if args.plot_data:
        harness.emit_plot_data(groups, args.plot_data)
    return 0


def cmd_eval(args) -> int:
    try:
        text = Path(args.tt_file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.tt_file}: {exc}", file=sys.stderr)
        return 2
    try:
        tt = parse_truth_table(text, args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    spec = walsh_transform(tt)
    f = fitness_nl(tt)
    rs = is_rotation_symmetric(tt) if tt.n <= MAX_ORBIT_N else None
    print(f"n: {tt.n}")
    print(f"nonlinearity: {nonlinearity(spec)}")
    print(f"balanced: {str(is_balanced(tt)).lower()}")
    print(f"fitness: {f.value:.6f}")
    print(f"rotation_symmetric: {'n/a' if rs is None else str(rs).lower()}")
    if rs:
        print(f"orbits: {enumerate_orbits(tt.n).count}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "summarize": cmd_summarize, "eval": cmd_eval}[args.command]
    try:
        return handler(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
