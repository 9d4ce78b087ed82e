"""Multi-run campaigns: configuration, per-run seed derivation, CSV output and
descriptive statistics."""
from __future__ import annotations

import csv
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, fields
from pathlib import Path

from .evolution import LS_MODES, RunRecord, SstConfig, run_fp_sst, run_sst
from .problems import make_problem

logger = logging.getLogger(__name__)

ENCODINGS = ("tt", "tt-ri", "fp", "gp", "gp-part", "gp-full", "gp-scnd")
ALGORITHMS = ("sst", "fp-sst")
OFFICIAL_N = (7, 9, 11, 13)
BITSTRING_ENCODINGS = ("tt", "tt-ri")

CSV_COLUMNS = (
    "run_id", "seed", "n", "encoding", "algo", "ls", "pop_size", "budget",
    "evals_used", "best_fitness", "best_nl", "wall_time_s", "best_solution",
)
SUMMARY_COLUMNS = ("label", "n", "runs", "max", "avg", "std")

_LABELS = {
    "tt": "TT/SST", "tt-ri": "TT/SST-RI", "fp": "FP/SST", "gp": "GP/SST",
    "gp-part": "GP/SST-PART", "gp-full": "GP/SST-FULL", "gp-scnd": "GP/SCND",
}

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, run_id: int) -> int:
    """Per-run seed: splitmix64 of (master, counter). Distinct run ids of one
    campaign give distinct seeds because the mix is a bijection."""
    z = (master * 0x9E3779B97F4A7C15 + run_id + 1) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass
class ExperimentConfig:
    n: int = 9
    encoding: str = "tt"
    algo: str | None = None
    ls: str = "none"
    runs: int = 30
    budget: int = 1_000_000
    time_limit: float | None = None
    seed: int = 42
    pop_size: int = 100
    p_mut: float = 0.5
    ls_trials: int = 25
    dec: int = 3
    max_depth: int = 8
    groups_seed: int = 0
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.encoding not in ENCODINGS:
            raise ValueError(f"encoding must be one of {ENCODINGS}")
        if self.algo is None:
            self.algo = "fp-sst" if self.encoding == "fp" else "sst"
        if self.algo not in ALGORITHMS:
            raise ValueError(f"algo must be one of {ALGORITHMS}")
        if (self.algo == "fp-sst") != (self.encoding == "fp"):
            raise ValueError("fp-sst runs the fp encoding and nothing else")
        if self.ls not in LS_MODES:
            raise ValueError(f"ls must be one of {LS_MODES}")
        if self.ls in ("ls2", "ls3") and self.encoding not in BITSTRING_ENCODINGS:
            raise ValueError(f"{self.ls} needs a bitstring encoding, not {self.encoding}")
        if self.encoding == "gp-scnd" and self.ls != "none":
            logger.warning("gp-scnd ignores local search; running with ls=none")
            self.ls = "none"
        if self.n < 1 or (self.encoding == "gp-scnd" and self.n < 3):
            raise ValueError(f"n={self.n} too small for {self.encoding}")
        if self.n not in OFFICIAL_N:
            logger.info("n=%d is not one of the reference instances %s", self.n, OFFICIAL_N)
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        self.sst_config(0)

    def sst_config(self, seed: int) -> SstConfig:
        return SstConfig(pop_size=self.pop_size, p_mut=self.p_mut, budget=self.budget,
                         ls=self.ls, seed=seed, ls_trials=self.ls_trials,
                         time_limit=self.time_limit)

    def problem(self):
        return make_problem(self.encoding, self.n, dec=self.dec, max_depth=self.max_depth,
                            groups_seed=self.groups_seed)


def variant_label(encoding: str, ls: str = "none") -> str:
    """Row label in the style TT/SST-RI-LS1 or GP/SST-PART-LS."""
    label = _LABELS[encoding]
    if ls == "none":
        return label
    if encoding.startswith("gp"):
        return label + "-LS"
    return f"{label}-{ls.upper()}"


def _run_one(cfg: ExperimentConfig, run_id: int, problem=None) -> RunRecord:
    seed = derive_seed(cfg.seed, run_id)
    problem = problem if problem is not None else cfg.problem()
    runner = run_fp_sst if cfg.algo == "fp-sst" else run_sst
    rec = runner(cfg.sst_config(seed), problem)
    rec.run_id = run_id
    rec.algo = cfg.algo
    return rec


class CsvWriter:
    """Appends one flushed row per record; writes the header for new files."""

    def __init__(self, path):
        self.path = Path(path)
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not self.path.exists() or self.path.stat().st_size == 0
            self._fh = open(self.path, "a", newline="", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write results to {self.path}: {exc}") from exc
        self._writer = csv.writer(self._fh)
        if fresh:
            self._writer.writerow(CSV_COLUMNS)
            self._fh.flush()

    def write(self, rec: RunRecord) -> None:
        self._writer.writerow(record_row(rec))
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def run_experiment(cfg: ExperimentConfig, progress=None) -> list:
    """Run ``cfg.runs`` independent runs; records are streamed to ``cfg.out``
    as they finish and returned sorted by run id."""
    cfg.validate()
    writer = CsvWriter(cfg.out) if cfg.out else None
    records = []

    def done(rec):
        records.append(rec)
        if writer:
            writer.write(rec)
        logger.info("%s run %d: fitness %.6f (nl %d) in %.1fs", variant_label(cfg.encoding, cfg.ls),
                    rec.run_id, rec.best_fitness, rec.best_nl, rec.wall_time_s)
        if progress:
            progress(rec)

    try:
        if cfg.workers == 1:
            problem = cfg.problem()
            for run_id in range(cfg.runs):
                done(_run_one(cfg, run_id, problem))
        else:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                futures = [pool.submit(_run_one, cfg, run_id) for run_id in range(cfg.runs)]
                for fut in as_completed(futures):
                    done(fut.result())
    finally:
        if writer:
            writer.close()
    return sorted(records, key=lambda r: r.run_id)


# --- serialization ------------------------------------------------------------

def record_row(rec: RunRecord) -> list:
    return [
        rec.run_id, rec.seed, rec.n, rec.encoding, rec.algo, rec.ls, rec.pop_size,
        rec.budget, rec.evals_used, f"{rec.best_fitness:.6f}", rec.best_nl,
        f"{rec.wall_time_s:.3f}", rec.best_solution,
    ]


_INT_COLUMNS = ("run_id", "seed", "n", "pop_size", "budget", "evals_used", "best_nl")


def _parse_row(row: dict) -> RunRecord:
    kw = {c: int(row[c]) for c in _INT_COLUMNS}
    kw.update(encoding=row["encoding"], algo=row["algo"], ls=row["ls"],
              best_fitness=float(row["best_fitness"]), wall_time_s=float(row["wall_time_s"]),
              best_solution=row["best_solution"])
    return RunRecord(**kw)


def read_csv(path) -> list:
    """Parse a results file. Incomplete trailing rows (from an interrupted
    campaign) are skipped."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    records = []
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return records
        missing = set(CSV_COLUMNS) - set(reader.fieldnames)
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            try:
                records.append(_parse_row(row))
            except (TypeError, ValueError):
                logger.warning("%s: skipping incomplete row %r", path, row)
    return records


@dataclass(frozen=True)
class SummaryStats:
    max: float
    avg: float
    std: float
    runs: int


def summarize(records) -> SummaryStats:
    """Max, mean and sample standard deviation (ddof=1; 0 for a single run)."""
    values = [r.best_fitness if isinstance(r, RunRecord) else float(r) for r in records]
    if not values:
        raise ValueError("cannot summarize an empty record set")
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return SummaryStats(max(values), statistics.fmean(values), std, len(values))


def group_records(records) -> dict:
    """Records keyed by (n, variant label), in first-seen order."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.n, variant_label(r.encoding, r.ls)), []).append(r)
    return groups


def summary_rows(groups: dict) -> list:
    rows = []
    for (n, label), recs in groups.items():
        s = summarize(recs)
        rows.append([label, n, s.runs, f"{s.max:.6f}", f"{s.avg:.6f}", f"{s.std:.6f}"])
    return rows


def emit_csv(records, stats, path) -> None:
    """Write records to ``path`` and, when ``stats`` (a {(n, label): records}
    mapping or a SummaryStats) is given, a summary next to it as
    ``<stem>.summary.csv``."""
    path = Path(path)
    if path.exists():
        path.unlink()
    with CsvWriter(path) as w:
        for rec in records:
            w.write(rec)
    if stats is None:
        return
    if isinstance(stats, SummaryStats):
        first = next(iter(records), None)
        label = variant_label(first.encoding, first.ls) if first else ""
        rows = [[label, first.n if first else "", stats.runs,
                 f"{stats.max:.6f}", f"{stats.avg:.6f}", f"{stats.std:.6f}"]]
    else:
        rows = summary_rows(stats)
    _write_table(path.with_suffix(".summary.csv"), SUMMARY_COLUMNS, rows)


def emit_plot_data(groups: dict, path) -> None:
    """Long-format best-fitness lists, one row per run, for external boxplots."""
    rows = []
    for key, recs in groups.items():
        label = key[1] if isinstance(key, tuple) else key
        n = key[0] if isinstance(key, tuple) else (recs[0].n if recs else "")
        rows.extend([label, n, r.run_id, f"{r.best_fitness:.6f}"] for r in recs)
    _write_table(Path(path), ("group", "n", "run_id", "best_fitness"), rows)


def _write_table(path: Path, header, rows) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def config_fields() -> list:
    return [f.name for f in fields(ExperimentConfig)]


def success_count(records, nl: int) -> int:
    return sum(1 for r in records if r.best_nl >= nl)


def median_nl(records) -> float:
    return statistics.median(r.best_nl for r in records)

