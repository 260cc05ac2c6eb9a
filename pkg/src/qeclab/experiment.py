"""Batch experiments: fidelity sweeps, random-channel Monte Carlo, tables.

Monte-Carlo samples are independent of scheduling: sample ``i`` at grid
position ``j`` always draws from a generator seeded with
``mix_seed(master_seed, j, i)``, and aggregation runs over results sorted
by sample index.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import oracles
from .channels import make_standard_channel, sample_arbitrary_channel
from .codes import build_code
from .effective import concatenate, effective_fidelity

log = logging.getLogger(__name__)

DEFAULT_F0_GRID = (0.9, 0.91, 0.92, 0.93, 0.94, 0.945, 0.95, 0.96, 0.97, 0.98,
                   0.99, 0.992, 0.9993)
MASK64 = (1 << 64) - 1

MIXED_KINDS = ("bf", "bpf", "pf", "ad", "gad")
SWEEP_MODELS = {
    # (code, model) -> (per-qubit channel kinds, oracle for the simulated model)
    ("five", "dep"): (("dep",) * 5, "f5_dep"),
    ("five", "mixed"): (MIXED_KINDS, "f5_mixed"),
    ("five", "bitflip"): (("bf",) * 5, "f5_bitflip"),
    ("steane", "dep"): (("dep",) * 7, "f7_dep"),
    ("steane", "mixed"): (MIXED_KINDS + ("dep", "dep"), "f7_mixed"),
}
DEP_ORACLE = {"five": "f5_dep", "steane": "f7_dep"}

SWEEP_COLUMNS = ("p", "F_eff_simulated", "F_oracle", "gap", "rdev")
MC_COLUMNS = ("f0", "n_samples", "dF_min", "dF_avg", "dR_min", "dR_avg",
              "F_dep", "max_positive_gap", "n_positive", "n_negative", "seed", "code")


@dataclass
class ExperimentConfig:
    code: str = "five"
    mode: str = "sweep"
    model: str = "dep"
    f0_list: tuple = DEFAULT_F0_GRID
    samples: int = 10_000
    master_seed: int = 0
    workers: int = 1
    p_grid: tuple = (0.9, 1.0, 11)
    levels: int = 3
    output_path: str | None = None

    def __post_init__(self):
        self.f0_list = tuple(float(f) for f in self.f0_list)
        for f in self.f0_list:
            if not 0.25 < f <= 1.0:
                raise ValueError(f"f0={f} outside (1/4, 1]")
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.workers < 1:
            raise ValueError("need at least one worker")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master seed must fit in 64 bits")


@dataclass
class RunStats:
    f0: float
    n_samples: int
    dF_min: float
    dF_avg: float
    dR_min: float
    dR_avg: float
    F_dep: float
    max_positive_gap: float
    n_positive: int
    n_negative: int
    seed: int
    code: str = "five"
    wall_time: float = field(default=0.0, compare=False)


# --- seeding ----------------------------------------------------------------

def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix_seed(master: int, f0_index: int, sample_index: int) -> int:
    """``splitmix64(splitmix64(splitmix64(master) ^ f0_index) ^ sample_index)``."""
    h = splitmix64(master & MASK64)
    h = splitmix64(h ^ (f0_index & MASK64))
    return splitmix64(h ^ (sample_index & MASK64))


def sample_rng(master: int, f0_index: int, sample_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(mix_seed(master, f0_index, sample_index)))


# --- sweeps -------------------------------------------------------------------

def p_values(p_grid: Sequence) -> np.ndarray:
    pmin, pmax, steps = float(p_grid[0]), float(p_grid[1]), int(p_grid[2])
    if steps < 1 or not 0.0 <= pmin <= pmax <= 1.0 or (steps == 1 and pmin != pmax):
        raise ValueError(f"invalid grid {tuple(p_grid)}")
    return np.linspace(pmin, pmax, steps)


def noise_for(code: str, model: str, p: float) -> list:
    try:
        kinds, _ = SWEEP_MODELS[(code, model)]
    except KeyError:
        raise ValueError(f"no noise model {model!r} for code {code!r}") from None
    return [make_standard_channel(k, p) for k in kinds]


def _relative(code: str, gap: float, p: float) -> float:
    if p >= 1.0:
        return math.nan
    improvement = oracles.oracle_eval(DEP_ORACLE[code], p) - p
    return gap / improvement if code == "five" else abs(gap) / improvement


def run_sweep(cfg: ExperimentConfig) -> list[dict]:
    code = build_code(cfg.code)
    _, oracle_name = SWEEP_MODELS.get((cfg.code, cfg.model), (None, None))
    if oracle_name is None:
        raise ValueError(f"no noise model {cfg.model!r} for code {cfg.code!r}")
    rows = []
    for p in p_values(cfg.p_grid):
        p = float(p)
        sim = effective_fidelity(code, noise_for(cfg.code, cfg.model, p))
        dep = oracles.oracle_eval(DEP_ORACLE[cfg.code], p)
        gap = sim - dep
        rows.append({
            "p": p,
            "F_eff_simulated": sim,
            "F_oracle": oracles.oracle_eval(oracle_name, p),
            "gap": gap,
            "rdev": _relative(cfg.code, gap, p),
        })
    return rows


def run_concat(cfg: ExperimentConfig, p: float) -> list[dict]:
    code = build_code(cfg.code)
    reports = concatenate(code, noise_for(cfg.code, cfg.model, p), cfg.levels)
    return [{"level": k + 1, "fidelity": r.fidelity} for k, r in enumerate(reports)]


# --- Monte Carlo -------------------------------------------------------------

def sample_fidelity(code_name: str, f0: float, master: int, f0_index: int,
                    sample_index: int) -> float:
    code = build_code(code_name)
    rng = sample_rng(master, f0_index, sample_index)
    chans = [sample_arbitrary_channel(f0, rng) for _ in range(code.n_physical)]
    return effective_fidelity(code, chans)


def _sample_block(args) -> list[float]:
    code_name, f0, master, f0_index, start, stop = args
    return [sample_fidelity(code_name, f0, master, f0_index, i) for i in range(start, stop)]


def sample_fidelities(code_name: str, f0: float, n: int, master: int, f0_index: int,
                      workers: int = 1, pool: ProcessPoolExecutor | None = None) -> np.ndarray:
    """Effective fidelities for samples ``0 .. n-1``, in index order."""
    if pool is None or workers == 1:
        return np.array(_sample_block((code_name, f0, master, f0_index, 0, n)))
    # more blocks than workers keeps the pool balanced
    n_blocks = min(n, workers * 8)
    edges = np.linspace(0, n, n_blocks + 1).astype(int)
    jobs = [(code_name, f0, master, f0_index, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
    out: list[float] = []
    for block in pool.map(_sample_block, jobs):
        out.extend(block)
    return np.array(out)


def aggregate(f0: float, fids: Iterable[float], code: str = "five", seed: int = 0,
              wall_time: float = 0.0) -> RunStats:
    fids = np.asarray(list(fids), dtype=float)
    if fids.size == 0:
        raise ValueError("no samples to aggregate")
    f_dep = oracles.oracle_eval(DEP_ORACLE[code], f0)
    gaps = fids - f_dep
    d_min = float(np.max(f_dep - fids))
    d_avg = math.fsum(abs(float(g)) for g in gaps) / gaps.size
    improvement = f_dep - f0
    d_rmin = d_min / improvement if improvement != 0 else math.nan
    d_ravg = d_avg / improvement if improvement != 0 else math.nan
    return RunStats(
        f0=f0, n_samples=int(gaps.size), dF_min=d_min, dF_avg=d_avg,
        dR_min=d_rmin, dR_avg=d_ravg, F_dep=f_dep,
        max_positive_gap=float(max(0.0, np.max(gaps))),
        n_positive=int(np.sum(gaps > 0)), n_negative=int(np.sum(gaps < 0)),
        seed=seed, code=code, wall_time=wall_time,
    )


def run_montecarlo(cfg: ExperimentConfig, keep_samples: bool = False):
    """One ``RunStats`` per entry of ``cfg.f0_list``.

    With ``keep_samples`` the per-sample fidelities are returned as well,
    keyed by ``f0``.
    """
    if cfg.code not in DEP_ORACLE:
        raise ValueError(f"unknown code {cfg.code!r}")
    build_code(cfg.code)
    stats, samples = [], {}
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for j, f0 in enumerate(cfg.f0_list):
            t0 = time.perf_counter()
            fids = sample_fidelities(cfg.code, f0, cfg.samples, cfg.master_seed, j,
                                     cfg.workers, pool)
            st = aggregate(f0, fids, cfg.code, cfg.master_seed, time.perf_counter() - t0)
            log.info("f0=%g: %d samples in %.1fs, dF_min=%.5e dF_avg=%.5e",
                     f0, st.n_samples, st.wall_time, st.dF_min, st.dF_avg)
            stats.append(st)
            if keep_samples:
                samples[f0] = fids
    finally:
        if pool is not None:
            pool.shutdown()
    return (stats, samples) if keep_samples else stats


# --- CSV and tables ------------------------------------------------------------

def fmt_real(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_real(r[c]) for c in columns])
    return buf.getvalue()


def stats_to_csv(stats: Sequence[RunStats]) -> str:
    return rows_to_csv([asdict(s) for s in stats], MC_COLUMNS)


def stats_from_csv(text: str) -> list[RunStats]:
    reader = csv.DictReader(io.StringIO(text))
    missing = set(MC_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"Monte-Carlo CSV lacks columns {sorted(missing)}")
    out = []
    for r in reader:
        out.append(RunStats(
            f0=float(r["f0"]), n_samples=int(r["n_samples"]), dF_min=float(r["dF_min"]),
            dF_avg=float(r["dF_avg"]), dR_min=float(r["dR_min"]), dR_avg=float(r["dR_avg"]),
            F_dep=float(r["F_dep"]), max_positive_gap=float(r["max_positive_gap"]),
            n_positive=int(r["n_positive"]), n_negative=int(r["n_negative"]),
            seed=int(r["seed"]), code=r["code"],
        ))
    if not out:
        raise ValueError("Monte-Carlo CSV has no rows")
    return out


def steane_reference(f0: float) -> tuple[float | None, float | None]:
    """``(|gap7|, rdev7)`` at ``f0``, or ``None`` where the Steane code does not help."""
    if f0 >= 1.0 or oracles.f7_dep(f0) <= f0:
        return None, None
    return abs(oracles.gap7(f0)), oracles.rdev7(f0)


def table_rows(stats: Sequence[RunStats]) -> list[dict]:
    rows = []
    for s in stats:
        g7, r7 = steane_reference(s.f0)
        rows.append({
            "f0": s.f0, "dF_min": s.dF_min, "dF_avg": s.dF_avg, "dF_steane": g7,
            "dR_min": s.dR_min, "dR_avg": s.dR_avg, "dR_steane": r7,
        })
    return rows


def _cell(x) -> str:
    return "None" if x is None else f"{x:.5e}"


def emit_tables(stats: Sequence[RunStats]) -> str:
    rows = table_rows(stats)
    heads = [
        ("Fidelity gaps", ("F0", "|dF'_min|", "|dF'|_avg", "|dF'_steane|"), ("dF_min", "dF_avg", "dF_steane")),
        ("Relative deviations", ("F0", "dR_min", "dR_avg", "dR_steane"), ("dR_min", "dR_avg", "dR_steane")),
    ]
    lines = []
    for title, names, keys in heads:
        lines.append(title)
        lines.append(f"{names[0]:<8}" + "".join(f"{h:>16}" for h in names[1:]))
        for r in rows:
            lines.append(f"{r['f0']:<8g}" + "".join(f"{_cell(r[k]):>16}" for k in keys))
        lines.append("")
    return "\n".join(lines)
