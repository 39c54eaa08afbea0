"""Benchmark harness over the family f_d = 10d + sum_k ((1-i) z^-k + (1+i) z^k)."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass
from typing import IO, Iterable, List, Optional, Sequence

from .certify import ALGORITHMS, DEFAULT_MAX_BITS, Diagnostics, verify
from .errors import CertificationError
from .gram import _numeric_gram
from .trigpoly import gauss_family

__all__ = ["BenchRecord", "CSV_COLUMNS", "default_grid", "run_cell", "run_bench", "write_csv"]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("d", "algorithm", "t_epsilon", "t_u", "t_total", "verified")
BENCH_ROOT_DELTA = 64  # starting root accuracy for csos1 in the benchmark
_GRID = (1, 2, 5, 10, 25, 50, 100, 150, 200, 250)


@dataclass(frozen=True)
class BenchRecord:
    d: int
    algorithm: str
    t_epsilon: float
    t_u: float
    t_total: float
    verified: bool
    error: Optional[str] = None

    def row(self) -> List[str]:
        return [str(self.d), self.algorithm, f"{self.t_epsilon:.3f}", f"{self.t_u:.3f}",
                f"{self.t_total:.3f}", "true" if self.verified else "false"]


def default_grid(dmax: int) -> List[int]:
    if dmax < 1:
        raise ValueError("dmax must be >= 1")
    grid = [d for d in _GRID if d <= dmax]
    if grid[-1] != dmax:
        grid.append(dmax)
    return grid


def run_cell(d: int, algorithm: str, seed: int = 0, max_bits: int = DEFAULT_MAX_BITS) -> BenchRecord:
    """Certify and verify f_d with one algorithm; failures become verified = false."""
    f = gauss_family(d)
    _numeric_gram.cache_clear()  # no warm solver cache across cells
    diag = Diagnostics()
    kwargs = {"max_bits": max_bits, "diag": diag}
    if algorithm == "csos1":
        kwargs.update(delta=BENCH_ROOT_DELTA, seed=seed)
    t0 = time.perf_counter()
    try:
        cert = ALGORITHMS[algorithm](f, **kwargs)
    except CertificationError as exc:
        log.warning("d=%d %s failed: %s", d, algorithm, exc)
        return BenchRecord(d, algorithm, diag.t_epsilon, diag.t_u, time.perf_counter() - t0, False, str(exc))
    t_total = time.perf_counter() - t0
    ok = bool(verify(f, cert))
    return BenchRecord(d, algorithm, diag.t_epsilon, diag.t_u, t_total, ok)


def run_bench(ds: Iterable[int], algorithms: Sequence[str], seed: int = 0,
              max_bits: int = DEFAULT_MAX_BITS, progress: Optional[IO] = None) -> List[BenchRecord]:
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    out = []
    for d in ds:
        for a in algorithms:
            rec = run_cell(d, a, seed=seed, max_bits=max_bits)
            if progress is not None:
                print(",".join(rec.row()), file=progress, flush=True)
            out.append(rec)
    return out


def write_csv(records: Iterable[BenchRecord], fh: IO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
