"""Brute-force point counts of the border rank two secant over small prime fields."""

from __future__ import annotations

import itertools
import logging
import multiprocessing
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from .const import (
    REPORT_SCHEMA_VERSION,
    SCAN_CHUNK_SIZE,
    SCAN_LARGE_MAX_VECTORS,
    SCAN_MAX_VECTORS,
    configured_threads,
)
from .exceptions import PreconditionFailure, TooLarge
from .exact import ScalarField
from .sigma2 import expected_counts, point_count_fiber

_LOGGER = logging.getLogger(__name__)

_MIN_ORDER = 3
_MAX_ORDER = 5

Task = tuple[int, int, int, int, int]


@dataclass(frozen=True, slots=True)
class ScanCounts:
    """Projective points of the secant, bucketed by the number of concise factors."""

    d: int
    p: int
    histogram: tuple[int, ...]

    @property
    def sigma2_points(self) -> int:
        """Return the number of F_p points of the secant."""
        return sum(self.histogram)

    @property
    def csigma2_points(self) -> int:
        """Return the number of F_p points of the concise secant."""
        if self.histogram[1]:
            msg = f"{self.histogram[1]} points are concise on exactly one factor"
            raise AssertionError(msg)
        return sum(
            count * point_count_fiber(c, self.d, self.p)
            for c, count in enumerate(self.histogram)
            if count
        )


def _check_size(d: int, p: int, *, allow_large: bool) -> int:
    if not _MIN_ORDER <= d <= _MAX_ORDER:
        msg = f"scans support {_MIN_ORDER} to {_MAX_ORDER} factors, got {d}"
        raise PreconditionFailure(msg)
    ScalarField(p)
    vectors = p ** (2**d)
    limit = SCAN_LARGE_MAX_VECTORS if allow_large else SCAN_MAX_VECTORS
    if vectors > limit:
        msg = (
            f"scanning {vectors} vectors for (d, p) = ({d}, {p}) "
            f"exceeds the limit of {limit}"
        )
        raise TooLarge(msg)
    return vectors


def _tasks(d: int, p: int, chunk_size: int) -> list[Task]:
    """Split the projective points into chunks of normalized vectors."""
    n = 2**d
    tasks: list[Task] = []
    for lead in range(n):
        total = p ** (n - lead - 1)
        tasks.extend(
            (d, p, lead, start, min(start + chunk_size, total))
            for start in range(0, total, chunk_size)
        )
    return tasks


def _decode(d: int, p: int, lead: int, start: int, stop: int) -> np.ndarray:
    """Return vectors whose first nonzero entry is a 1 at ``lead``."""
    n = 2**d
    free = n - lead - 1
    codes = np.arange(start, stop, dtype=np.int64)
    vectors = np.zeros((codes.size, n), dtype=np.int64)
    vectors[:, lead] = 1
    if free:
        powers = np.int64(p) ** np.arange(free, dtype=np.int64)
        vectors[:, lead + 1 :] = (codes[:, None] // powers[None, :]) % p
    return vectors


def _flattening(vectors: np.ndarray, d: int, side: list[int]) -> np.ndarray:
    rest = [i for i in range(d) if i not in side]
    cube = vectors.reshape((vectors.shape[0],) + (2,) * d)
    moved = cube.transpose([0] + [1 + i for i in side] + [1 + i for i in rest])
    return moved.reshape(vectors.shape[0], 2 ** len(side), -1)


def _det3(sub: np.ndarray) -> np.ndarray:
    a, b, c = sub[:, 0, 0], sub[:, 0, 1], sub[:, 0, 2]
    e, f, g = sub[:, 1, 0], sub[:, 1, 1], sub[:, 1, 2]
    h, i, j = sub[:, 2, 0], sub[:, 2, 1], sub[:, 2, 2]
    return a * (f * j - g * i) - b * (e * j - g * h) + c * (e * i - f * h)


def _secant_mask(vectors: np.ndarray, d: int, p: int) -> np.ndarray:
    """Return True where every flattening has rank at most two."""
    alive = np.ones(vectors.shape[0], dtype=bool)
    for size in range(2, d - 1):
        for rest in itertools.combinations(range(1, d), size - 1):
            flat = _flattening(vectors, d, [0, *rest])
            rows = range(flat.shape[1])
            cols = range(flat.shape[2])
            for r in itertools.combinations(rows, 3):
                for c in itertools.combinations(cols, 3):
                    idx = np.flatnonzero(alive)
                    if not idx.size:
                        return alive
                    sub = flat[
                        idx[:, None, None],
                        np.array(r)[None, :, None],
                        np.array(c)[None, None, :],
                    ]
                    alive[idx[_det3(sub) % p != 0]] = False
    return alive


def _concise_counts(vectors: np.ndarray, d: int, p: int) -> np.ndarray:
    """Return the number of factors each tensor is concise on."""
    counts = np.zeros(vectors.shape[0], dtype=np.int64)
    for i in range(d):
        flat = _flattening(vectors, d, [i])
        top, bottom = flat[:, 0, :], flat[:, 1, :]
        independent = np.zeros(vectors.shape[0], dtype=bool)
        for u, v in itertools.combinations(range(flat.shape[2]), 2):
            minor = top[:, u] * bottom[:, v] - top[:, v] * bottom[:, u]
            independent |= minor % p != 0
        counts += independent
    return counts


def _scan_chunk(task: Task) -> np.ndarray:
    d, p, lead, start, stop = task
    vectors = _decode(d, p, lead, start, stop)
    members = vectors[_secant_mask(vectors, d, p)]
    return np.bincount(_concise_counts(members, d, p), minlength=d + 1)


def _make_executor(threads: int) -> Executor:
    """Start a forked process pool, or a thread pool where fork is unavailable."""
    try:
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=threads, mp_context=ctx)
    except ValueError:
        _LOGGER.debug("Fork start method unavailable, scanning with threads")
        return ThreadPoolExecutor(max_workers=threads)


def scan(
    d: int,
    p: int,
    *,
    threads: int | None = None,
    chunk_size: int = SCAN_CHUNK_SIZE,
    allow_large: bool = False,
) -> ScanCounts:
    """
    Enumerate the projective points of the secant in ``(F_p^2)^{⊗d}``.

    Results do not depend on the worker count: chunk histograms are summed in
    task order.
    """
    vectors = _check_size(d, p, allow_large=allow_large)
    threads = threads if threads is not None else configured_threads()
    tasks = _tasks(d, p, chunk_size)
    _LOGGER.info(
        "Scanning %d vectors for d = %d over F_%d in %d chunks on %d workers",
        vectors,
        d,
        p,
        len(tasks),
        threads,
    )
    histogram = np.zeros(d + 1, dtype=np.int64)
    if threads <= 1 or len(tasks) == 1:
        for task in tasks:
            histogram += _scan_chunk(task)
    else:
        with _make_executor(threads) as executor:
            for partial in executor.map(_scan_chunk, tasks):
                histogram += partial
    return ScanCounts(d, p, tuple(int(c) for c in histogram))


def count_sigma2_points(d: int, p: int, **kwargs: Any) -> int:
    """Return the number of F_p points of the secant."""
    return scan(d, p, **kwargs).sigma2_points


def count_csigma2_points(d: int, p: int, **kwargs: Any) -> int:
    """Return the number of F_p points of the concise secant."""
    return scan(d, p, **kwargs).csigma2_points


def census(d: int, p: int, **kwargs: Any) -> dict[str, Any]:
    """Compare brute-force counts with the formulas; mismatches are reported."""
    counts = scan(d, p, **kwargs)
    sigma2_expected, csigma2_expected = expected_counts(d, p)
    discrepancies = []
    if counts.sigma2_points != sigma2_expected:
        discrepancies.append("sigma2")
    if counts.csigma2_points != csigma2_expected:
        discrepancies.append("csigma2")
    for name in discrepancies:
        _LOGGER.warning(
            "Brute-force %s count for d = %d over F_%d disagrees with the formula",
            name,
            d,
            p,
        )
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "d": d,
        "p": p,
        "concise_histogram": list(counts.histogram),
        "sigma2": {"count": counts.sigma2_points, "formula": sigma2_expected},
        "csigma2": {"count": counts.csigma2_points, "formula": csigma2_expected},
        "discrepancies": discrepancies,
    }
