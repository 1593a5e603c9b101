"""Composite blended approximation on uniform subdivisions and convergence rates."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BlendError, InsufficientData
from .spec import BlendSpec
from .surface import BlendedSpace, BlendedSurface, Function2D, Rect, sample_function

#: errors below this are treated as saturated at machine precision
SATURATION = 1e-13
#: every row at or below this marks a convergence study as exact reproduction
EXACT_TOL = 1e-10
DEFAULT_SAMPLES = 25


def default_workers() -> int:
    raw = os.environ.get("BLENDKIT_THREADS", "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        n = 0
    return n if n > 0 else 1


def _map(fn, items, workers: int | None):
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class CellFitError(BlendError):
    def __init__(self, p: int, q: int, cause: Exception):
        super().__init__(f"cell ({p}, {q}): {cause}")
        self.cell = (p, q)
        self.cause = cause


@dataclass(frozen=True, eq=False)
class PiecewiseSurface:
    spec: BlendSpec
    rect: Rect
    kx: int
    ky: int
    cells: tuple[tuple[BlendedSurface, ...], ...]

    @property
    def hx(self) -> float:
        return (self.rect.b - self.rect.a) / self.kx

    @property
    def hy(self) -> float:
        return (self.rect.d - self.rect.c) / self.ky

    def cell_rect(self, p: int, q: int) -> Rect:
        return cell_rect(self.rect, self.kx, self.ky, p, q)

    def locate(self, u, v):
        """Cell indices of (u, v); interior boundary points go to the left/lower cell."""
        p = np.ceil((np.asarray(u, dtype=float) - self.rect.a) / self.hx).astype(int) - 1
        q = np.ceil((np.asarray(v, dtype=float) - self.rect.c) / self.hy).astype(int) - 1
        return np.clip(p, 0, self.kx - 1), np.clip(q, 0, self.ky - 1)

    def __call__(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        P, Q = self.locate(u, v)
        out = np.empty(u.shape)
        for p, q in set(zip(P.ravel().tolist(), Q.ravel().tolist())):
            sel = (P == p) & (Q == q)
            out[sel] = self.cells[p][q](u[sel], v[sel])
        return float(out) if out.ndim == 0 else out


def cell_rect(rect, kx: int, ky: int, p: int, q: int) -> Rect:
    rect = Rect(*rect)
    hx = (rect.b - rect.a) / kx
    hy = (rect.d - rect.c) / ky
    # exact endpoints on the outer boundary
    b = rect.b if p == kx - 1 else rect.a + (p + 1) * hx
    d = rect.d if q == ky - 1 else rect.c + (q + 1) * hy
    return Rect(rect.a + p * hx, b, rect.c + q * hy, d)


def fit_piecewise(spec: BlendSpec, rect, F: Function2D, kx: int, ky: int | None = None,
                  workers: int | None = None) -> PiecewiseSurface:
    ky = kx if ky is None else ky
    if kx < 1 or ky < 1:
        raise ValueError(f"cell counts must be >= 1, got {kx} x {ky}")
    rect = Rect.checked(*rect)

    def fit_cell(pq):
        p, q = pq
        try:
            return BlendedSpace(spec, cell_rect(rect, kx, ky, p, q)).fit(F)
        except BlendError as exc:
            raise CellFitError(p, q, exc) from exc

    flat = _map(fit_cell, [(p, q) for p in range(kx) for q in range(ky)], workers)
    cells = tuple(tuple(flat[p * ky:(p + 1) * ky]) for p in range(kx))
    return PiecewiseSurface(spec, rect, kx, ky, cells)


def sup_error(ps: PiecewiseSurface, F: Function2D, samples_per_cell: int = DEFAULT_SAMPLES,
              workers: int | None = None) -> float:
    """Max |cell(u, v) - F(u, v)| over a uniform samples x samples grid on each closed cell.

    Each cell is measured with its own approximant, boundary samples included.
    """
    if samples_per_cell < 2:
        raise ValueError("samples_per_cell must be >= 2")
    t = np.linspace(0.0, 1.0, samples_per_cell)

    def cell_error(pq):
        p, q = pq
        cell = ps.cells[p][q]
        a, b, c, d = cell.rect
        us = a + t * (b - a)
        vs = c + t * (d - c)
        X, Y = np.meshgrid(us, vs, indexing="ij")
        return float(np.max(np.abs(cell.evaluate_grid(us, vs) - sample_function(F, X, Y))))

    errs = _map(cell_error, [(p, q) for p in range(ps.kx) for q in range(ps.ky)], workers)
    return max(errs)


def fit_order(rows: Sequence, method: str = "lstsq", tail: int | None = None) -> float:
    """Empirical order p in error ~ K h^p from (h, error) or (k, h, error) rows.

    ``lstsq`` is the least-squares slope of log(error) against log(h);
    ``endpoints`` is the slope between the first and last usable rows.
    Rows with error below SATURATION are dropped; ``tail`` keeps only the
    last N rows before that filter.
    """
    pairs = [(float(row[-2]), float(row[-1])) for row in rows]
    if tail is not None:
        if tail < 2:
            raise InsufficientData("tail must keep at least 2 rows")
        pairs = pairs[-tail:]
    pairs = [(h, e) for h, e in pairs if e >= SATURATION]
    if len(pairs) < 2:
        raise InsufficientData(f"need at least 2 rows with error >= {SATURATION:g}, have {len(pairs)}")
    logh = np.log([h for h, _ in pairs])
    loge = np.log([e for _, e in pairs])
    if np.ptp(logh) == 0.0:
        raise InsufficientData("all rows share the same h")
    if method == "endpoints":
        return float((loge[-1] - loge[0]) / (logh[-1] - logh[0]))
    if method == "lstsq":
        dh = logh - logh.mean()
        return float(dh @ (loge - loge.mean()) / (dh @ dh))
    raise ValueError(f"unknown fit method {method!r}")


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    h: float
    error: float


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    fitted_order: float
    status: str = "ok"  # "ok", "exact" or "insufficient data"

    def to_csv(self) -> str:
        lines = ["k,h,error"]
        lines += [f"{row.k},{row.h:.17g},{row.error:.17g}" for row in self.rows]
        return "\n".join(lines) + "\n"

    def order_line(self) -> str:
        if self.status == "ok":
            return f"order={self.fitted_order:.17g}"
        return f"order={self.status}"


def convergence_study(spec: BlendSpec, rect, F: Function2D, ks: Sequence[int],
                      samples_per_cell: int = DEFAULT_SAMPLES, method: str = "lstsq",
                      tail: int | None = None, workers: int | None = None) -> ConvergenceTable:
    ks = [int(k) for k in ks]
    if not ks or any(k < 1 for k in ks) or any(a >= b for a, b in zip(ks, ks[1:])):
        raise ValueError(f"ks must be strictly increasing positive integers, got {ks}")
    rect = Rect.checked(*rect)
    rows = []
    for k in ks:
        ps = fit_piecewise(spec, rect, F, k, k, workers=workers)
        rows.append(ConvergenceRow(k, (rect.b - rect.a) / k, sup_error(ps, F, samples_per_cell, workers)))
    if all(row.error <= EXACT_TOL for row in rows):
        return ConvergenceTable(tuple(rows), math.nan, "exact")
    try:
        order = fit_order([(row.h, row.error) for row in rows], method=method, tail=tail)
    except InsufficientData:
        return ConvergenceTable(tuple(rows), math.nan, "insufficient data")
    return ConvergenceTable(tuple(rows), order)
