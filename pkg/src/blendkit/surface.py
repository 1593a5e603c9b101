"""Discretely blended Bernstein-Bezier quasi-interpolants on a rectangle.

The blended projector is the Boolean sum of the tensor projectors
P_{m_k} Q_{n_{r-k}}. It is evaluated in its reduced two-sum form

    B = sum_{k=0}^{r} P_{m_k} Q_{n_{r-k}} - sum_{k=0}^{r-1} P_{m_k} Q_{n_{r-k-1}}

with every tensor term reading its coefficients from one shared table
b[i, j] = (lambda_i x lambda_j) F of top-degree functionals restricted to
the quasi-uniform grid.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .bernstein import BernsteinContext
from .errors import InvalidSpec, NonFiniteSample, NotInGrid
from .projectors import LevelProjector, build_projector
from .spec import UNDEFINED, BlendSpec, QuasiUniformGrid, quasi_uniform_grid

Function2D = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Rect(NamedTuple):
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def checked(cls, a, b, c, d) -> "Rect":
        rect = cls(float(a), float(b), float(c), float(d))
        if not all(np.isfinite(rect)) or not (rect.b > rect.a and rect.d > rect.c):
            raise ValueError(f"invalid rectangle {tuple(rect)}")
        return rect


UNIT_SQUARE = Rect(0.0, 1.0, 0.0, 1.0)


def sample_function(F: Function2D, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Evaluate F on matching arrays, vectorized when F allows it."""
    try:
        with np.errstate(all="ignore"):
            Z = np.asarray(F(X, Y), dtype=float)
        if Z.shape != X.shape:
            Z = np.broadcast_to(Z, X.shape).astype(float)
    except (TypeError, ValueError):
        Z = np.array([float(F(u, v)) for u, v in zip(X.ravel(), Y.ravel())]).reshape(X.shape)
    return Z


@dataclass(frozen=True, eq=False)
class BlendedSpace:
    """Projectors, grid and top-degree functionals for one spec on one rectangle."""

    spec: BlendSpec
    rect: Rect = UNIT_SQUARE
    grid: QuasiUniformGrid = field(init=False, repr=False)
    x_projectors: tuple[LevelProjector, ...] = field(init=False, repr=False)
    y_projectors: tuple[LevelProjector, ...] = field(init=False, repr=False)

    def __post_init__(self):
        rect = Rect.checked(*self.rect)
        object.__setattr__(self, "rect", rect)
        object.__setattr__(self, "grid", quasi_uniform_grid(self.spec))
        xs = BernsteinContext(self.spec.m[-1], rect.a, rect.b)
        ys = BernsteinContext(self.spec.n[-1], rect.c, rect.d)
        r = self.spec.r
        object.__setattr__(self, "x_projectors", tuple(
            build_projector(self.spec, "first", k, (rect.a, rect.b), xs) for k in range(r + 1)))
        object.__setattr__(self, "y_projectors", tuple(
            build_projector(self.spec, "second", k, (rect.c, rect.d), ys) for k in range(r + 1)))

    @property
    def x_context(self) -> BernsteinContext:
        return self.x_projectors[-1].context_high

    @property
    def y_context(self) -> BernsteinContext:
        return self.y_projectors[-1].context_high

    def terms(self):
        """(sign, x-level, y-level) for the 2r+1 tensor terms of the two-sum form."""
        r = self.spec.r
        out = [(1, k, r - k) for k in range(r + 1)]
        out += [(-1, k, r - k - 1) for k in range(r)]
        return out

    def sample(self, F: Function2D) -> np.ndarray:
        X, Y = np.meshgrid(self.x_context.nodes, self.y_context.nodes, indexing="ij")
        Z = sample_function(F, X, Y)
        if not np.all(np.isfinite(Z)):
            i, j = np.argwhere(~np.isfinite(Z))[0]
            raise NonFiniteSample(f"F({X[i, j]!r}, {Y[i, j]!r}) is not finite")
        return Z

    def functional_table(self, samples: np.ndarray) -> np.ndarray:
        """Full (m_r+1) x (n_r+1) table of lambda_i x lambda_j applied to tensor samples."""
        rows = self.x_context.dual(samples)
        return self.y_context.dual(rows.T).T

    def fit(self, F: Function2D) -> "BlendedSurface":
        table = self.functional_table(self.sample(F))
        mask = np.zeros_like(table, dtype=bool)
        for i, j in self.grid.points:
            mask[i, j] = True
        return BlendedSurface(self, np.where(mask, table, np.nan))

    def from_coeffs(self, coeffs: dict) -> "BlendedSurface":
        mr, nr = self.spec.m[-1], self.spec.n[-1]
        table = np.full((mr + 1, nr + 1), np.nan)
        if set(coeffs) != set(self.grid.points):
            raise InvalidSpec("coefficients must be given exactly on the quasi-uniform grid")
        for (i, j), value in coeffs.items():
            table[i, j] = float(value)
        return BlendedSurface(self, table)

    def dual_basis_eval(self, i: int, j: int, u, v) -> np.ndarray:
        """Phi_{i,j}(u, v): the element of the blended dual basis attached to (i, j)."""
        if (i, j) not in self.grid.points:
            raise NotInGrid(f"({i}, {j}) is not a grid point of {self.spec}")
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        total = np.zeros(np.broadcast(u, v).shape)
        for sign, k, l in self.terms():
            p = self.grid.inverse_alpha[k][i]
            q = self.grid.inverse_beta[l][j]
            if p == UNDEFINED or q == UNDEFINED:
                continue
            total = total + sign * self.x_projectors[k].dual_basis(u)[..., p] * self.y_projectors[l].dual_basis(v)[..., q]
        return total


@dataclass(frozen=True, eq=False)
class BlendedSurface:
    """A fitted blended quasi-interpolant.

    ``table`` holds b[i, j] on grid points and NaN elsewhere.
    """

    space: BlendedSpace
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.table.setflags(write=False)

    @property
    def spec(self) -> BlendSpec:
        return self.space.spec

    @property
    def rect(self) -> Rect:
        return self.space.rect

    @property
    def grid(self) -> QuasiUniformGrid:
        return self.space.grid

    @property
    def coeffs(self) -> dict[tuple[int, int], float]:
        return {(i, j): float(self.table[i, j]) for (i, j) in self.grid.sorted_points()}

    def _term_coeffs(self, k: int, l: int) -> np.ndarray:
        seqs = self.grid.sequences
        return self.table[np.ix_(seqs.alpha[k], seqs.beta[l])]

    def term_values(self, u, v) -> list[tuple[int, int, int, np.ndarray]]:
        """Per-term values (sign, k, l, P_{m_k} Q_{n_l} F(u, v)) before summation."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        out = []
        for sign, k, l in self.space.terms():
            Du = self.space.x_projectors[k].dual_basis(u)
            Dv = self.space.y_projectors[l].dual_basis(v)
            val = np.einsum("...i,ij,...j->...", Du, self._term_coeffs(k, l), Dv)
            out.append((sign, k, l, val))
        return out

    def __call__(self, u, v):
        vals = sum(sign * val for sign, _, _, val in self.term_values(u, v))
        return float(vals) if np.ndim(vals) == 0 else vals

    evaluate = __call__

    def evaluate_grid(self, us, vs) -> np.ndarray:
        """Values on the tensor grid us x vs, shape (len(us), len(vs))."""
        us = np.asarray(us, dtype=float)
        vs = np.asarray(vs, dtype=float)
        out = np.zeros((us.size, vs.size))
        for sign, k, l in self.space.terms():
            Du = self.space.x_projectors[k].dual_basis(us)
            Dv = self.space.y_projectors[l].dual_basis(vs)
            out += sign * (Du @ self._term_coeffs(k, l) @ Dv.T)
        return out

    def dual_basis_form(self, u, v):
        """Sum of b[i, j] Phi_{i,j}(u, v); slower reference form of evaluation."""
        total = 0.0
        for (i, j), b in self.coeffs.items():
            total = total + b * self.space.dual_basis_eval(i, j, u, v)
        return total

    def control_net(self) -> list[tuple[int, int, float, float, float]]:
        xs = self.space.x_context.nodes
        ys = self.space.y_context.nodes
        return [(i, j, float(xs[i]), float(ys[j]), b) for (i, j), b in self.coeffs.items()]

    def to_dict(self) -> dict:
        return {
            "spec": {"m": list(self.spec.m), "n": list(self.spec.n)},
            "domain": list(self.rect),
            "coeffs": [[i, j, b] for (i, j), b in self.coeffs.items()],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "BlendedSurface":
        try:
            spec = BlendSpec.from_json(obj["spec"])
            rect = Rect.checked(*obj["domain"])
            coeffs = {(int(i), int(j)): float(b) for i, j, b in obj["coeffs"]}
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidSpec):
                raise
            raise InvalidSpec(f"malformed surface document: {exc}") from exc
        return BlendedSpace(spec, rect).from_coeffs(coeffs)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def fit(spec: BlendSpec, rect, F: Function2D) -> BlendedSurface:
    return BlendedSpace(spec, Rect(*rect)).fit(F)


def evaluate(surface: BlendedSurface, u, v):
    return surface(u, v)


def dual_basis_eval(surface: BlendedSurface | BlendedSpace, i: int, j: int, u, v):
    space = surface.space if isinstance(surface, BlendedSurface) else surface
    val = space.dual_basis_eval(i, j, u, v)
    return float(val) if np.ndim(val) == 0 else val


def control_net(surface: BlendedSurface):
    return surface.control_net()


def fmt(x: float) -> str:
    return format(x, ".17g")


def control_net_csv(surface: BlendedSurface) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "x", "y", "b"])
    for i, j, x, y, b in surface.control_net():
        w.writerow([i, j, fmt(x), fmt(y), fmt(b)])
    return buf.getvalue()
