"""Univariate Bernstein basis, uniform-node dual functionals and degree elevation."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import DegreeOrder, IntervalMismatch
from .linalg import LUFactor, lu_factor


def uniform_nodes(degree: int, a: float, b: float) -> np.ndarray:
    if degree == 0:
        return np.array([float(a)])
    return a + (np.arange(degree + 1) / degree) * (b - a)


def _basis(degree: int, a: float, b: float, binom: np.ndarray, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    t = (x - a) / (b - a)
    s = (b - x) / (b - a)
    i = np.arange(degree + 1)
    # direct binomial form: C(n, i) s^(n-i) t^i
    return binom * s[..., None] ** (degree - i) * t[..., None] ** i


@dataclass(frozen=True, eq=False)
class BernsteinContext:
    """Bernstein basis of a fixed degree on [a, b] with its collocation data.

    ``collocation[i, j] = B_j(nodes[i])`` with ``nodes`` uniform on [a, b].
    The dual functionals are lambda = samples . T^{-T}; they are applied by
    solving ``collocation @ v = samples`` with a factorization computed once.
    """

    degree: int
    a: float = 0.0
    b: float = 1.0
    nodes: np.ndarray = field(init=False, repr=False)
    collocation: np.ndarray = field(init=False, repr=False)
    collocation_factored: LUFactor = field(init=False, repr=False)
    _binom: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise ValueError(f"degree must be a non-negative integer, got {self.degree!r}")
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.b > self.a:
            raise ValueError(f"invalid interval [{self.a}, {self.b}]")
        set_ = object.__setattr__
        set_(self, "degree", int(self.degree))
        set_(self, "a", float(self.a))
        set_(self, "b", float(self.b))
        set_(self, "_binom", np.array([comb(self.degree, i) for i in range(self.degree + 1)], dtype=float))
        set_(self, "nodes", uniform_nodes(self.degree, self.a, self.b))
        T = self.eval(self.nodes)
        set_(self, "collocation", T)
        set_(self, "collocation_factored", lu_factor(T))

    @property
    def interval(self) -> tuple[float, float]:
        return (self.a, self.b)

    def eval(self, x) -> np.ndarray:
        """Basis values; shape ``np.shape(x) + (degree + 1,)``."""
        return _basis(self.degree, self.a, self.b, self._binom, x)

    def dual(self, samples) -> np.ndarray:
        """Apply the dual functionals to samples taken at ``nodes`` (axis 0)."""
        samples = np.asarray(samples, dtype=float)
        if samples.shape[0] != self.degree + 1:
            raise ValueError(f"expected {self.degree + 1} samples, got {samples.shape[0]}")
        return self.collocation_factored.solve(samples)


def bernstein_eval(ctx: BernsteinContext, x) -> np.ndarray:
    return ctx.eval(x)


def dual_apply(ctx: BernsteinContext, samples) -> np.ndarray:
    return ctx.dual(samples)


def elevation_matrix(low: BernsteinContext, high: BernsteinContext) -> np.ndarray:
    """Matrix E with B^low(x) = B^high(x) @ E.

    Column j holds the high-degree dual functionals applied to B_j^low.
    """
    if low.degree > high.degree:
        raise DegreeOrder(f"cannot elevate degree {low.degree} to {high.degree}")
    if low.interval != high.interval:
        raise IntervalMismatch(f"{low.interval} != {high.interval}")
    return high.dual(low.eval(high.nodes))
