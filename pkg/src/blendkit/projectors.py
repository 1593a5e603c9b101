"""Univariate quasi-interpolation projectors onto nested Bernstein subspaces.

The level-k projector uses a subset of the top-degree dual functionals,
those indexed by the level-k sequence alpha^k, and the basis of Pi_{m_k}
dual to that subset, D = B^{m_k} @ E(alpha^k, :)^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bernstein import BernsteinContext, elevation_matrix
from .linalg import inf_norm, inverse_of_rows
from .spec import BlendSpec, axis_index, index_sequences


@dataclass(frozen=True, eq=False)
class LevelProjector:
    level: int
    context_low: BernsteinContext
    context_high: BernsteinContext
    dual_coeff: np.ndarray = field(repr=False)
    selected_indices: tuple[int, ...]

    @property
    def degree(self) -> int:
        return self.context_low.degree

    @property
    def dual_coeff_norm(self) -> float:
        return inf_norm(self.dual_coeff)

    def functionals(self, high_samples) -> np.ndarray:
        """The selected top-degree functionals applied to samples at the top-degree nodes."""
        return self.context_high.dual(high_samples)[list(self.selected_indices)]

    def dual_basis(self, x) -> np.ndarray:
        return self.context_low.eval(x) @ self.dual_coeff

    def __call__(self, high_samples, x) -> np.ndarray:
        """Evaluate the projection of the sampled function at x."""
        return self.dual_basis(x) @ self.functionals(high_samples)


def build_projector(spec: BlendSpec, axis, k: int, interval: tuple[float, float] = (0.0, 1.0),
                    context_high: BernsteinContext | None = None) -> LevelProjector:
    degrees = spec.degrees(axis)
    if not 0 <= k <= spec.r:
        raise ValueError(f"level {k} outside 0..{spec.r}")
    seqs = index_sequences(spec)
    selected = (seqs.beta if axis_index(axis) else seqs.alpha)[k]
    a, b = interval
    high = context_high or BernsteinContext(degrees[-1], a, b)
    if k == spec.r:
        low = high
        A = np.eye(high.degree + 1)
    else:
        low = BernsteinContext(degrees[k], a, b)
        A = inverse_of_rows(elevation_matrix(low, high), selected)
    A.setflags(write=False)
    return LevelProjector(k, low, high, A, tuple(selected))


def project(proj: LevelProjector, high_samples) -> np.ndarray:
    """Coefficients of the projection in the dual basis D of level k."""
    return proj.functionals(high_samples)


def eval_dual_basis(proj: LevelProjector, x) -> np.ndarray:
    return proj.dual_basis(x)


def machine_bound(proj: LevelProjector) -> float:
    """Computable bound on ||P f||_inf / ||f||_inf over the interval.

    Uses ||mu_i f|| <= max_i ||row i of T^{-1}||_1 ||f||_inf for the
    uniform-node functionals and sum_i |D_i| <= (m_k + 1) ||A||_inf.
    """
    Tinv = proj.context_high.dual(np.eye(proj.context_high.degree + 1))
    functional_bound = np.abs(Tinv).sum(axis=1).max()
    return (proj.degree + 1) * proj.dual_coeff_norm * functional_bound
