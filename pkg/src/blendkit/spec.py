"""Degree sequences, lower sets, quasi-uniform grids and derived constants.

A blended space is a sum of tensor product polynomial spaces

    Pi_{m_0} x Pi_{n_r} + Pi_{m_1} x Pi_{n_{r-1}} + ... + Pi_{m_r} x Pi_{n_0}

described by two strictly increasing degree sequences ``m`` and ``n`` of the
same length. Building quasi-interpolants additionally requires each entry to
divide the next one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, InvalidSpec, NotIncreasing

UNDEFINED = -1


def _as_ints(seq, name: str) -> tuple[int, ...]:
    out = []
    for v in seq:
        if isinstance(v, bool) or int(v) != v:
            raise InvalidSpec(f"{name} must contain integers, got {v!r}")
        if v < 0:
            raise InvalidSpec(f"{name} must be non-negative, got {v}")
        out.append(int(v))
    return tuple(out)


def axis_index(axis) -> int:
    """0 for the first (x) axis, 1 for the second (y) axis."""
    if axis in ("first", "x", 0):
        return 0
    if axis in ("second", "y", 1):
        return 1
    raise ValueError(f"unknown axis {axis!r}")


def _check_increasing(m: Sequence[int], n: Sequence[int]) -> None:
    if len(m) == 0 or len(n) == 0:
        raise EmptyInput("degree sequences must be non-empty")
    if len(m) != len(n):
        raise InvalidSpec(f"m and n differ in length ({len(m)} vs {len(n)})")
    for name, s in (("m", m), ("n", n)):
        if any(s[k] >= s[k + 1] for k in range(len(s) - 1)):
            raise NotIncreasing(f"{name}={list(s)} is not strictly increasing")


def _divides(a: int, b: int) -> bool:
    return a == 0 or b % a == 0


@dataclass(frozen=True)
class BlendSpec:
    """Validated pair of degree sequences with the divisibility chain."""

    m: tuple[int, ...]
    n: tuple[int, ...]

    def __post_init__(self):
        m = _as_ints(self.m, "m")
        n = _as_ints(self.n, "n")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        _check_increasing(m, n)
        for name, s in (("m", m), ("n", n)):
            for k in range(len(s) - 1):
                if not _divides(s[k], s[k + 1]):
                    raise InvalidSpec(f"{name}[{k}]={s[k]} does not divide {name}[{k + 1}]={s[k + 1]}")

    @property
    def r(self) -> int:
        return len(self.m) - 1

    def degrees(self, axis) -> tuple[int, ...]:
        return self.n if axis_index(axis) else self.m

    def to_json(self) -> str:
        return json.dumps({"m": list(self.m), "n": list(self.n)})

    @classmethod
    def from_json(cls, text: str | dict) -> "BlendSpec":
        obj = json.loads(text) if isinstance(text, str) else text
        try:
            return cls(tuple(obj["m"]), tuple(obj["n"]))
        except (KeyError, TypeError) as exc:
            raise InvalidSpec(f"malformed spec object: {obj!r}") from exc

    def __str__(self):
        return f"m={list(self.m)} n={list(self.n)}"


def normalize_sequences(m: Sequence[int], n: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Strictly increasing sequences spanning the same space as (m, n).

    The summands are the pairs (m_k, n_{r-k}). A pair is redundant when
    another pair dominates it in both degrees; what survives is the Pareto
    front, which sorted by m-degree has strictly decreasing n-degree.
    """
    if len(m) == 0 or len(n) == 0:
        raise EmptyInput("degree sequences must be non-empty")
    if len(m) != len(n):
        raise InvalidSpec(f"m and n differ in length ({len(m)} vs {len(n)})")
    m = _as_ints(m, "m")
    n = _as_ints(n, "n")
    r = len(m) - 1
    best: dict[int, int] = {}
    for k in range(r + 1):
        best[m[k]] = max(best.get(m[k], -1), n[r - k])
    kept = []
    ceiling = -1
    for mk in sorted(best, reverse=True):
        if best[mk] > ceiling:
            kept.append((mk, best[mk]))
            ceiling = best[mk]
    kept.reverse()
    m_hat = tuple(p[0] for p in kept)
    n_hat = tuple(p[1] for p in reversed(kept))
    return m_hat, n_hat


def elevate_to_divisible(m: Sequence[int]) -> tuple[int, ...]:
    """Smallest-step repair of a strictly increasing sequence into a divisibility chain.

    >>> elevate_to_divisible([2, 3, 5, 7])
    (2, 4, 8, 16)
    """
    m = _as_ints(m, "m")
    if not m:
        raise EmptyInput("empty degree sequence")
    if any(m[k] >= m[k + 1] for k in range(len(m) - 1)):
        raise NotIncreasing(f"{list(m)} is not strictly increasing")
    if m[0] == 0:
        return (0,) + (elevate_to_divisible(m[1:]) if len(m) > 1 else ())
    out = [m[0]]
    for target in m[1:]:
        prev = out[-1]
        need = max(target, prev + 1)
        out.append(-(-need // prev) * prev)
    return tuple(out)


def dimension(m: Sequence[int], n: Sequence[int]) -> int:
    """Dimension of the blended space; sum of (m_k - m_{k-1}) (n_{r-k} + 1)."""
    m = _as_ints(m, "m")
    n = _as_ints(n, "n")
    _check_increasing(m, n)
    r = len(m) - 1
    total = 0
    prev = -1
    for k in range(r + 1):
        total += (m[k] - prev) * (n[r - k] + 1)
        prev = m[k]
    return total


@dataclass(frozen=True)
class LowerSet:
    points: frozenset

    def __len__(self):
        return len(self.points)

    def is_downward_closed(self) -> bool:
        return all(
            (i2, j2) in self.points for (i, j) in self.points for i2 in range(i + 1) for j2 in range(j + 1)
        )


def lower_set_from_pairs(pairs: Iterable[tuple[int, int]]) -> LowerSet:
    """Union of the boxes [0..a] x [0..b] over the given degree pairs."""
    pts = set()
    for a, b in pairs:
        pts.update((i, j) for i in range(a + 1) for j in range(b + 1))
    return LowerSet(frozenset(pts))


def lower_set(m: Sequence[int], n: Sequence[int]) -> LowerSet:
    m = _as_ints(m, "m")
    n = _as_ints(n, "n")
    _check_increasing(m, n)
    r = len(m) - 1
    return lower_set_from_pairs((m[k], n[r - k]) for k in range(r + 1))


def _level_sequence(d: int, top: int) -> tuple[int, ...]:
    if d == 0:
        return (0,)
    step = top // d
    return tuple(i * step for i in range(d + 1))


@dataclass(frozen=True)
class IndexSequences:
    alpha: tuple[tuple[int, ...], ...]
    beta: tuple[tuple[int, ...], ...]


def index_sequences(spec: BlendSpec) -> IndexSequences:
    """alpha[k][i] = i m_r / m_k and beta[k][j] = j n_r / n_k."""
    mr, nr = spec.m[-1], spec.n[-1]
    return IndexSequences(
        alpha=tuple(_level_sequence(mk, mr) for mk in spec.m),
        beta=tuple(_level_sequence(nk, nr) for nk in spec.n),
    )


def _inverse_table(seq: Sequence[int], size: int) -> np.ndarray:
    table = np.full(size, UNDEFINED, dtype=int)
    table[list(seq)] = np.arange(len(seq))
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class QuasiUniformGrid:
    """The index set G of the blended space with per-level inverse index maps.

    ``inverse_alpha[k][v]`` is the position of ``v`` in ``alpha[k]`` or
    UNDEFINED (-1) when ``v`` is not a level-k index.
    """

    spec: BlendSpec
    sequences: IndexSequences
    points: frozenset
    inverse_alpha: tuple[np.ndarray, ...] = field(repr=False)
    inverse_beta: tuple[np.ndarray, ...] = field(repr=False)

    def __len__(self):
        return len(self.points)

    def __contains__(self, ij) -> bool:
        return tuple(ij) in self.points

    def sorted_points(self) -> list[tuple[int, int]]:
        return sorted(self.points)

    def level_of_x(self, i: int) -> int:
        """Coarsest level whose alpha sequence contains i."""
        return next(k for k, inv in enumerate(self.inverse_alpha) if inv[i] != UNDEFINED)

    def level_of_y(self, j: int) -> int:
        return next(k for k, inv in enumerate(self.inverse_beta) if inv[j] != UNDEFINED)


def quasi_uniform_grid(spec: BlendSpec) -> QuasiUniformGrid:
    seqs = index_sequences(spec)
    r = spec.r
    pts = set()
    for k in range(r + 1):
        pts.update((i, j) for i in seqs.alpha[k] for j in seqs.beta[r - k])
    mr, nr = spec.m[-1], spec.n[-1]
    return QuasiUniformGrid(
        spec=spec,
        sequences=seqs,
        points=frozenset(pts),
        inverse_alpha=tuple(_inverse_table(a, mr + 1) for a in seqs.alpha),
        inverse_beta=tuple(_inverse_table(b, nr + 1) for b in seqs.beta),
    )


def _hierarchical_order(levels: Sequence[Sequence[int]]) -> list[int]:
    out = list(levels[0])
    for k in range(1, len(levels)):
        seen = set(levels[k - 1])
        out.extend(v for v in levels[k] if v not in seen)
    return out


def permutation_check(spec: BlendSpec) -> bool:
    """True when (alpha, beta) maps the lower set bijectively onto the grid.

    alpha concatenates alpha^0 with the successive set differences
    alpha^{k+1} - alpha^k (beta likewise).
    """
    seqs = index_sequences(spec)
    alpha = _hierarchical_order(seqs.alpha)
    beta = _hierarchical_order(seqs.beta)
    lower = lower_set(spec.m, spec.n)
    image = {(alpha[i], beta[j]) for (i, j) in lower.points}
    return len(image) == len(lower) and image == quasi_uniform_grid(spec).points


def predicted_order(m: Sequence[int], n: Sequence[int]) -> int:
    """min over k = 0..r+1 of m_{k-1} + n_{r-k} + 2, with m_{-1} = n_{-1} = -1."""
    m = _as_ints(m, "m")
    n = _as_ints(n, "n")
    _check_increasing(m, n)
    r = len(m) - 1
    mm = (-1,) + m
    nn = (-1,) + n
    return min(mm[k] + nn[r - k + 1] + 2 for k in range(r + 2))


def stability_factor(spec: BlendSpec, axis: str, k: int) -> float:
    """(d_k + 1) * ||E(sel_k, :)^{-1}||_inf for the level-k projector on ``axis``.

    Multiplied by the (non-computable) bound on the top-degree dual
    functionals this bounds the norm of the level-k projector.
    """
    from .projectors import build_projector

    if not 0 <= k <= spec.r:
        raise ValueError(f"level {k} outside 0..{spec.r}")
    proj = build_projector(spec, axis, k)
    return (proj.degree + 1) * proj.dual_coeff_norm
