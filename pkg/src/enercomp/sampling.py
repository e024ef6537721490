"""Quasi-random and stratified sampling of the design space.

Two generators feed the data pipeline: the canonical (unscrambled,
seedless) Sobol sequence for training data, so the same design points are
reproducible on every machine, and seeded Latin hypercube sampling for test
data. Both map unit-cube points affinely onto the engineering ranges of a
:class:`~enercomp.design.ParameterSpace`; integer-valued parameters are
rounded to the nearest integer in range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .design import DesignConfig, ParameterSpace


class SobolCapabilityError(ValueError):
    """Requested dimension exceeds the shipped direction-number table."""


@dataclass(frozen=True)
class SamplePlan:
    scheme: Literal["sobol", "lhs"]
    count: int
    seed: int | None = None  # lhs only; sobol is canonical and seedless

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.scheme == "lhs" and self.seed is None:
            raise ValueError("lhs plan requires a seed")


# Primitive polynomials (bit-encoded, leading and trailing 1 included) and
# initial direction numbers for Sobol dimensions 2..40, after Joe & Kuo's
# published table. Dimension 1 uses m_k = 1 for all k.
_SOBOL_TABLE: list[tuple[int, list[int]]] = [
    (3, [1]),
    (7, [1, 3]),
    (11, [1, 3, 1]),
    (13, [1, 1, 1]),
    (19, [1, 1, 3, 3]),
    (25, [1, 3, 5, 13]),
    (37, [1, 1, 5, 5, 17]),
    (41, [1, 1, 5, 5, 5]),
    (47, [1, 1, 7, 11, 19]),
    (55, [1, 1, 5, 1, 1]),
    (59, [1, 1, 1, 3, 11]),
    (61, [1, 3, 5, 5, 31]),
    (67, [1, 3, 3, 9, 7, 49]),
    (91, [1, 1, 1, 15, 21, 21]),
    (97, [1, 3, 1, 13, 27, 49]),
    (103, [1, 1, 1, 15, 7, 5]),
    (109, [1, 3, 1, 15, 13, 25]),
    (115, [1, 1, 5, 5, 19, 61]),
    (131, [1, 3, 7, 11, 23, 15, 103]),
    (137, [1, 3, 7, 13, 13, 15, 69]),
    (143, [1, 1, 3, 13, 7, 35, 63]),
    (145, [1, 3, 5, 9, 1, 25, 53]),
    (157, [1, 3, 1, 13, 9, 35, 107]),
    (167, [1, 3, 1, 5, 27, 61, 31]),
    (171, [1, 1, 5, 11, 19, 41, 61]),
    (185, [1, 3, 5, 3, 3, 13, 69]),
    (191, [1, 1, 7, 13, 1, 19, 1]),
    (193, [1, 3, 7, 5, 13, 19, 59]),
    (203, [1, 1, 3, 9, 25, 29, 41]),
    (211, [1, 3, 5, 13, 23, 1, 55]),
    (213, [1, 3, 7, 3, 13, 59, 17]),
    (229, [1, 3, 1, 3, 5, 53, 69]),
    (239, [1, 1, 5, 5, 23, 33, 13]),
    (241, [1, 1, 7, 7, 1, 61, 123]),
    (247, [1, 1, 7, 9, 13, 61, 49]),
    (253, [1, 3, 3, 5, 3, 55, 33]),
    (285, [1, 3, 1, 15, 31, 13, 49, 245]),
    (299, [1, 3, 5, 15, 31, 59, 63, 97]),
    (301, [1, 3, 1, 11, 11, 11, 77, 249]),
]

MAX_SOBOL_DIM = 1 + len(_SOBOL_TABLE)
_SOBOL_BITS = 30  # supports 2^30 - 1 points, far beyond the 2^20 precondition


def _direction_numbers(dim: int) -> np.ndarray:
    """Integer direction numbers v[j][k], k = 1.._SOBOL_BITS, scaled by 2^BITS."""
    if dim > MAX_SOBOL_DIM:
        raise SobolCapabilityError(
            f"sobol supports up to {MAX_SOBOL_DIM} dimensions, requested {dim}")
    v = np.zeros((dim, _SOBOL_BITS + 1), dtype=np.uint64)
    for k in range(1, _SOBOL_BITS + 1):
        v[0, k] = 1 << (_SOBOL_BITS - k)
    for j in range(1, dim):
        poly, m_init = _SOBOL_TABLE[j - 1]
        s = poly.bit_length() - 1
        m = list(m_init)
        for k in range(s, _SOBOL_BITS):
            new = m[k - s] ^ (m[k - s] << s)
            for i in range(1, s):
                if (poly >> (s - i)) & 1:
                    new ^= m[k - i] << i
            m.append(new)
        for k in range(1, _SOBOL_BITS + 1):
            v[j, k] = np.uint64(m[k - 1] << (_SOBOL_BITS - k))
    return v


def sobol_unit(dim: int, count: int) -> np.ndarray:
    """First ``count`` points of the canonical Sobol sequence in [0,1)^dim.

    The all-zero leading point of the raw sequence is skipped, so the
    first returned point in one dimension is 0.5. Gray-code construction;
    deterministic, no seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > 2 ** 20:
        raise ValueError("count must be <= 2^20")
    v = _direction_numbers(dim)
    out = np.empty((count, dim), dtype=np.float64)
    x = np.zeros(dim, dtype=np.uint64)
    scale = float(1 << _SOBOL_BITS)
    for i in range(count):
        # index i+1 of the raw sequence; c = 1 + trailing ones of i
        c, ii = 1, i
        while ii & 1:
            ii >>= 1
            c += 1
        x ^= v[:, c]
        out[i] = x / scale
    return out


def lhs_unit(dim: int, count: int, seed: int) -> np.ndarray:
    """Seeded Latin hypercube in [0,1)^dim: per dimension, exactly one
    point in each of ``count`` equal-width strata."""
    rng = np.random.default_rng(seed)
    out = np.empty((count, dim), dtype=np.float64)
    for j in range(dim):
        perm = rng.permutation(count)
        jitter = rng.random(count)
        out[:, j] = (perm + jitter) / count
    return out


def scale_to_space(unit: np.ndarray, space: ParameterSpace) -> np.ndarray:
    lows = np.array([r.low for r in space], dtype=np.float64)
    highs = np.array([r.high for r in space], dtype=np.float64)
    return lows + unit * (highs - lows)


def _to_configs(unit: np.ndarray, space: ParameterSpace, **fixed) -> list[DesignConfig]:
    values = scale_to_space(unit, space)
    return [space.to_config(row, **fixed) for row in values]


def sobol_samples(space: ParameterSpace, count: int, **fixed) -> list[DesignConfig]:
    """Deterministic Sobol designs over the space; ``fixed`` overrides fields."""
    return _to_configs(sobol_unit(len(space), count), space, **fixed)


def lhs_samples(space: ParameterSpace, count: int, seed: int, **fixed) -> list[DesignConfig]:
    """Seeded Latin hypercube designs over the space."""
    return _to_configs(lhs_unit(len(space), count, seed), space, **fixed)


def samples_for(plan: SamplePlan, space: ParameterSpace, **fixed) -> list[DesignConfig]:
    if plan.scheme == "sobol":
        return sobol_samples(space, plan.count, **fixed)
    return lhs_samples(space, plan.count, plan.seed, **fixed)


def star_discrepancy_2d(points: np.ndarray) -> float:
    """Star discrepancy of 2D points, evaluated on the grid of anchored
    boxes spanned by the point coordinates. Exact enough to compare
    sequences; O(n^3)."""
    pts = np.asarray(points)
    n = len(pts)
    xs = np.unique(np.append(pts[:, 0], 1.0))
    ys = np.unique(np.append(pts[:, 1], 1.0))
    worst = 0.0
    for x in xs:
        inx = pts[:, 0] < x
        for y in ys:
            frac = np.count_nonzero(inx & (pts[:, 1] < y)) / n
            worst = max(worst, abs(frac - x * y))
    return worst
