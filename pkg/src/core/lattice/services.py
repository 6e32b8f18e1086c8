import itertools
from collections.abc import Iterator, Sequence

import numpy as np

from src.core.lattice.entities import BlockShape, LagIndex
from src.core.lattice.exceptions import (
    EmptyIndexSetError,
    InvalidLagWindowError,
    LagDimensionError,
    LagWindowOverflowError,
)


def _components(k: LagIndex | Sequence[int]) -> tuple[int, ...]:
    if isinstance(k, LagIndex):
        return k.components
    return tuple(int(c) for c in k)


def _extents(N: int | Sequence[int] | BlockShape, d: int) -> tuple[int, ...]:
    if isinstance(N, BlockShape):
        extents = N.extents
    elif isinstance(N, (int, np.integer)):
        extents = (int(N),) * d
    else:
        extents = tuple(int(extent) for extent in N)
    if len(extents) != d:
        raise LagDimensionError(len(extents), d)
    return extents


def window_size(n: int, d: int) -> int:
    if n < 0 or d < 1:
        raise InvalidLagWindowError(n, d)
    count = (2 * n + 1) ** d
    if count > np.iinfo(np.intp).max:
        raise LagWindowOverflowError(n, d)
    return count


def lag_array(n: int, d: int) -> np.ndarray:
    """
    All k with max_j |k_j| <= n as rows of an integer array, lexicographic order
    """
    window_size(n, d)
    grid = np.indices((2 * n + 1,) * d).reshape(d, -1).T
    return grid - n


def lag_window(n: int, d: int) -> list[LagIndex]:
    return [LagIndex(components=tuple(int(c) for c in row)) for row in lag_array(n, d)]


def half_lag_array(n: int, d: int) -> np.ndarray:
    """
    Rows of lag_array in the lexicographic half space (k = 0 included)
    """
    lags = lag_array(n, d)
    first_nonzero = np.argmax(lags != 0, axis=1)
    leading = lags[np.arange(len(lags)), first_nonzero]
    return lags[leading >= 0]


def lag_position(k: LagIndex | Sequence[int], n: int) -> tuple[int, ...]:
    """
    Position of lag k inside a dense (2n+1)^d lag array
    """
    return tuple(c + n for c in _components(k))


def index_count(N: int | Sequence[int] | BlockShape, k: LagIndex | Sequence[int]) -> int:
    components = _components(k)
    extents = _extents(N, len(components))
    if any(abs(c) >= extent for c, extent in zip(components, extents)):
        raise EmptyIndexSetError(components, extents)
    return int(np.prod([extent - abs(c) for c, extent in zip(components, extents)]))


def index_set(
    N: int | Sequence[int] | BlockShape, k: LagIndex | Sequence[int]
) -> tuple[Iterator[tuple[int, ...]], int]:
    """
    Summation points t (1-based) such that t and t + k both lie in the block.

    Per component: 1 <= t_j <= N - k_j when k_j >= 0, -k_j + 1 <= t_j <= N otherwise.
    """
    components = _components(k)
    extents = _extents(N, len(components))
    count = index_count(extents, components)
    ranges = [
        range(1, extent - c + 1) if c >= 0 else range(-c + 1, extent + 1)
        for c, extent in zip(components, extents)
    ]
    return itertools.product(*ranges), count


def index_slices(
    extents: Sequence[int], k: LagIndex | Sequence[int]
) -> tuple[tuple[slice, ...], tuple[slice, ...]]:
    """
    Zero-based array slices selecting y(t + k) and y(t) over the index set of k
    """
    components = _components(k)
    extents = _extents(extents, len(components))
    if any(abs(c) >= extent for c, extent in zip(components, extents)):
        raise EmptyIndexSetError(components, extents)
    lead, base = [], []
    for c, extent in zip(components, extents):
        if c >= 0:
            lead.append(slice(c, extent))
            base.append(slice(0, extent - c))
        else:
            lead.append(slice(0, extent + c))
            base.append(slice(-c, extent))
    return tuple(lead), tuple(base)
