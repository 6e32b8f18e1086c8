import logging
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.core.covariance.entities import CovarianceSequence
from src.core.covariance.exceptions import (
    CovarianceKindError,
    IncompleteLagWindowError,
    NegativeTruncationError,
    TruncationTooLargeError,
)
from src.core.kinds import CovarianceKind, ScalarKind
from src.core.lattice.entities import FieldSample
from src.core.lattice.services import (
    half_lag_array,
    index_count,
    index_slices,
    lag_position,
)
from src.core.simulate.entities import MAKernel

logger = logging.getLogger(__name__)

_CHUNK_ROWS = 1 << 14


def _outer_products(lead: np.ndarray, base: np.ndarray) -> np.ndarray:
    """
    Per row, the parts of lead(t) base(t)^H: shape (rows, 1, m, m) for real
    data, (rows, 2, m, m) holding real and imaginary parts for complex data.
    Complex products are formed in real arithmetic.
    """
    if not np.iscomplexobj(lead):
        return (lead[:, :, None] * base[:, None, :])[:, None]
    ar, ai = lead.real[:, :, None], lead.imag[:, :, None]
    br, bi = base.real[:, None, :], base.imag[:, None, :]
    real = ar * br + ai * bi
    imag = ai * br - ar * bi
    return np.stack([real, imag], axis=1)


def lagged_sum(lead: np.ndarray, base: np.ndarray) -> np.ndarray:
    """
    sum_t lead(t) base(t)^H accumulated strictly in row order
    """
    m = lead.shape[1]
    parts = 2 if np.iscomplexobj(lead) else 1
    total = np.zeros((parts, m, m))
    for start in range(0, len(lead), _CHUNK_ROWS):
        products = _outer_products(
            lead[start : start + _CHUNK_ROWS], base[start : start + _CHUNK_ROWS]
        )
        total = np.cumsum(np.concatenate([total[None], products]), axis=0)[-1]
    return total


def _scaled(total: np.ndarray, denominator: int) -> np.ndarray:
    if total.shape[0] == 1:
        return total[0] / denominator
    out = np.empty(total.shape[1:], dtype=np.complex128)
    out.real = total[0] / denominator
    out.imag = total[1] / denominator
    return out


def _mirror_fill(values: np.ndarray, half_lags: np.ndarray, n: int) -> None:
    for k in half_lags:
        pos = lag_position(k, n)
        neg = lag_position(-k, n)
        if pos == neg:
            values[pos] = (values[pos] + values[pos].conj().T) / 2
        else:
            values[neg] = values[pos].conj().T


def sample_autocov(
    y: FieldSample,
    n: int,
    kind: CovarianceKind = CovarianceKind.BIASED,
    workers: int = 1,
) -> CovarianceSequence:
    """
    R_k = (1/D) sum_{t in Xi_{N,k}} y(t+k) y(t)^H with D = N_k (unbiased) or N^d (biased).

    Only the lexicographic half window is summed; R_{-k} is set to R_k^H.
    """
    if kind == CovarianceKind.EXACT:
        raise CovarianceKindError(kind)
    side = y.shape.side
    if n < 0:
        raise NegativeTruncationError(n)
    if n > side - 1:
        raise TruncationTooLargeError(n, side)

    extents = y.shape.extents
    half_lags = half_lag_array(n, y.d)
    total_points = y.shape.size

    def estimate(k: np.ndarray) -> np.ndarray:
        lead, base = index_slices(extents, k)
        total = lagged_sum(
            y.data[lead].reshape(-1, y.channels), y.data[base].reshape(-1, y.channels)
        )
        denominator = (
            index_count(extents, k) if kind == CovarianceKind.UNBIASED else total_points
        )
        return _scaled(total, denominator)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            estimates = list(executor.map(estimate, half_lags))
    else:
        estimates = [estimate(k) for k in half_lags]

    values = np.zeros(
        (2 * n + 1,) * y.d + (y.channels, y.channels),
        dtype=np.complex128 if y.is_complex else np.float64,
    )
    for k, matrix in zip(half_lags, estimates):
        values[lag_position(k, n)] = matrix
    _mirror_fill(values, half_lags, n)

    logger.debug(
        "sample_autocov: kind=%s n=%d extents=%s m=%d", kind, n, extents, y.channels
    )
    return CovarianceSequence(
        n=n,
        d=y.d,
        channels=y.channels,
        kind=kind,
        scalar_kind=y.scalar_kind,
        values=values,
        source_extents=extents,
    )


def exact_ma_autocov(kernel: MAKernel, n: int) -> CovarianceSequence:
    """
    R_k = sum_sigma M(sigma + k) M(sigma)^H for unit-variance white input
    """
    if n < 0:
        raise NegativeTruncationError(n)
    taps = {tap.sigma: tap.matrix for tap in kernel.sorted_taps()}
    m = kernel.outputs
    dtype = np.complex128 if kernel.is_complex else np.float64
    half_lags = half_lag_array(n, kernel.d)

    values = np.zeros((2 * n + 1,) * kernel.d + (m, m), dtype=dtype)
    for k in half_lags:
        total = np.zeros((m, m), dtype=dtype)
        for sigma, matrix in taps.items():
            shifted = tuple(int(s + c) for s, c in zip(sigma, k))
            if shifted in taps:
                total = total + taps[shifted] @ matrix.conj().T
        values[lag_position(k, n)] = total
    _mirror_fill(values, half_lags, n)

    return CovarianceSequence(
        n=n,
        d=kernel.d,
        channels=m,
        kind=CovarianceKind.EXACT,
        scalar_kind=ScalarKind.COMPLEX if kernel.is_complex else ScalarKind.REAL,
        values=values,
    )


def covariances_from_mapping(
    matrices: Mapping[tuple[int, ...], np.ndarray],
    kind: CovarianceKind = CovarianceKind.EXACT,
    source_extents: tuple[int, ...] | None = None,
) -> CovarianceSequence:
    """
    Dense sequence from a {lag: matrix} mapping that covers a full window
    max_j |k_j| <= n. Missing negative lags are filled as R_{-k} = R_k^H.
    """
    if not matrices:
        raise IncompleteLagWindowError((0,), 0)
    lags = [tuple(int(c) for c in k) for k in matrices]
    d = len(lags[0])
    n = max(abs(c) for k in lags for c in k)
    first = np.atleast_2d(np.asarray(next(iter(matrices.values()))))
    is_complex = any(np.iscomplexobj(np.asarray(v)) for v in matrices.values())
    values = np.zeros(
        (2 * n + 1,) * d + first.shape,
        dtype=np.complex128 if is_complex else np.float64,
    )
    stored = dict(zip(lags, matrices.values()))
    half_lags = half_lag_array(n, d)
    for k in half_lags:
        key = tuple(int(c) for c in k)
        if key in stored:
            values[lag_position(key, n)] = np.atleast_2d(stored[key])
        elif tuple(-c for c in key) in stored:
            mirror = np.atleast_2d(stored[tuple(-c for c in key)])
            values[lag_position(key, n)] = mirror.conj().T
        else:
            raise IncompleteLagWindowError(key, n)
    _mirror_fill(values, half_lags, n)
    return CovarianceSequence(
        n=n,
        d=d,
        channels=first.shape[0],
        kind=kind,
        scalar_kind=ScalarKind.COMPLEX if is_complex else ScalarKind.REAL,
        values=values,
        source_extents=source_extents,
    )
