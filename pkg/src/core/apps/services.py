import logging

import numpy as np

from src.core.apps.entities import GraphTopology, PeakEstimate, TransferFunctionEstimate
from src.core.apps.exceptions import (
    AllNodesUndefinedError,
    HorizonTooLongError,
    InvalidThresholdError,
    ScalarSpectrumRequiredError,
    TooManyUndefinedNodesError,
    TransferInputError,
    UnknownEntryNormError,
)
from src.core.kinds import CovarianceKind, EntryNorm, TransferMethod
from src.core.lattice.entities import FieldSample
from src.core.settings import DEFAULT_COND_LIMIT, DEFAULT_FLOOR
from src.core.spectrum.entities import FrequencyGrid, SpectrumGrid, TruncationPolicy
from src.core.spectrum.services import (
    cross_spectrum_blocks,
    dft_on_grid,
    invert_spectrum,
    policy_eval,
    truncated_periodogram,
)

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE: float = 1e-6
MAX_UNDEFINED_FRACTION: float = 0.1


def _check_io(u: np.ndarray, y: np.ndarray, grid: FrequencyGrid) -> None:
    if u.ndim != 1 or u.shape != y.shape:
        raise TransferInputError(
            f"u and y must be 1-D of equal length, got {u.shape} and {y.shape}"
        )
    if grid.d != 1:
        raise TransferInputError("estimates need a 1-D grid")


def _ratio(
    numerator: np.ndarray, denominator: np.ndarray, floor: float
) -> tuple[np.ndarray, np.ndarray]:
    scale = float(np.max(np.abs(denominator), initial=0.0))
    if scale == 0.0:
        raise AllNodesUndefinedError()
    defined = np.abs(denominator) > floor * scale
    values = np.full(denominator.shape, np.nan, dtype=np.complex128)
    values[defined] = numerator[defined] / denominator[defined]
    return values, defined


def etfe_raw(
    u, y, grid: FrequencyGrid, floor: float = DEFAULT_FLOOR
) -> TransferFunctionEstimate:
    """
    G(theta) = Y_N(theta) / U_N(theta); nodes where |U_N| is below
    floor * max|U_N| are left undefined
    """
    u, y = np.asarray(u), np.asarray(y)
    _check_io(u, y, grid)
    G = grid.points_per_dim
    values, defined = _ratio(dft_on_grid(y, G), dft_on_grid(u, G), floor)
    return TransferFunctionEstimate(
        grid=grid, values=values, defined=defined, method=TransferMethod.RAW
    )


def etfe_smoothed(
    u,
    y,
    policy: TruncationPolicy,
    grid: FrequencyGrid,
    floor: float = DEFAULT_FLOOR,
    workers: int = 1,
) -> TransferFunctionEstimate:
    """
    G(theta) = Phi_yu(theta) / Phi_u(theta) from the truncated periodogram of z = (y, u)
    """
    u, y = np.asarray(u), np.asarray(y)
    _check_io(u, y, grid)
    z = FieldSample.from_array(np.stack([y, u], axis=-1))
    n, _ = policy_eval(policy, len(u))
    joint = truncated_periodogram(z, policy, grid, CovarianceKind.BIASED, workers)
    _, phi_yu, phi_u = cross_spectrum_blocks(joint, (1, 1))
    values, defined = _ratio(phi_yu.values[:, 0, 0], phi_u.values[:, 0, 0], floor)
    return TransferFunctionEstimate(
        grid=grid,
        values=values,
        defined=defined,
        method=TransferMethod.SMOOTHED,
        policy=policy,
        n=n,
    )


def impulse_from_tf(tf: TransferFunctionEstimate, horizon: int) -> np.ndarray:
    """
    g(t) = (1/G) sum_g G(theta_g) exp(i theta_g t) for t = 0..horizon.

    Undefined nodes are filled by periodic linear interpolation in g.
    """
    G = tf.grid.points_per_dim
    if horizon < 0 or G < horizon + 1:
        raise HorizonTooLongError(horizon, G)
    undefined = tf.undefined_count
    if undefined >= MAX_UNDEFINED_FRACTION * G:
        raise TooManyUndefinedNodesError(undefined, G)

    values = np.array(tf.values)
    if undefined:
        index = np.arange(G)
        known, missing = index[tf.defined], index[~tf.defined]
        values[missing] = np.interp(
            missing, known, tf.values[known].real, period=G
        ) + 1j * np.interp(missing, known, tf.values[known].imag, period=G)

    g = np.fft.ifft(values)[: horizon + 1]
    scale = max(float(np.max(np.abs(g))), 1e-300)
    residue = float(np.max(np.abs(g.imag)))
    if residue > IMAGINARY_TOLERANCE * scale:
        logger.warning(
            "impulse_from_tf: imaginary residue %.3e exceeds %.0e relative; discarded",
            residue / scale,
            IMAGINARY_TOLERANCE,
        )
    return g.real.copy()


def entry_norms(spec: SpectrumGrid, norm: EntryNorm = EntryNorm.L1) -> np.ndarray:
    """
    m x m matrix of function norms of each entry over the grid
    """
    magnitude = np.abs(spec.flat_values())
    match norm:
        case EntryNorm.L1:
            return magnitude.sum(axis=0) * spec.grid.spacing**spec.grid.d
        case EntryNorm.L1_MEAN:
            return magnitude.mean(axis=0)
        case EntryNorm.SUP:
            return magnitude.max(axis=0)
    raise UnknownEntryNormError(norm)


def relative_threshold(
    spec: SpectrumGrid,
    fraction: float = 0.05,
    norm: EntryNorm = EntryNorm.L1,
    cond_limit: float = DEFAULT_COND_LIMIT,
    zero_tol: float = 1e-8,
) -> float:
    """
    fraction times the mean norm of the non-zero entries of spec^-1, each
    unordered pair {i, j} (diagonal included) counted once
    """
    norms = entry_norms(invert_spectrum(spec, cond_limit), norm)
    norms = norms[np.triu_indices(spec.channels)]
    nonzero = norms[norms > zero_tol * norms.max()]
    return float(fraction * nonzero.mean())


def graph_topology(
    spec: SpectrumGrid,
    threshold: float,
    norm: EntryNorm = EntryNorm.L1,
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> GraphTopology:
    """
    Edge {i, j} iff the norm of (spec^-1)_ij over the grid is >= threshold
    """
    if threshold < 0:
        raise InvalidThresholdError(threshold)
    norms = entry_norms(invert_spectrum(spec, cond_limit), norm)
    m = spec.channels
    edges = {
        (i + 1, j + 1)
        for i in range(m)
        for j in range(i + 1, m)
        if norms[i, j] >= threshold
    }
    return GraphTopology(m=m, edges=edges)


def radar_peak(spec: SpectrumGrid) -> PeakEstimate:
    """
    Grid argmax of the real part; the lowest canonical index wins ties
    """
    if spec.channels != 1:
        raise ScalarSpectrumRequiredError(spec.channels)
    surface = spec.flat_values()[:, 0, 0].real
    best = int(np.argmax(surface))
    node = np.unravel_index(best, spec.grid.node_shape)
    return PeakEstimate(
        omega_hat=spec.grid.node_theta(best),
        value=float(surface[best]),
        node=tuple(int(g) for g in node),
        degenerate=bool(np.all(surface == surface[best])),
    )
