import functools
import logging
from collections.abc import Mapping, Sequence

import numpy as np

from src.core.covariance.entities import CovarianceSequence
from src.core.covariance.services import covariances_from_mapping, sample_autocov
from src.core.kinds import CovarianceKind, PolicyFamily, Provenance, ScalarKind
from src.core.lattice.entities import FieldSample
from src.core.settings import DEFAULT_COND_LIMIT
from src.core.simulate.entities import GraphicalSpec, MAKernel, RadarModel
from src.core.simulate.exceptions import UnstableFilterError
from src.core.spectrum.entities import FrequencyGrid, SpectrumGrid, TruncationPolicy
from src.core.spectrum.exceptions import (
    GridMismatchError,
    NearSingularNodeError,
    SampleSizeError,
    SplitMismatchError,
    UnsupportedModelError,
)

logger = logging.getLogger(__name__)


def policy_eval(policy: TruncationPolicy, N: int) -> tuple[int, bool]:
    if N < 2:
        raise SampleSizeError(N)
    policy.check()
    n = min(max(policy.formula(N), 1), N - 1)
    return n, policy.consistent


@functools.lru_cache(maxsize=32)
def unit_roots(G: int) -> np.ndarray:
    """
    c[r] = exp(-2*pi*i*r/G) with c[G-r] = conj(c[r]) and the quarter turns exact
    """
    r = np.arange(G)
    roots = np.exp(-2j * np.pi * r / G)
    half = np.arange(1, (G + 1) // 2)
    roots[G - half] = np.conj(roots[half])
    roots[0] = 1.0
    if G % 2 == 0:
        roots[G // 2] = -1.0
    if G % 4 == 0:
        roots[G // 4] = -1j
        roots[3 * G // 4] = 1j
    roots.setflags(write=False)
    return roots


def twiddle_table(G: int, n: int) -> np.ndarray:
    """
    (G, 2n+1) table of exp(-i k theta_g), k = -n..n
    """
    g = np.arange(G)[:, None]
    k = np.arange(-n, n + 1)[None, :]
    return unit_roots(G)[np.mod(g * k, G)]


def hermitize(values: np.ndarray) -> np.ndarray:
    return (values + np.conj(np.swapaxes(values, -1, -2))) / 2


def conjugate_mirror_fill(values: np.ndarray, d: int) -> np.ndarray:
    """
    Overwrite node -g (mod G) with conj(values at g) for the canonically
    smaller of each pair, so that Phi(-theta) = conj(Phi(theta)) holds exactly
    """
    G = values.shape[0]
    mirror = np.mod(-np.arange(G), G)
    picker = np.ix_(*([mirror] * d))
    flat = np.arange(G**d).reshape((G,) * d)
    keep = flat <= flat[picker]
    mirrored = np.conj(values[picker])
    return np.where(keep[(...,) + (None, None)], values, mirrored)


def _finish(values: np.ndarray, d: int, scalar_kind: ScalarKind) -> np.ndarray:
    values = hermitize(values)
    if scalar_kind == ScalarKind.REAL:
        values = conjugate_mirror_fill(values, d)
    return values


def periodogram(
    covs: CovarianceSequence | Mapping[tuple[int, ...], np.ndarray],
    grid: FrequencyGrid,
) -> SpectrumGrid:
    """
    Phi(theta) = sum_{k in Lambda_n} R_k exp(-i <k, theta>) on every grid node.

    The sum is separable: one twiddle-table contraction per lattice axis.
    """
    if not isinstance(covs, CovarianceSequence):
        covs = covariances_from_mapping(covs)
    if covs.d != grid.d:
        raise GridMismatchError(f"covariances are {covs.d}-D, grid is {grid.d}-D")

    table = twiddle_table(grid.points_per_dim, covs.n)
    values = np.asarray(covs.values, dtype=np.complex128)
    for axis in range(covs.d):
        values = np.moveaxis(np.tensordot(table, values, axes=([1], [axis])), 0, axis)

    logger.debug("periodogram: n=%d G=%d d=%d", covs.n, grid.points_per_dim, grid.d)
    return SpectrumGrid(
        grid=grid,
        values=_finish(values, covs.d, covs.scalar_kind),
        provenance=(
            Provenance.EXACT if covs.kind == CovarianceKind.EXACT else Provenance.ESTIMATED
        ),
        scalar_kind=covs.scalar_kind,
    )


def dft_on_grid(x: np.ndarray, G: int, axes: Sequence[int] | None = None) -> np.ndarray:
    """
    X(theta_g) = sum_{t=1..N} x(t) exp(-i theta_g t) along each axis in `axes`.

    The sequence is folded modulo G before the FFT, so G may be smaller than N.
    """
    x = np.asarray(x)
    axes = range(x.ndim) if axes is None else axes
    roots = unit_roots(G)
    for axis in axes:
        length = x.shape[axis]
        pad = (-length) % G
        if pad:
            widths = [(0, 0)] * x.ndim
            widths[axis] = (0, pad)
            x = np.pad(x, widths)
        folded_shape = x.shape[:axis] + ((length + pad) // G, G) + x.shape[axis + 1 :]
        folded = x.reshape(folded_shape).sum(axis=axis)
        phase_shape = [1] * folded.ndim
        phase_shape[axis] = G
        x = np.fft.fft(folded, axis=axis) * roots.reshape(phase_shape)
    return x


def full_periodogram(y: FieldSample, grid: FrequencyGrid) -> SpectrumGrid:
    """
    Unwindowed biased periodogram N^{-d} Y(theta) Y(theta)^H
    """
    if y.d != grid.d:
        raise GridMismatchError(f"field is {y.d}-D, grid is {grid.d}-D")
    Y = dft_on_grid(y.data, grid.points_per_dim, axes=range(y.d))
    values = Y[..., :, None] * np.conj(Y[..., None, :]) / y.shape.size
    return SpectrumGrid(
        grid=grid,
        values=_finish(values, y.d, y.scalar_kind),
        provenance=Provenance.ESTIMATED,
        scalar_kind=y.scalar_kind,
    )


def truncated_periodogram(
    y: FieldSample,
    policy: TruncationPolicy,
    grid: FrequencyGrid,
    kind: CovarianceKind = CovarianceKind.BIASED,
    workers: int = 1,
) -> SpectrumGrid:
    n, _ = policy_eval(policy, y.shape.side)
    if policy.family == PolicyFamily.FULL and kind == CovarianceKind.BIASED:
        return full_periodogram(y, grid)
    return periodogram(sample_autocov(y, n, kind, workers), grid)


def cross_spectrum_blocks(
    spec: SpectrumGrid, split: tuple[int, int]
) -> tuple[SpectrumGrid, SpectrumGrid, SpectrumGrid]:
    """
    (Phi_y, Phi_yu, Phi_u) for z = (y, u); Phi_uy = Phi_yu^H is not returned
    """
    m_y, m_u = split
    if m_y < 1 or m_u < 1 or m_y + m_u != spec.channels:
        raise SplitMismatchError(tuple(split), spec.channels)
    values = spec.values
    return (
        spec.with_values(values[..., :m_y, :m_y]),
        spec.with_values(values[..., :m_y, m_y:], cross=True),
        spec.with_values(values[..., m_y:, m_y:]),
    )


def invert_spectrum(
    spec: SpectrumGrid, cond_limit: float = DEFAULT_COND_LIMIT
) -> SpectrumGrid:
    flat = spec.flat_values()
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.linalg.cond(flat)
    bad = ~np.isfinite(cond) | (cond > cond_limit)
    if bad.any():
        first = int(np.argmax(bad))
        raise NearSingularNodeError(spec.grid.node_theta(first), float(cond[first]))
    inverse = hermitize(np.linalg.inv(flat)).reshape(spec.values.shape)
    if spec.scalar_kind == ScalarKind.REAL:
        inverse = conjugate_mirror_fill(inverse, spec.grid.d)
    return spec.with_values(inverse)


def min_eigenvalue(spec: SpectrumGrid) -> float:
    """
    Smallest eigenvalue over all nodes; truncated estimates need not be >= 0
    """
    return float(np.linalg.eigvalsh(spec.flat_values()).min())


def spectrum_section(
    spec: SpectrumGrid, point: Sequence[float], axis: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Values along `axis` through the grid node nearest `point`: (theta, (G, m, m))
    """
    if not 0 <= axis < spec.grid.d:
        raise GridMismatchError(f"axis {axis} is outside a {spec.grid.d}-D grid")
    node = list(spec.grid.nearest_node(point))
    node[axis] = slice(None)
    return spec.grid.theta_1d(), spec.values[tuple(node)]


def _node_phases(grid: FrequencyGrid, sigma: Sequence[int]) -> np.ndarray:
    """
    exp(-i <sigma, theta_g>) over the grid
    """
    G = grid.points_per_dim
    roots = unit_roots(G)
    phase = np.ones(grid.node_shape, dtype=np.complex128)
    for axis, s in enumerate(sigma):
        shape = [1] * grid.d
        shape[axis] = G
        phase = phase * roots[np.mod(np.arange(G) * s, G)].reshape(shape)
    return phase


@functools.singledispatch
def exact_spectrum(model, grid: FrequencyGrid) -> SpectrumGrid:
    raise UnsupportedModelError(type(model).__name__)


@exact_spectrum.register
def _(model: MAKernel, grid: FrequencyGrid) -> SpectrumGrid:
    if model.d != grid.d:
        raise GridMismatchError(f"kernel is {model.d}-D, grid is {grid.d}-D")
    response = np.zeros(
        grid.node_shape + (model.outputs, model.inputs), dtype=np.complex128
    )
    for tap in model.sorted_taps():
        response += _node_phases(grid, tap.sigma)[..., None, None] * tap.matrix
    values = response @ np.conj(np.swapaxes(response, -1, -2))
    scalar_kind = ScalarKind.COMPLEX if model.is_complex else ScalarKind.REAL
    return SpectrumGrid(
        grid=grid,
        values=_finish(values, grid.d, scalar_kind),
        provenance=Provenance.EXACT,
        scalar_kind=scalar_kind,
    )


@exact_spectrum.register
def _(model: RadarModel, grid: FrequencyGrid) -> SpectrumGrid:
    """
    Phi(theta) = 1 / |1 - <alpha, exp(-i theta)>|^2 + lambda2
    """
    if grid.d != 3:
        raise GridMismatchError(f"the radar model needs a 3-D grid, got {grid.d}-D")
    if not model.is_stable:
        raise UnstableFilterError(f"sum of pole moduli {sum(model.rho)} is not below 1")
    alpha = model.alpha
    response = 1 - sum(
        alpha[axis] * _node_phases(grid, tuple(int(j == axis) for j in range(3)))
        for axis in range(3)
    )
    values = 1.0 / np.abs(response) ** 2 + model.lambda2
    return SpectrumGrid(
        grid=grid,
        values=values[..., None, None].astype(np.complex128),
        provenance=Provenance.EXACT,
    )


@exact_spectrum.register
def _(model: GraphicalSpec, grid: FrequencyGrid) -> SpectrumGrid:
    """
    Phi = (W^-H W^-1)^-1 with W^-1 evaluated entrywise from its sections
    """
    if grid.d != 1:
        raise GridMismatchError(f"graphical models live on a 1-D grid, got {grid.d}-D")
    w_inv = model.response(grid.theta_1d())
    precision = np.conj(np.swapaxes(w_inv, -1, -2)) @ w_inv
    real = all(s.is_real for row in model.sections for s in row if s is not None)
    scalar_kind = ScalarKind.REAL if real else ScalarKind.COMPLEX
    inverse = SpectrumGrid(
        grid=grid,
        values=_finish(precision, 1, scalar_kind),
        provenance=Provenance.EXACT,
        scalar_kind=scalar_kind,
    )
    return invert_spectrum(inverse)
