import hashlib
import logging

import numpy as np
from scipy import signal

from src.core.kinds import FilterMode, NoiseKind, ScalarKind
from src.core.lattice.entities import BlockShape, FieldSample
from src.core.settings import DEFAULT_BURN_IN
from src.core.simulate.entities import (
    EtfeDataset,
    GraphicalSpec,
    MAKernel,
    RadarModel,
    RationalSection1D,
)
from src.core.simulate.exceptions import (
    FilterDimensionError,
    InvalidNoiseRatioError,
    UnstableFilterError,
)

logger = logging.getLogger(__name__)

REFERENCE_RADAR_OMEGA: tuple[float, float, float] = (2.58, 1.07, 2.88)
RUNGE_TAPS: int = 2000


def mix_seed(*parts) -> int:
    """
    Stable 64-bit seed from arbitrary parts (blake2b of their text form)
    """
    text = ":".join(str(part) for part in parts).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def make_rng(seed: int) -> np.random.Generator:
    """
    Counter-based Philox stream; identical seeds give identical draws
    """
    return np.random.Generator(np.random.Philox(seed))


def draw_noise(
    rng: np.random.Generator, size: tuple[int, ...], kind: NoiseKind
) -> np.ndarray:
    if kind == NoiseKind.REAL_GAUSSIAN:
        return rng.standard_normal(size)
    real = rng.standard_normal(size)
    imag = rng.standard_normal(size)
    return (real + 1j * imag) / np.sqrt(2.0)


def gen_noise(shape: BlockShape, p: int, kind: NoiseKind, seed: int) -> FieldSample:
    if p < 1:
        raise FilterDimensionError("noise needs at least one channel")
    data = draw_noise(make_rng(seed), shape.extents + (p,), kind)
    scalar_kind = (
        ScalarKind.REAL if kind == NoiseKind.REAL_GAUSSIAN else ScalarKind.COMPLEX
    )
    return FieldSample(shape=shape, channels=p, scalar_kind=scalar_kind, data=data)


def ma_filter(kernel: MAKernel, noise: FieldSample, margin: bool = False) -> FieldSample:
    """
    y(t) = sum_sigma M(sigma) e(t - sigma).

    Without margin e is zero outside the noise block and the output has the
    noise block's shape. With margin the noise block must already be enlarged
    by the kernel span; the output is the part fed entirely by genuine noise.
    """
    if noise.channels != kernel.inputs:
        raise FilterDimensionError(
            f"noise has {noise.channels} channels, kernel expects {kernel.inputs}"
        )
    if noise.d != kernel.d:
        raise FilterDimensionError(f"noise is {noise.d}-D, kernel is {kernel.d}-D")

    extents = noise.shape.extents
    low, high = kernel.span()
    if margin:
        out_extents = tuple(e - (h - l) for e, l, h in zip(extents, low, high))
        if any(extent < 1 for extent in out_extents):
            raise FilterDimensionError("noise block is smaller than the kernel span")
    else:
        out_extents = extents

    complex_out = noise.is_complex or kernel.is_complex
    y = np.zeros(
        out_extents + (kernel.outputs,),
        dtype=np.complex128 if complex_out else np.float64,
    )
    for tap in kernel.sorted_taps():
        out_slices, in_slices = [], []
        for sigma, extent, out_extent, top in zip(tap.sigma, extents, out_extents, high):
            if margin:
                out_slices.append(slice(0, out_extent))
                in_slices.append(slice(top - sigma, top - sigma + out_extent))
            elif sigma >= 0:
                out_slices.append(slice(sigma, extent))
                in_slices.append(slice(0, max(extent - sigma, 0)))
            else:
                out_slices.append(slice(0, max(extent + sigma, 0)))
                in_slices.append(slice(-sigma, extent))
        y[tuple(out_slices)] += noise.data[tuple(in_slices)] @ tap.matrix.T

    return FieldSample.from_array(
        y, ScalarKind.COMPLEX if complex_out else ScalarKind.REAL
    )


def gen_ma_field(
    kernel: MAKernel, shape: BlockShape, seed: int, kind: NoiseKind | None = None
) -> FieldSample:
    """
    MA field on `shape` driven by noise drawn on a block enlarged by the kernel span
    """
    if kind is None:
        kind = NoiseKind.CIRCULAR_COMPLEX if kernel.is_complex else NoiseKind.REAL_GAUSSIAN
    low, high = kernel.span()
    enlarged = BlockShape(
        extents=tuple(e + h - l for e, l, h in zip(shape.extents, low, high))
    )
    noise = gen_noise(enlarged, kernel.inputs, kind, seed)
    return ma_filter(kernel, noise, margin=True)


def rational_filter_1d(
    section: RationalSection1D,
    x: np.ndarray,
    mode: FilterMode = FilterMode.FORWARD,
    burn_in: int = 0,
) -> np.ndarray:
    """
    First-order recursion for H(z) (forward) or 1/H(z) (inverse) from zero initial state.
    The first `burn_in` outputs are dropped.
    """
    if mode == FilterMode.FORWARD:
        if abs(section.pole) >= 1:
            raise UnstableFilterError(f"pole {section.pole} is not inside the unit circle")
        b, a = section.numerator(), section.denominator()
    else:
        if section.delay > 0:
            raise UnstableFilterError("a delayed section has no causal inverse")
        if section.gain == 0:
            raise UnstableFilterError("a zero-gain section cannot be inverted")
        if abs(section.zero) >= 1:
            raise UnstableFilterError(f"zero {section.zero} is not inside the unit circle")
        b, a = section.inverse_coefficients()
    return signal.lfilter(b, a, np.asarray(x))[burn_in:]


def gen_graphical_field(
    wspec: GraphicalSpec,
    N: int,
    seed: int,
    burn_in: int = DEFAULT_BURN_IN,
    noise_std: float = 1.0,
) -> FieldSample:
    """
    Solve W^-1(z) y = e by back-substitution, last row first
    """
    m = wspec.m
    length = N + burn_in
    e = noise_std * make_rng(seed).standard_normal((length, m))
    real = all(s.is_real for row in wspec.sections for s in row if s is not None)
    y = np.zeros((length, m), dtype=np.float64 if real else np.complex128)

    for i in reversed(range(m)):
        drive = e[:, i].astype(y.dtype)
        for j in range(i + 1, m):
            section = wspec.sections[i][j]
            if section is not None:
                drive = drive - rational_filter_1d(section, y[:, j], FilterMode.FORWARD)
        y[:, i] = rational_filter_1d(wspec.sections[i][i], drive, FilterMode.INVERSE)

    logger.debug("graphical field: m=%d N=%d burn_in=%d seed=%d", m, N, burn_in, seed)
    return FieldSample.from_array(
        y[burn_in:], ScalarKind.REAL if real else ScalarKind.COMPLEX
    )


def radar_recursion(alpha: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    y(t) = a1 y(t - e1) + a2 y(t - e2) + a3 y(t - e3) + v(t), y = 0 outside the block.

    Sweeps anti-diagonal planes t1 + t2 = s; along t3 each line is a scalar
    first-order recursion.
    """
    alpha = np.asarray(alpha, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    n1, n2, _ = v.shape
    y = np.zeros_like(v)
    for s in range(n1 + n2 - 1):
        i = np.arange(max(0, s - n2 + 1), min(s, n1 - 1) + 1)
        j = s - i
        drive = v[i, j, :].copy()
        up = i > 0
        drive[up] += alpha[0] * y[i[up] - 1, j[up], :]
        left = j > 0
        drive[left] += alpha[1] * y[i[left], j[left] - 1, :]
        y[i, j, :] = signal.lfilter([1.0], [1.0, -alpha[2]], drive, axis=-1)
    return y


def gen_radar_field(model: RadarModel, N: int | BlockShape, seed: int) -> FieldSample:
    if not model.is_stable:
        raise UnstableFilterError(f"sum of pole moduli {sum(model.rho)} is not below 1")
    shape = N if isinstance(N, BlockShape) else BlockShape.cube(N, 3)
    if shape.d != 3:
        raise FilterDimensionError("the radar model lives on a 3-D lattice")

    rng = make_rng(seed)
    v = draw_noise(rng, shape.extents, NoiseKind.CIRCULAR_COMPLEX)
    w = np.sqrt(model.lambda2) * draw_noise(rng, shape.extents, NoiseKind.CIRCULAR_COMPLEX)
    y = radar_recursion(model.alpha, v) + w
    return FieldSample.from_array(y[..., None], ScalarKind.COMPLEX)


def gen_etfe_dataset(
    g: np.ndarray,
    input_filter: RationalSection1D,
    N: int,
    noise_ratio: float,
    seed: int,
) -> EtfeDataset:
    """
    u: filtered white noise from rest; y = g * u + v with std(v) = noise_ratio * max|g * u|
    """
    if noise_ratio < 0:
        raise InvalidNoiseRatioError(noise_ratio)
    rng = make_rng(seed)
    u = rational_filter_1d(input_filter, rng.standard_normal(N), FilterMode.FORWARD)
    y_clean = signal.convolve(u, np.asarray(g))[:N]
    peak = float(np.max(np.abs(y_clean)))
    noise_std = noise_ratio * peak
    y = y_clean + noise_std * rng.standard_normal(N)
    return EtfeDataset(u=u, y=y, noise_std=noise_std, peak=peak)


def runge_impulse_response(length: int = RUNGE_TAPS) -> np.ndarray:
    """
    g(t) = 1 / (1 + 25 ((t - 20) / 20)^2), t = 0 .. length - 1
    """
    t = np.arange(length, dtype=np.float64)
    return 1.0 / (1.0 + 25.0 * ((t - 20.0) / 20.0) ** 2)


def lowpass_input_section() -> RationalSection1D:
    """
    H(z) = (z + 0.35) / (z - 0.45)
    """
    return RationalSection1D(zero=-0.35, pole=0.45, gain=1.0)


def five_node_wspec() -> GraphicalSpec:
    """
    Five-node network with edges {1,4}, {2,3}, {3,5}
    """
    s = RationalSection1D
    return GraphicalSpec(
        sections=(
            (s(zero=0.6, pole=-0.5), None, None, s(zero=-0.2, pole=0.3), None),
            (None, s(zero=0.0, pole=0.3), s(zero=0.0, pole=-0.5, delay=1), None, None),
            (None, None, s(zero=-0.7, pole=0.3), None, s(zero=-0.3, pole=0.3)),
            (None, None, None, s(zero=-0.1, pole=-0.5), None),
            (None, None, None, None, s(zero=-0.1, pole=0.1)),
        )
    )
