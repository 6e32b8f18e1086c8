import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.covariance.services import exact_ma_autocov, sample_autocov
from src.core.kinds import NoiseKind, Provenance, ScalarKind
from src.core.lattice.entities import BlockShape, FieldSample
from src.core.simulate.entities import MAKernel, RadarModel
from src.core.simulate.exceptions import UnstableFilterError
from src.core.simulate.services import REFERENCE_RADAR_OMEGA, five_node_wspec, gen_noise
from src.core.spectrum.entities import FrequencyGrid, SpectrumGrid, TruncationPolicy
from src.core.spectrum.exceptions import (
    GridMismatchError,
    InvalidPolicyError,
    NearSingularNodeError,
    SampleSizeError,
    SplitMismatchError,
    UnsupportedModelError,
)
from src.core.spectrum.services import (
    conjugate_mirror_fill,
    cross_spectrum_blocks,
    dft_on_grid,
    exact_spectrum,
    full_periodogram,
    invert_spectrum,
    min_eigenvalue,
    periodogram,
    policy_eval,
    spectrum_section,
    truncated_periodogram,
    unit_roots,
)


@pytest.mark.parametrize(
    "policy, N, n, consistent",
    [
        (TruncationPolicy.cube_root(), 1000, 10, True),
        (TruncationPolicy.cube_root(), 2, 1, True),
        (TruncationPolicy.linear_fraction(0.01), 1000, 10, False),
        (TruncationPolicy.power(1, 0.48), 10**6, 758, True),
        (TruncationPolicy.power(1, 0.5), 10**6, 1000, False),
        (TruncationPolicy.power(0.01, 0.1), 10, 1, True),
        (TruncationPolicy.constant(10), 5, 4, False),
        (TruncationPolicy.full(), 64, 63, False),
    ],
)
def test_policy_eval(policy, N, n, consistent):
    assert policy_eval(policy, N) == (n, consistent)


def test_policy_eval_rejects_bad_input():
    with pytest.raises(SampleSizeError):
        policy_eval(TruncationPolicy.cube_root(), 1)
    with pytest.raises(InvalidPolicyError):
        policy_eval(TruncationPolicy.power(-1.0, 0.3), 100)
    with pytest.raises(InvalidPolicyError):
        policy_eval(TruncationPolicy.constant(0), 100)


def test_policy_text_forms():
    policy = TruncationPolicy.parse("power:1,0.48")
    assert policy == TruncationPolicy.power(1, 0.48)
    assert policy.label == "power:1,0.48"
    assert policy.slug == "power_1_0.48"
    assert TruncationPolicy.parse("constant:7").n0 == 7
    assert TruncationPolicy.parse("full").label == "full"


@pytest.mark.parametrize("text", ["power:1", "bogus", "cube-root:3", "constant:x"])
def test_policy_text_errors(text):
    with pytest.raises(ValidationError):
        TruncationPolicy.parse(text)


def test_grid_nodes_are_row_major():
    grid = FrequencyGrid(d=2, points_per_dim=3)
    nodes = grid.nodes()
    assert nodes.shape == (9, 2)
    assert np.allclose(nodes[1], [0.0, 2 * math.pi / 3])
    assert grid.node_theta(3) == pytest.approx((2 * math.pi / 3, 0.0))
    assert grid.nearest_node((2 * math.pi - 0.01, 2.0)) == (0, 1)


def test_unit_roots_are_conjugate_symmetric():
    roots = unit_roots(12)
    assert roots[6] == -1
    assert roots[3] == -1j
    assert all(roots[12 - r] == np.conj(roots[r]) for r in range(1, 12))


def test_periodogram_of_short_sequence():
    grid = FrequencyGrid(d=1, points_per_dim=8)
    spec = periodogram({(0,): 1.25, (1,): 0.5, (-1,): 0.5}, grid)

    assert spec.provenance == Provenance.EXACT
    assert spec.values[0, 0, 0] == pytest.approx(2.25)
    assert spec.values[4, 0, 0] == pytest.approx(0.25)
    assert np.all(np.abs(spec.values.imag) < 1e-15)


def test_periodogram_of_three_samples():
    y = FieldSample.from_array(np.array([[1.0], [2.0], [3.0]]))
    grid = FrequencyGrid(d=1, points_per_dim=16)

    truncated = truncated_periodogram(y, TruncationPolicy.constant(2), grid)
    full = truncated_periodogram(y, TruncationPolicy.full(), grid)

    assert truncated.values[0, 0, 0].real == pytest.approx(12.0)
    assert full.values[0, 0, 0].real == pytest.approx(12.0)
    assert truncated.provenance == Provenance.ESTIMATED


def test_white_kernel_has_identity_spectrum():
    grid = FrequencyGrid(d=2, points_per_dim=5)
    spec = exact_spectrum(MAKernel.identity(3, 2), grid)
    assert np.allclose(spec.values, np.eye(3), rtol=0, atol=1e-15)
    assert spec.scalar_kind == ScalarKind.REAL


@pytest.mark.parametrize("G", [4, 7, 32])
def test_full_window_periodogram_matches_dft(G):
    y = gen_noise(BlockShape.cube(7, 2), 2, NoiseKind.CIRCULAR_COMPLEX, seed=3)
    grid = FrequencyGrid(d=2, points_per_dim=G)

    from_dft = full_periodogram(y, grid)
    from_lags = periodogram(sample_autocov(y, 6), grid)

    assert np.allclose(from_dft.values, from_lags.values, rtol=0, atol=1e-12)


def test_dft_on_grid_is_one_based():
    x = np.random.default_rng(5).standard_normal(11) + 0j
    G = 4
    theta = 2 * np.pi * np.arange(G) / G
    t = np.arange(1, 12)
    expected = np.exp(-1j * np.outer(theta, t)) @ x
    assert np.allclose(dft_on_grid(x, G), expected, rtol=0, atol=1e-12)


def test_exact_ma_covariances_reproduce_exact_spectrum():
    kernel = MAKernel.model_validate(
        {
            "d": 2,
            "taps": [
                [[0, 0], [[1.0, 0.2], [0.0, 1.0]]],
                [[1, -1], [["0.5+0.5j", 0.0], [0.3, "-0.2j"]]],
            ],
        }
    )
    grid = FrequencyGrid(d=2, points_per_dim=9)
    lagged = periodogram(exact_ma_autocov(kernel, 2), grid)
    direct = exact_spectrum(kernel, grid)
    assert np.allclose(lagged.values, direct.values, rtol=0, atol=1e-12)


def test_real_field_spectrum_is_mirror_conjugate():
    y = gen_noise(BlockShape.cube(9, 2), 2, NoiseKind.REAL_GAUSSIAN, seed=6)
    grid = FrequencyGrid(d=2, points_per_dim=8)
    spec = truncated_periodogram(y, TruncationPolicy.constant(3), grid)

    mirror = np.mod(-np.arange(8), 8)
    flipped = spec.values[np.ix_(mirror, mirror)]
    assert np.array_equal(flipped, np.conj(spec.values))


def test_conjugate_mirror_fill_keeps_canonical_half():
    values = np.arange(4, dtype=np.complex128).reshape(4, 1, 1) * (1 + 1j)
    filled = conjugate_mirror_fill(values, 1)
    assert filled[:, 0, 0].tolist() == [0, 1 + 1j, 2 + 2j, 1 - 1j]


def test_periodogram_dimension_mismatch():
    covs = exact_ma_autocov(MAKernel.identity(), 0)
    with pytest.raises(GridMismatchError):
        periodogram(covs, FrequencyGrid(d=2, points_per_dim=4))


def test_spectrum_grid_rejects_non_hermitian_values():
    grid = FrequencyGrid(d=1, points_per_dim=2)
    values = np.array([[[1.0, 1.0], [0.0, 1.0]]] * 2)
    with pytest.raises(ValidationError):
        SpectrumGrid(grid=grid, values=values, provenance=Provenance.EXACT)
    cross = SpectrumGrid(
        grid=grid, values=values, provenance=Provenance.EXACT, cross=True
    )
    assert cross.channels == 2


def test_cross_spectrum_blocks_split():
    grid = FrequencyGrid(d=1, points_per_dim=4)
    z = gen_noise(BlockShape(extents=(40,)), 3, NoiseKind.REAL_GAUSSIAN, seed=1)
    spec = truncated_periodogram(z, TruncationPolicy.constant(3), grid)

    phi_y, phi_yu, phi_u = cross_spectrum_blocks(spec, (2, 1))
    assert phi_y.values.shape == (4, 2, 2)
    assert phi_yu.values.shape == (4, 2, 1)
    assert phi_yu.cross
    assert phi_u.values.shape == (4, 1, 1)
    assert np.array_equal(phi_yu.values, spec.values[..., :2, 2:])
    with pytest.raises(SplitMismatchError):
        cross_spectrum_blocks(spec, (2, 2))


def test_invert_scaled_identity():
    grid = FrequencyGrid(d=2, points_per_dim=3)
    values = np.broadcast_to(2 * np.eye(2), grid.node_shape + (2, 2))
    spec = SpectrumGrid(grid=grid, values=values, provenance=Provenance.EXACT)

    inverse = invert_spectrum(spec)
    expected = np.broadcast_to(0.5 * np.eye(2), values.shape)
    assert np.array_equal(inverse.values, expected)
    assert min_eigenvalue(spec) == pytest.approx(2.0)


def test_invert_reports_the_singular_node():
    grid = FrequencyGrid(d=1, points_per_dim=4)
    values = np.stack([np.eye(2), np.eye(2), np.zeros((2, 2)), np.eye(2)])
    spec = SpectrumGrid(grid=grid, values=values, provenance=Provenance.EXACT)

    with pytest.raises(NearSingularNodeError) as error:
        invert_spectrum(spec)
    assert error.value.theta == pytest.approx((math.pi,))


def test_invert_respects_condition_limit():
    grid = FrequencyGrid(d=1, points_per_dim=2)
    values = np.broadcast_to(np.diag([1.0, 1e-8]), (2, 2, 2))
    spec = SpectrumGrid(grid=grid, values=values, provenance=Provenance.EXACT)
    assert invert_spectrum(spec).values[0, 1, 1].real == pytest.approx(1e8)
    with pytest.raises(NearSingularNodeError):
        invert_spectrum(spec, cond_limit=1e6)


def test_spectrum_section_follows_one_axis():
    grid = FrequencyGrid(d=2, points_per_dim=4)
    values = np.arange(16, dtype=np.float64).reshape(4, 4, 1, 1)
    spec = SpectrumGrid(grid=grid, values=values, provenance=Provenance.EXACT)

    theta, section = spectrum_section(spec, (math.pi / 2, 0.0), axis=1)
    assert np.allclose(theta, grid.theta_1d())
    assert section[:, 0, 0].real.tolist() == [4.0, 5.0, 6.0, 7.0]
    with pytest.raises(GridMismatchError):
        spectrum_section(spec, (0.0, 0.0), axis=2)


def test_radar_spectrum_peaks_at_the_pole_angles():
    model = RadarModel(rho=(0.3, 0.3, 0.3), omega=REFERENCE_RADAR_OMEGA, lambda2=2.0)
    spec = exact_spectrum(model, FrequencyGrid(d=3, points_per_dim=64))

    peak = np.unravel_index(np.argmax(spec.values[..., 0, 0].real), (64, 64, 64))
    assert tuple(int(g) for g in peak) == (26, 11, 29)
    assert spec.values[..., 0, 0].real.min() > 2.0


def test_radar_spectrum_needs_stability_and_three_dimensions():
    unstable = RadarModel(rho=(0.5, 0.3, 0.3), omega=(0.0, 0.0, 0.0), lambda2=1.0)
    with pytest.raises(UnstableFilterError):
        exact_spectrum(unstable, FrequencyGrid(d=3, points_per_dim=4))
    stable = RadarModel(rho=(0.1, 0.1, 0.1), omega=(0.0, 0.0, 0.0), lambda2=1.0)
    with pytest.raises(GridMismatchError):
        exact_spectrum(stable, FrequencyGrid(d=2, points_per_dim=4))


def test_five_node_precision_is_sparse():
    grid = FrequencyGrid(d=1, points_per_dim=64)
    spec = exact_spectrum(five_node_wspec(), grid)
    precision = invert_spectrum(spec).values
    scale = np.max(np.abs(precision))

    edges = {(0, 3), (1, 2), (2, 4)}
    for i in range(5):
        for j in range(i + 1, 5):
            largest = np.max(np.abs(precision[:, i, j]))
            if (i, j) in edges:
                assert largest > 1e-3 * scale
            else:
                assert largest < 1e-8 * scale


def test_exact_spectrum_of_unknown_model():
    with pytest.raises(UnsupportedModelError):
        exact_spectrum(object(), FrequencyGrid(d=1, points_per_dim=4))
