"""
Property-based checks of the estimator identities
"""

import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from src.core.apps.services import graph_topology, radar_peak
from src.core.covariance.entities import lag_mirror
from src.core.covariance.services import sample_autocov
from src.core.kinds import CovarianceKind, PolicyFamily, Provenance
from src.core.lattice.entities import FieldSample
from src.core.lattice.services import index_count
from src.core.spectrum.entities import FrequencyGrid, SpectrumGrid, TruncationPolicy
from src.core.spectrum.services import (
    invert_spectrum,
    periodogram,
    policy_eval,
    truncated_periodogram,
)

values = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def fields(draw, d: int, max_side: int = 6, max_channels: int = 2):
    extents = tuple(draw(st.integers(2, max_side)) for _ in range(d))
    m = draw(st.integers(1, max_channels))
    return FieldSample.from_array(draw(arrays(np.float64, extents + (m,), elements=values)))


@st.composite
def policies(draw):
    family = draw(st.sampled_from(PolicyFamily.list()))
    return TruncationPolicy(
        family=family,
        a=draw(st.floats(0.01, 5.0)),
        b=draw(st.floats(0.0, 1.0)),
        c=draw(st.floats(0.001, 1.0)),
        n0=draw(st.integers(1, 50)),
    )


@settings(max_examples=40, deadline=None)
@given(fields(d=2), st.integers(0, 5))
def test_covariances_are_conjugate_symmetric_in_lag(y, n):
    n = min(n, y.shape.side - 1)
    covs = sample_autocov(y, n, CovarianceKind.UNBIASED)
    assert np.array_equal(covs.values, lag_mirror(covs.values, 2))


@settings(max_examples=40, deadline=None)
@given(fields(d=2), st.integers(0, 5))
def test_biased_is_scaled_unbiased(y, n):
    n = min(n, y.shape.side - 1)
    biased = sample_autocov(y, n, CovarianceKind.BIASED)
    unbiased = sample_autocov(y, n, CovarianceKind.UNBIASED)
    for k, matrix in unbiased.items():
        scale = index_count(y.shape.extents, k) / y.shape.size
        assert np.allclose(biased.matrix(k), scale * matrix, rtol=1e-12, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(2, 64), elements=values))
def test_full_window_equals_squared_dft(x):
    N = len(x)
    grid = FrequencyGrid(d=1, points_per_dim=128)
    y = FieldSample.from_array(x[:, None])
    spec = periodogram(sample_autocov(y, N - 1, CovarianceKind.BIASED), grid)

    theta = grid.theta_1d()
    dft = np.exp(-1j * np.outer(theta, np.arange(1, N + 1))) @ x
    expected = np.abs(dft) ** 2 / N
    scale = max(1.0, float(expected.max()))
    assert np.allclose(spec.values[:, 0, 0], expected, rtol=0, atol=1e-9 * scale)


@settings(max_examples=30, deadline=None)
@given(fields(d=2, max_side=7), st.integers(0, 3))
def test_real_field_spectrum_is_mirror_conjugate(y, n0):
    grid = FrequencyGrid(d=2, points_per_dim=6)
    spec = truncated_periodogram(y, TruncationPolicy.constant(n0 + 1), grid)
    mirror = np.mod(-np.arange(6), 6)
    assert np.array_equal(spec.values[np.ix_(mirror, mirror)], np.conj(spec.values))


@given(policies(), st.integers(2, 10**9))
def test_truncation_stays_inside_the_block(policy, N):
    n, consistent = policy_eval(policy, N)
    assert 1 <= n <= N - 1
    assert consistent == policy.consistent


@given(
    st.sampled_from([TruncationPolicy.cube_root(), TruncationPolicy.power(1, 0.48)]),
    st.integers(2, 10**8),
    st.integers(0, 10**8),
)
def test_consistent_truncation_grows_with_n(policy, N, extra):
    assert policy_eval(policy, N)[0] <= policy_eval(policy, N + extra)[0]


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, (3, 3), elements=st.floats(-1, 1)),
    st.floats(0.0, 5.0),
    st.floats(0.0, 5.0),
)
def test_raising_the_threshold_never_adds_edges(a, low, high):
    low, high = sorted((low, high))
    precision = a @ a.T + np.eye(3)
    grid = FrequencyGrid(d=1, points_per_dim=4)
    covariance = np.linalg.inv(precision)
    covariance = (covariance + covariance.T) / 2
    spec = SpectrumGrid(
        grid=grid,
        values=np.broadcast_to(covariance, (4, 3, 3)),
        provenance=Provenance.EXACT,
    )
    assert graph_topology(spec, high).edges <= graph_topology(spec, low).edges


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, (4, 4, 4), elements=st.one_of(st.just(0.0), st.floats(1e-3, 10.0))),
    st.integers(-20, 20),
)
def test_radar_peak_ignores_positive_scaling(surface, exponent):
    grid = FrequencyGrid(d=3, points_per_dim=4)
    spec = SpectrumGrid(
        grid=grid, values=surface[..., None, None], provenance=Provenance.ESTIMATED
    )
    scaled = spec.with_values(2.0**exponent * spec.values)
    assert radar_peak(scaled).node == radar_peak(spec).node
    assert radar_peak(scaled).degenerate == radar_peak(spec).degenerate


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, (5, 3, 3), elements=st.floats(-1, 1)),
    arrays(np.float64, (5, 3, 3), elements=st.floats(-1, 1)),
)
def test_nodewise_inverse_is_hermitian(real, imag):
    a = real + 1j * imag
    values = a @ np.conj(np.swapaxes(a, -1, -2)) + np.eye(3)
    values = (values + np.conj(np.swapaxes(values, -1, -2))) / 2
    spec = SpectrumGrid(
        grid=FrequencyGrid(d=1, points_per_dim=5), values=values, provenance=Provenance.EXACT
    )
    inverse = invert_spectrum(spec).values
    assert np.array_equal(inverse, np.conj(np.swapaxes(inverse, -1, -2)))
    assert np.allclose(inverse @ values, np.eye(3), atol=1e-9)
