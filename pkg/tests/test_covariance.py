import itertools

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.covariance.entities import CovarianceSequence, lag_mirror
from src.core.covariance.exceptions import (
    CovarianceKindError,
    IncompleteLagWindowError,
    NegativeTruncationError,
    TruncationTooLargeError,
)
from src.core.covariance.services import (
    covariances_from_mapping,
    exact_ma_autocov,
    lagged_sum,
    sample_autocov,
)
from src.core.kinds import CovarianceKind, NoiseKind, ScalarKind
from src.core.lattice.entities import BlockShape, FieldSample
from src.core.lattice.services import index_set, lag_window
from src.core.simulate.entities import MAKernel, MATap
from src.core.simulate.services import gen_noise, make_rng


def _looped_autocov(data: np.ndarray, n: int, kind: CovarianceKind) -> dict:
    """
    Direct sum over the index set for every lag, real and imaginary parts kept apart
    """
    extents = data.shape[:-1]
    m = data.shape[-1]
    result = {}
    for k in lag_window(n, len(extents)):
        points, count = index_set(extents, k)
        real = np.zeros((m, m))
        imag = np.zeros((m, m))
        for t in points:
            lead = data[tuple(c + s - 1 for c, s in zip(t, k.components))]
            base = data[tuple(c - 1 for c in t)]
            for i, j in itertools.product(range(m), range(m)):
                product = lead[i] * np.conj(base[j])
                real[i, j] += product.real
                imag[i, j] += product.imag
        denominator = count if kind == CovarianceKind.UNBIASED else np.prod(extents)
        result[k.components] = real / denominator + 1j * imag / denominator
    return result


def _real_arithmetic_autocov(data: np.ndarray, n: int) -> dict:
    """
    Row-ordered direct sums per lag with complex products expanded into real parts;
    returns the raw (real, imag) sums and the index-set size
    """
    extents = data.shape[:-1]
    m = data.shape[-1]
    ar, ai = data.real, data.imag
    sums = {}
    for k in lag_window(n, len(extents)):
        points, count = index_set(extents, k)
        real = np.zeros((m, m))
        imag = np.zeros((m, m))
        for t in points:
            lead = tuple(c + s - 1 for c, s in zip(t, k.components))
            base = tuple(c - 1 for c in t)
            real += ar[lead][:, None] * ar[base][None, :] + ai[lead][:, None] * ai[base][None, :]
            imag += ai[lead][:, None] * ar[base][None, :] - ar[lead][:, None] * ai[base][None, :]
        sums[k.components] = (real, imag, count)
    return sums


def test_sample_autocov_is_bit_exact_over_random_fields():
    rng = make_rng(2024)
    for _ in range(200):
        d = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        extents = tuple(int(e) for e in rng.integers(2, 7, size=d))
        kind = NoiseKind.CIRCULAR_COMPLEX if rng.random() < 0.5 else NoiseKind.REAL_GAUSSIAN
        y = gen_noise(BlockShape(extents=extents), m, kind, seed=int(rng.integers(2**32)))
        n = min(extents) - 1
        sums = _real_arithmetic_autocov(y.data, n)

        for cov_kind in [CovarianceKind.UNBIASED, CovarianceKind.BIASED]:
            covs = sample_autocov(y, n, cov_kind)
            for k, matrix in covs.items():
                real, imag, count = sums[k.components]
                denominator = count if cov_kind == CovarianceKind.UNBIASED else y.shape.size
                assert np.array_equal(matrix.real, real / denominator)
                if y.is_complex:
                    assert np.array_equal(matrix.imag, imag / denominator)
                else:
                    assert not np.iscomplexobj(matrix)


def test_three_sample_sequence_by_hand():
    y = FieldSample.from_array(np.array([[1.0], [2.0], [3.0]]))

    unbiased = sample_autocov(y, 1, CovarianceKind.UNBIASED)
    biased = sample_autocov(y, 2, CovarianceKind.BIASED)

    assert unbiased.matrix((1,))[0, 0] == 4.0
    assert unbiased.matrix((0,))[0, 0] == pytest.approx(14 / 3)
    assert biased.matrix((1,))[0, 0] == pytest.approx(8 / 3)
    assert biased.matrix((2,))[0, 0] == pytest.approx(1.0)
    assert biased.matrix((-1,))[0, 0] == biased.matrix((1,))[0, 0]


@pytest.mark.parametrize("kind", [CovarianceKind.UNBIASED, CovarianceKind.BIASED])
def test_sample_autocov_matches_direct_sum(kind):
    y = gen_noise(BlockShape(extents=(5, 4)), 2, NoiseKind.CIRCULAR_COMPLEX, seed=21)
    covs = sample_autocov(y, 2, kind)
    expected = _looped_autocov(y.data, 2, kind)

    assert covs.scalar_kind == ScalarKind.COMPLEX
    for k, matrix in covs.items():
        assert np.allclose(matrix, expected[k.components], rtol=0, atol=1e-12)


def test_sample_autocov_is_exactly_hermitian_in_lag():
    y = gen_noise(BlockShape.cube(6, 2), 3, NoiseKind.CIRCULAR_COMPLEX, seed=4)
    covs = sample_autocov(y, 3)

    for k, matrix in covs.items():
        assert np.array_equal(covs.matrix(k.neg()), matrix.conj().T)
    assert np.array_equal(covs.values, lag_mirror(covs.values, 2))


def test_real_field_gives_real_covariances():
    y = gen_noise(BlockShape(extents=(50,)), 2, NoiseKind.REAL_GAUSSIAN, seed=1)
    covs = sample_autocov(y, 4)
    assert covs.scalar_kind == ScalarKind.REAL
    assert not np.iscomplexobj(covs.values)


def test_zero_truncation_keeps_only_lag_zero():
    y = gen_noise(BlockShape.cube(4, 2), 1, NoiseKind.REAL_GAUSSIAN, seed=2)
    covs = sample_autocov(y, 0)
    assert covs.values.shape == (1, 1, 1, 1)
    assert covs.matrix((0, 0))[0, 0] == pytest.approx(np.mean(y.data**2))


def test_truncation_limits():
    y = gen_noise(BlockShape(extents=(5, 8)), 1, NoiseKind.REAL_GAUSSIAN, seed=2)
    assert sample_autocov(y, 4).n == 4
    with pytest.raises(TruncationTooLargeError):
        sample_autocov(y, 5)
    with pytest.raises(NegativeTruncationError):
        sample_autocov(y, -1)
    with pytest.raises(CovarianceKindError):
        sample_autocov(y, 1, CovarianceKind.EXACT)


def test_workers_do_not_change_the_estimate():
    y = gen_noise(BlockShape.cube(12, 2), 2, NoiseKind.CIRCULAR_COMPLEX, seed=8)
    serial = sample_autocov(y, 3, workers=1)
    threaded = sample_autocov(y, 3, workers=4)
    assert np.array_equal(serial.values, threaded.values)


def test_lagged_sum_splits_real_and_imaginary_parts():
    lead = np.array([[1 + 1j], [2 - 1j]])
    base = np.array([[1j], [1.0]])
    total = lagged_sum(lead, base)
    assert total.shape == (2, 1, 1)
    assert total[0, 0, 0] == 1.0 + 2.0
    assert total[1, 0, 0] == -1.0 - 1.0


def test_exact_ma_autocov_one_dimensional():
    kernel = MAKernel.from_coefficients([1.0, 0.5, 0.25])
    covs = exact_ma_autocov(kernel, 3)

    assert covs.kind == CovarianceKind.EXACT
    assert covs.matrix((0,))[0, 0] == pytest.approx(1.3125)
    assert covs.matrix((1,))[0, 0] == pytest.approx(0.625)
    assert covs.matrix((-2,))[0, 0] == pytest.approx(0.25)
    assert covs.matrix((3,))[0, 0] == 0.0


def test_exact_ma_autocov_cross_channel():
    kernel = MAKernel(
        taps=(
            MATap(sigma=(0,), matrix=[[1.0, 0.0], [0.0, 1.0]]),
            MATap(sigma=(1,), matrix=[[0.0, 0.0], [1.0, 0.0]]),
        )
    )
    covs = exact_ma_autocov(kernel, 1)
    assert np.array_equal(covs.matrix((0,)), [[1.0, 0.0], [0.0, 2.0]])
    assert np.array_equal(covs.matrix((1,)), [[0.0, 0.0], [1.0, 0.0]])
    assert np.array_equal(covs.matrix((-1,)), [[0.0, 1.0], [0.0, 0.0]])


def test_mapping_fills_negative_lags():
    covs = covariances_from_mapping({(0,): 1.25, (1,): 0.5})
    assert covs.n == 1
    assert covs.matrix((-1,))[0, 0] == 0.5
    assert covs.kind == CovarianceKind.EXACT


def test_mapping_must_cover_the_window():
    with pytest.raises(IncompleteLagWindowError):
        covariances_from_mapping({(0, 0): 1.0, (1, 1): 0.2})
    with pytest.raises(IncompleteLagWindowError):
        covariances_from_mapping({})


def test_sequence_rejects_broken_symmetry():
    values = np.array([[[0.1]], [[1.0]], [[0.2]]])
    with pytest.raises(ValidationError):
        CovarianceSequence(
            n=1,
            d=1,
            channels=1,
            kind=CovarianceKind.EXACT,
            scalar_kind=ScalarKind.REAL,
            values=values,
        )


def test_estimated_sequence_needs_its_source_block():
    with pytest.raises(ValidationError):
        CovarianceSequence(
            n=0,
            d=1,
            channels=1,
            kind=CovarianceKind.BIASED,
            scalar_kind=ScalarKind.REAL,
            values=np.ones((1, 1, 1)),
        )


def test_matrix_outside_window():
    covs = covariances_from_mapping({(0,): 1.0})
    with pytest.raises(KeyError):
        covs.matrix((1,))
