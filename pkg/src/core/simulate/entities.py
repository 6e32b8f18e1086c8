import math
from collections.abc import Sequence

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)


def as_numeric_array(value) -> np.ndarray:
    """
    float64 array, or complex128 when any entry is complex (strings like "1+2j" accepted)
    """
    array = np.asarray(value)
    if array.dtype.kind in "UO":
        array = np.vectorize(complex, otypes=[np.complex128])(array)
    if np.iscomplexobj(array):
        return np.array(array, dtype=np.complex128)
    return np.array(array, dtype=np.float64)


class MATap(BaseModel):
    """
    One coefficient M(sigma) of a finite moving-average kernel.
    Accepts the config form [sigma, matrix].
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sigma: tuple[int, ...] = Field(min_length=1)
    matrix: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def accept_pair(cls, value):
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return {"sigma": value[0], "matrix": value[1]}
        return value

    @field_validator("sigma", mode="before")
    @classmethod
    def accept_scalar_sigma(cls, value):
        if isinstance(value, (int, np.integer)):
            return (int(value),)
        return value

    @field_validator("matrix", mode="before")
    @classmethod
    def coerce_matrix(cls, value) -> np.ndarray:
        array = as_numeric_array(value)
        if array.ndim == 0:
            array = array.reshape(1, 1)
        if array.ndim != 2:
            raise ValueError("Tap matrix must be two-dimensional (m x p)")
        array.setflags(write=False)
        return array

    @field_serializer("matrix")
    def dump_matrix(self, matrix: np.ndarray) -> list:
        if np.iscomplexobj(matrix):
            return [[str(complex(entry)) for entry in row] for row in matrix]
        return matrix.tolist()


class MAKernel(BaseModel):
    """
    Finite impulse response {M(sigma)} of an m x p filter on Z^d.
    `m`/`p` are only needed to describe an empty kernel.
    """

    model_config = ConfigDict(frozen=True)

    taps: tuple[MATap, ...] = ()
    d: int = Field(default=1, ge=1)
    m: int | None = Field(default=None, ge=1)
    p: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_taps(self) -> "MAKernel":
        seen = set()
        for tap in self.taps:
            if len(tap.sigma) != self.d:
                raise ValueError(f"Tap {tap.sigma} does not match kernel dimension {self.d}")
            if tap.matrix.shape != self.taps[0].matrix.shape:
                raise ValueError("All tap matrices must share the same m x p shape")
            if tap.sigma in seen:
                raise ValueError(f"Tap {tap.sigma} is listed twice")
            seen.add(tap.sigma)
        if self.taps and self.m is not None and self.m != self.taps[0].matrix.shape[0]:
            raise ValueError("Declared m does not match the tap matrices")
        if self.taps and self.p is not None and self.p != self.taps[0].matrix.shape[1]:
            raise ValueError("Declared p does not match the tap matrices")
        return self

    @classmethod
    def identity(cls, m: int = 1, d: int = 1) -> "MAKernel":
        return cls(taps=(MATap(sigma=(0,) * d, matrix=np.eye(m)),), d=d)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[float]) -> "MAKernel":
        """
        Scalar 1-D kernel with M(sigma) = coefficients[sigma]
        """
        return cls(
            taps=tuple(
                MATap(sigma=(sigma,), matrix=[[value]])
                for sigma, value in enumerate(coefficients)
            ),
            d=1,
        )

    @property
    def outputs(self) -> int:
        return self.taps[0].matrix.shape[0] if self.taps else (self.m or 1)

    @property
    def inputs(self) -> int:
        return self.taps[0].matrix.shape[1] if self.taps else (self.p or 1)

    @property
    def is_complex(self) -> bool:
        return any(np.iscomplexobj(tap.matrix) for tap in self.taps)

    def sorted_taps(self) -> list[MATap]:
        return sorted(self.taps, key=lambda tap: tap.sigma)

    def span(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """
        Per-dimension (min sigma, max sigma) over the support
        """
        if not self.taps:
            return (0,) * self.d, (0,) * self.d
        sigmas = np.array([tap.sigma for tap in self.taps])
        return tuple(sigmas.min(axis=0).tolist()), tuple(sigmas.max(axis=0).tolist())


class RationalSection1D(BaseModel):
    """
    First-order section H(z) = gain * z^(-delay) * (z - zero) / (z - pole).
    Accepts the config form [zero, pole, gain] or [zero, pole, gain, delay].
    """

    model_config = ConfigDict(frozen=True)

    zero: complex = 0j
    pole: complex = 0j
    gain: complex = 1 + 0j
    delay: int = Field(default=0, ge=0)

    @model_validator(mode="before")
    @classmethod
    def accept_triple(cls, value):
        if isinstance(value, (list, tuple)) and len(value) in (3, 4):
            return dict(zip(("zero", "pole", "gain", "delay"), value))
        return value

    @classmethod
    def unit(cls) -> "RationalSection1D":
        return cls()

    @property
    def is_real(self) -> bool:
        return self.zero.imag == 0 and self.pole.imag == 0 and self.gain.imag == 0

    def _coefficients(self, values: list[complex]) -> np.ndarray:
        array = np.array(values, dtype=np.complex128)
        return array.real.copy() if self.is_real else array

    def numerator(self) -> np.ndarray:
        """
        b coefficients in powers of z^-1
        """
        return self._coefficients([0j] * self.delay + [self.gain, -self.gain * self.zero])

    def denominator(self) -> np.ndarray:
        return self._coefficients([1 + 0j, -self.pole])

    def inverse_coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """
        (b, a) of 1/H(z); meaningful only for delay == 0 and gain != 0
        """
        gain = self.gain.real if self.is_real else self.gain
        return self.denominator() / gain, self._coefficients([1 + 0j, -self.zero])

    def response(self, theta: np.ndarray) -> np.ndarray:
        z = np.exp(1j * np.asarray(theta))
        return self.gain * z ** (-self.delay) * (z - self.zero) / (z - self.pole)


class GraphicalSpec(BaseModel):
    """
    Upper-triangular matrix W^-1(z) of first-order sections; None marks a zero entry
    """

    model_config = ConfigDict(frozen=True)

    sections: tuple[tuple[RationalSection1D | None, ...], ...]

    @model_validator(mode="after")
    def check_triangular(self) -> "GraphicalSpec":
        m = len(self.sections)
        if m == 0:
            raise ValueError("Section matrix is empty")
        for i, row in enumerate(self.sections):
            if len(row) != m:
                raise ValueError("Section matrix must be square")
            if row[i] is None:
                raise ValueError(f"Diagonal section {i + 1} must be non-zero")
            if any(entry is not None for entry in row[:i]):
                raise ValueError("Section matrix must be upper triangular")
        return self

    @property
    def m(self) -> int:
        return len(self.sections)

    def response(self, theta: np.ndarray) -> np.ndarray:
        """
        W^-1(e^{i theta}) as a (len(theta), m, m) complex array
        """
        theta = np.asarray(theta)
        values = np.zeros((theta.size, self.m, self.m), dtype=np.complex128)
        for i, row in enumerate(self.sections):
            for j, section in enumerate(row):
                if section is not None:
                    values[:, i, j] = section.response(theta)
        return values


class RadarModel(BaseModel):
    """
    Three-dimensional first-order autoregression with alpha_j = rho_j e^{i omega_j}
    observed in circular white noise of variance lambda2
    """

    model_config = ConfigDict(frozen=True)

    rho: tuple[float, float, float]
    omega: tuple[float, float, float]
    lambda2: float = Field(ge=0.0)

    @field_validator("rho")
    @classmethod
    def validate_rho(cls, value: tuple[float, float, float]):
        if any(r < 0 for r in value):
            raise ValueError("Pole moduli must be >= 0")
        return value

    @field_validator("omega")
    @classmethod
    def validate_omega(cls, value: tuple[float, float, float]):
        if any(not 0.0 <= w < 2 * math.pi for w in value):
            raise ValueError("Angular frequencies must lie in [0, 2*pi)")
        return value

    @property
    def alpha(self) -> np.ndarray:
        return np.asarray(self.rho) * np.exp(1j * np.asarray(self.omega))

    @property
    def is_stable(self) -> bool:
        return sum(self.rho) < 1


class EtfeDataset(BaseModel):
    """
    Input/output record of the impulse-response benchmark
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u: np.ndarray
    y: np.ndarray
    noise_std: float = Field(ge=0.0, description="Standard deviation of v")
    peak: float = Field(ge=0.0, description="max_t |noiseless y(t)|")
