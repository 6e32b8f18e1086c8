import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.kinds import PolicyFamily, Provenance, ScalarKind
from src.core.spectrum.exceptions import InvalidPolicyError


def _floor(value: float) -> int:
    """
    floor() that does not lose an integer to rounding, e.g. 1000 ** (1/3)
    """
    n = math.floor(value)
    return n + 1 if math.isclose(value, n + 1, rel_tol=1e-12) else n


class TruncationPolicy(BaseModel):
    """
    Rule n = f(N) for the lag window of the truncated periodogram.

    Accepts the compact text forms `cube-root`, `power:1,0.48`,
    `linear-fraction:0.01`, `constant:10` and `full`.
    """

    model_config = ConfigDict(frozen=True)

    family: PolicyFamily = PolicyFamily.CUBE_ROOT
    a: float = 1.0
    b: float = 0.5
    c: float = 0.01
    n0: int = 10

    @model_validator(mode="before")
    @classmethod
    def accept_text(cls, value):
        if isinstance(value, str):
            return cls._parse_fields(value)
        return value

    @staticmethod
    def _parse_fields(text: str) -> dict:
        family, _, params = text.strip().partition(":")
        try:
            family = PolicyFamily(family)
        except ValueError:
            raise ValueError(
                f"Unknown policy family {family!r}; expected one of {PolicyFamily.list()}"
            )
        values = [v for v in params.split(",") if v.strip()]
        expected = {
            PolicyFamily.CUBE_ROOT: (),
            PolicyFamily.FULL: (),
            PolicyFamily.POWER: ("a", "b"),
            PolicyFamily.LINEAR_FRACTION: ("c",),
            PolicyFamily.CONSTANT: ("n0",),
        }[family]
        if len(values) != len(expected):
            raise ValueError(
                f"Policy {family} takes {len(expected)} parameter(s), got {len(values)}"
            )
        fields = {"family": family}
        for name, raw in zip(expected, values):
            fields[name] = int(raw) if name == "n0" else float(raw)
        return fields

    @classmethod
    def parse(cls, text: str) -> "TruncationPolicy":
        return cls.model_validate(text)

    @classmethod
    def cube_root(cls) -> "TruncationPolicy":
        return cls(family=PolicyFamily.CUBE_ROOT)

    @classmethod
    def power(cls, a: float, b: float) -> "TruncationPolicy":
        return cls(family=PolicyFamily.POWER, a=a, b=b)

    @classmethod
    def linear_fraction(cls, c: float) -> "TruncationPolicy":
        return cls(family=PolicyFamily.LINEAR_FRACTION, c=c)

    @classmethod
    def constant(cls, n0: int) -> "TruncationPolicy":
        return cls(family=PolicyFamily.CONSTANT, n0=n0)

    @classmethod
    def full(cls) -> "TruncationPolicy":
        return cls(family=PolicyFamily.FULL)

    def check(self) -> None:
        if self.family == PolicyFamily.POWER and self.a <= 0:
            raise InvalidPolicyError(f"power family needs a > 0, got a={self.a}")
        if self.family == PolicyFamily.LINEAR_FRACTION and self.c <= 0:
            raise InvalidPolicyError(f"linear-fraction family needs c > 0, got c={self.c}")
        if self.family == PolicyFamily.CONSTANT and self.n0 < 1:
            raise InvalidPolicyError(f"constant family needs n0 >= 1, got n0={self.n0}")

    def formula(self, N: int) -> int:
        """
        Unclamped floor of the family formula
        """
        match self.family:
            case PolicyFamily.CUBE_ROOT:
                return _floor(N ** (1.0 / 3.0))
            case PolicyFamily.POWER:
                return _floor(self.a * N**self.b)
            case PolicyFamily.LINEAR_FRACTION:
                return _floor(self.c * N)
            case PolicyFamily.CONSTANT:
                return self.n0
            case PolicyFamily.FULL:
                return N - 1

    @property
    def consistent(self) -> bool:
        """
        True iff f(N) -> infinity and f(N)^2 / N -> 0
        """
        if self.family == PolicyFamily.CUBE_ROOT:
            return True
        if self.family == PolicyFamily.POWER:
            return self.a > 0 and 0 < self.b < 0.5
        return False

    @property
    def label(self) -> str:
        match self.family:
            case PolicyFamily.POWER:
                return f"power:{self.a:g},{self.b:g}"
            case PolicyFamily.LINEAR_FRACTION:
                return f"linear-fraction:{self.c:g}"
            case PolicyFamily.CONSTANT:
                return f"constant:{self.n0}"
        return str(self.family)

    @property
    def slug(self) -> str:
        """
        label usable in metric and file names
        """
        return self.label.replace(":", "_").replace(",", "_")


class FrequencyGrid(BaseModel):
    """
    Nodes theta_g = 2*pi*g/G, g in {0..G-1}^d, in canonical (row-major) order
    """

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1)
    points_per_dim: int = Field(ge=1)

    @property
    def size(self) -> int:
        return self.points_per_dim**self.d

    @property
    def spacing(self) -> float:
        return 2 * math.pi / self.points_per_dim

    @property
    def node_shape(self) -> tuple[int, ...]:
        return (self.points_per_dim,) * self.d

    def theta_1d(self) -> np.ndarray:
        return self.spacing * np.arange(self.points_per_dim)

    def nodes(self) -> np.ndarray:
        """
        (G^d, d) array of node coordinates
        """
        index = np.indices(self.node_shape).reshape(self.d, -1).T
        return self.spacing * index

    def node_theta(self, flat_index: int) -> tuple[float, ...]:
        index = np.unravel_index(flat_index, self.node_shape)
        return tuple(float(self.spacing * g) for g in index)

    def nearest_node(self, point) -> tuple[int, ...]:
        point = np.asarray(point, dtype=np.float64)
        if point.shape != (self.d,):
            raise ValueError(f"Point must have {self.d} components")
        index = np.rint(np.mod(point, 2 * math.pi) / self.spacing).astype(int)
        return tuple(int(g) for g in np.mod(index, self.points_per_dim))


class SpectrumGrid(BaseModel):
    """
    Matrix-valued spectrum sampled on a frequency grid.

    `values` has shape (G,)*d + (m, m). Cross blocks (`cross=True`) may be
    rectangular and are not Hermitian.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: FrequencyGrid
    values: np.ndarray
    provenance: Provenance
    scalar_kind: ScalarKind = ScalarKind.COMPLEX
    cross: bool = False

    @model_validator(mode="after")
    def check_values(self) -> "SpectrumGrid":
        d = self.grid.d
        if self.values.ndim != d + 2 or self.values.shape[:d] != self.grid.node_shape:
            raise ValueError(
                f"Spectrum values have shape {self.values.shape}, "
                f"expected {self.grid.node_shape} + (m, m)"
            )
        values = np.array(self.values, dtype=np.complex128)
        if not self.cross:
            if values.shape[-1] != values.shape[-2]:
                raise ValueError("Spectrum values must be square matrices")
            scale = max(float(np.max(np.abs(values), initial=0.0)), 1e-300)
            asymmetry = np.max(
                np.abs(values - np.conj(np.swapaxes(values, -1, -2))), initial=0.0
            )
            if asymmetry > 1e-12 * scale:
                raise ValueError("Spectrum values are not Hermitian")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        return self

    @property
    def channels(self) -> int:
        return self.values.shape[-1]

    def flat_values(self) -> np.ndarray:
        return self.values.reshape((self.grid.size,) + self.values.shape[-2:])

    def with_values(self, values: np.ndarray, **changes) -> "SpectrumGrid":
        fields = {
            "grid": self.grid,
            "values": values,
            "provenance": self.provenance,
            "scalar_kind": self.scalar_kind,
            "cross": self.cross,
        }
        fields.update(changes)
        return SpectrumGrid(**fields)


class EstimateManifest(BaseModel):
    version: str
    source: str
    extents: tuple[int, ...]
    N: int
    n: int
    consistent: bool
    policy: str
    covariance_kind: str
    grid_size: int
    min_eigenvalue: float
