import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationInfo,
    field_validator,
    model_validator,
)

from src.core.kinds import ScalarKind


class LagIndex(BaseModel):
    """
    Integer lag vector k = (k_1, ..., k_d)
    """

    model_config = ConfigDict(frozen=True)

    components: tuple[int, ...] = Field(min_length=1)

    @property
    def d(self) -> int:
        return len(self.components)

    def neg(self) -> "LagIndex":
        return LagIndex(components=tuple(-c for c in self.components))

    def in_half_space(self) -> bool:
        """
        True for k = 0 and for lags whose first non-zero component is positive
        """
        for c in self.components:
            if c != 0:
                return c > 0
        return True


class BlockShape(BaseModel):
    """
    Extents (N_1, ..., N_d) of a lattice block
    """

    model_config = ConfigDict(frozen=True)

    extents: tuple[int, ...] = Field(min_length=1)

    @field_validator("extents")
    @classmethod
    def validate_extents(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(extent < 1 for extent in value):
            raise ValueError("Every block extent must be >= 1")
        return value

    @classmethod
    def cube(cls, N: int, d: int) -> "BlockShape":
        return cls(extents=(N,) * d)

    @property
    def d(self) -> int:
        return len(self.extents)

    @property
    def size(self) -> int:
        return int(np.prod(self.extents, dtype=np.int64))

    @property
    def is_hypercubic(self) -> bool:
        return len(set(self.extents)) == 1

    @property
    def side(self) -> int:
        """
        Shortest extent; the largest admissible lag is side - 1
        """
        return min(self.extents)


class FieldSample(BaseModel):
    """
    Finite realization of an m-valued random field on a lattice block.

    `data` has shape extents + (m,), row-major with dimension 1 outermost.
    The array is copied on construction and frozen.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    shape: BlockShape
    channels: int = Field(ge=1)
    scalar_kind: ScalarKind
    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def coerce_data(cls, value, info: ValidationInfo) -> np.ndarray:
        array = np.asarray(value)
        if info.data.get("scalar_kind") == ScalarKind.REAL:
            if np.iscomplexobj(array):
                raise ValueError("Real-kind fields contain no imaginary parts")
            array = np.array(array, dtype=np.float64)
        else:
            array = np.array(array, dtype=np.complex128)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_layout(self) -> "FieldSample":
        expected = self.shape.extents + (self.channels,)
        if self.data.shape != expected:
            raise ValueError(
                f"Field data has shape {self.data.shape}, expected {expected}"
            )
        return self

    @classmethod
    def from_array(
        cls, array: np.ndarray, scalar_kind: ScalarKind | None = None
    ) -> "FieldSample":
        """
        Wrap an array of shape extents + (m,)
        """
        array = np.asarray(array)
        if scalar_kind is None:
            scalar_kind = (
                ScalarKind.COMPLEX if np.iscomplexobj(array) else ScalarKind.REAL
            )
        return cls(
            shape=BlockShape(extents=array.shape[:-1]),
            channels=array.shape[-1],
            scalar_kind=scalar_kind,
            data=array,
        )

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def is_complex(self) -> bool:
        return self.scalar_kind == ScalarKind.COMPLEX

    def flat(self) -> np.ndarray:
        """
        (N_1 * ... * N_d, m) view in canonical lattice order
        """
        return self.data.reshape(-1, self.channels)
