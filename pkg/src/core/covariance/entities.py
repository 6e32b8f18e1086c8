import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.kinds import CovarianceKind, ScalarKind
from src.core.lattice.entities import LagIndex
from src.core.lattice.services import lag_position, lag_window


def lag_mirror(values: np.ndarray, d: int) -> np.ndarray:
    """
    Array whose entry at lag k is the conjugate transpose of the entry at -k
    """
    flipped = np.flip(values, axis=tuple(range(d)))
    return np.conj(np.swapaxes(flipped, -1, -2))


class CovarianceSequence(BaseModel):
    """
    Covariance matrices R_k on the lag window max_j |k_j| <= n.

    `values` has shape (2n+1,)*d + (m, m); the entry for lag k sits at k + n.
    R_{-k} = R_k^H holds exactly.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(ge=0)
    d: int = Field(ge=1)
    channels: int = Field(ge=1)
    kind: CovarianceKind
    scalar_kind: ScalarKind
    values: np.ndarray
    source_extents: tuple[int, ...] | None = None

    @model_validator(mode="after")
    def check_values(self) -> "CovarianceSequence":
        expected = (2 * self.n + 1,) * self.d + (self.channels, self.channels)
        if self.values.shape != expected:
            raise ValueError(
                f"Covariance values have shape {self.values.shape}, expected {expected}"
            )
        if self.scalar_kind == ScalarKind.REAL and np.iscomplexobj(self.values):
            raise ValueError("Real covariance sequences hold real matrices")
        if self.kind != CovarianceKind.EXACT:
            if self.source_extents is None:
                raise ValueError("Estimated covariances must record the source block")
            if self.n > min(self.source_extents) - 1:
                raise ValueError("Stored lags exceed the source block")
        if not np.array_equal(self.values, lag_mirror(self.values, self.d)):
            raise ValueError("Covariance sequence violates R_{-k} = R_k^H")
        self.values.setflags(write=False)
        return self

    @property
    def lags(self) -> list[LagIndex]:
        return lag_window(self.n, self.d)

    def matrix(self, k: LagIndex | tuple[int, ...]) -> np.ndarray:
        components = k.components if isinstance(k, LagIndex) else tuple(k)
        if any(abs(c) > self.n for c in components):
            raise KeyError(f"Lag {components} is outside the stored window")
        return self.values[lag_position(components, self.n)]

    def items(self):
        for k in self.lags:
            yield k, self.matrix(k)
