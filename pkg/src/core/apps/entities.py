import math
from collections.abc import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.kinds import TransferMethod
from src.core.spectrum.entities import FrequencyGrid, TruncationPolicy


class TransferFunctionEstimate(BaseModel):
    """
    Scalar frequency response on a 1-D grid. Undefined nodes hold NaN and are
    False in `defined`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: FrequencyGrid
    values: np.ndarray
    defined: np.ndarray
    method: TransferMethod
    policy: TruncationPolicy | None = None
    n: int | None = None

    @model_validator(mode="after")
    def check_values(self) -> "TransferFunctionEstimate":
        if self.grid.d != 1:
            raise ValueError("Transfer function estimates live on a 1-D grid")
        G = self.grid.points_per_dim
        if self.values.shape != (G,) or self.defined.shape != (G,):
            raise ValueError(f"Expected {G} node values")
        if not np.all(np.isfinite(self.values[self.defined])):
            raise ValueError("Defined nodes must hold finite values")
        if not np.all(np.isnan(self.values[~self.defined])):
            raise ValueError("Undefined nodes are stored as NaN")
        self.values.setflags(write=False)
        self.defined.setflags(write=False)
        return self

    @property
    def undefined_count(self) -> int:
        return int((~self.defined).sum())


class GraphTopology(BaseModel):
    """
    Undirected graph on nodes 1..m; edges are stored as pairs (i, j) with i < j
    """

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)
    edges: frozenset[tuple[int, int]] = frozenset()

    @field_validator("edges", mode="before")
    @classmethod
    def normalize_edges(cls, value: Iterable) -> frozenset[tuple[int, int]]:
        edges = set()
        for edge in value:
            i, j = (int(node) for node in edge)
            if i == j:
                raise ValueError(f"Self-loop on node {i}")
            edges.add((min(i, j), max(i, j)))
        return frozenset(edges)

    @model_validator(mode="after")
    def check_nodes(self) -> "GraphTopology":
        for i, j in self.edges:
            if i < 1 or j > self.m:
                raise ValueError(f"Edge {{{i},{j}}} is outside nodes 1..{self.m}")
        return self

    @classmethod
    def complete(cls, m: int) -> "GraphTopology":
        return cls(m=m, edges={(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)})

    @classmethod
    def empty(cls, m: int) -> "GraphTopology":
        return cls(m=m)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


class PeakEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_hat: tuple[float, ...]
    value: float
    node: tuple[int, ...]
    degenerate: bool = False

    @field_validator("omega_hat")
    @classmethod
    def validate_omega_hat(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(not 0.0 <= w < 2 * math.pi for w in value):
            raise ValueError("Peak frequencies must lie in [0, 2*pi)")
        return value
