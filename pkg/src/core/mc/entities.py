import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.apps.entities import GraphTopology, PeakEstimate, TransferFunctionEstimate
from src.core.covariance.entities import CovarianceSequence
from src.core.kinds import (
    CovarianceKind,
    EntryNorm,
    Experiment,
    PeakDistance,
    TrialStatus,
)
from src.core.settings import (
    DEFAULT_BURN_IN,
    DEFAULT_COND_LIMIT,
    default_grid_size,
)
from src.core.simulate.entities import GraphicalSpec, MAKernel, RationalSection1D
from src.core.simulate.services import (
    RUNGE_TAPS,
    five_node_wspec,
    lowpass_input_section,
)
from src.core.spectrum.entities import SpectrumGrid, TruncationPolicy
from src.core.spectrum.exceptions import InvalidPolicyError


def _checked(policy: TruncationPolicy) -> TruncationPolicy:
    try:
        policy.check()
    except InvalidPolicyError as e:
        raise ValueError(str(e))
    return policy


class RadarSettings(BaseModel):
    """
    Radar model parameters; `omega` is drawn per trial when left out
    """

    model_config = ConfigDict(frozen=True)

    rho: tuple[float, float, float] = (0.3, 0.3, 0.3)
    lambda2: float = Field(default=2.0, ge=0.0)
    omega: tuple[float, float, float] | None = None

    @field_validator("rho")
    @classmethod
    def validate_rho(cls, value: tuple[float, float, float]):
        if any(r < 0 for r in value) or sum(value) >= 1:
            raise ValueError("rho needs non-negative moduli with sum below 1")
        return value

    @field_validator("omega")
    @classmethod
    def validate_omega(cls, value):
        if value is not None and any(not 0.0 <= w < 2 * math.pi for w in value):
            raise ValueError("omega components must lie in [0, 2*pi)")
        return value


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: Experiment
    N_list: list[int] = Field(min_length=1)
    trials: int = Field(ge=1)
    base_seed: int = Field(default=0, ge=0, lt=2**64)
    policy: TruncationPolicy = TruncationPolicy.cube_root()
    compare: list[TruncationPolicy] = []
    baseline: bool = True
    grid_size: int | None = Field(default=None, ge=2)
    covariance_kind: CovarianceKind = CovarianceKind.BIASED
    threshold: float = Field(default=0.0994, ge=0.0)
    entry_norm: EntryNorm = EntryNorm.L1
    noise_ratio: float = Field(default=0.01, ge=0.0)
    horizon: int = Field(default=300, ge=0)
    impulse_taps: int = Field(default=RUNGE_TAPS, ge=1)
    burn_in: int = Field(default=DEFAULT_BURN_IN, ge=0)
    input_filter: RationalSection1D = lowpass_input_section()
    graph: GraphicalSpec = five_node_wspec()
    radar: RadarSettings = RadarSettings()
    ma: MAKernel = MAKernel.from_coefficients([1.0, 0.5, 0.25])
    peak_distance: PeakDistance = PeakDistance.EUCLIDEAN
    cond_limit: float = Field(default=DEFAULT_COND_LIMIT, gt=0.0)
    max_failure_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    output_dir: str = "results"

    @field_validator("N_list")
    @classmethod
    def validate_n_list(cls, value: list[int]) -> list[int]:
        if any(N < 2 for N in value):
            raise ValueError("every N must be >= 2")
        if len(set(value)) != len(value):
            raise ValueError("N values must be distinct")
        return value

    @field_validator("policy")
    @classmethod
    def validate_policy(cls, value: TruncationPolicy) -> TruncationPolicy:
        return _checked(value)

    @field_validator("compare")
    @classmethod
    def validate_compare(cls, value: list[TruncationPolicy]) -> list[TruncationPolicy]:
        return [_checked(policy) for policy in value]

    @field_validator("covariance_kind")
    @classmethod
    def validate_covariance_kind(cls, value: CovarianceKind) -> CovarianceKind:
        if value == CovarianceKind.EXACT:
            raise ValueError("sample covariances are biased or unbiased")
        return value

    @field_validator("input_filter")
    @classmethod
    def validate_input_filter(cls, value: RationalSection1D) -> RationalSection1D:
        if abs(value.pole) >= 1:
            raise ValueError("input filter pole must lie inside the unit circle")
        return value

    @model_validator(mode="after")
    def check_experiment(self) -> "ExperimentConfig":
        if self.experiment == Experiment.ETFE and self.horizon + 1 > self.resolved_grid_size:
            raise ValueError("horizon needs grid_size >= horizon + 1")
        if self.experiment == Experiment.ETFE and self.horizon + 1 > self.impulse_taps:
            raise ValueError("horizon needs impulse_taps >= horizon + 1")
        return self

    @property
    def d(self) -> int:
        match self.experiment:
            case Experiment.RADAR:
                return 3
            case Experiment.CONSISTENCY:
                return self.ma.d
        return 1

    @property
    def resolved_grid_size(self) -> int:
        return self.grid_size or default_grid_size(self.d)

    @property
    def channels(self) -> int:
        match self.experiment:
            case Experiment.ETFE:
                return 2
            case Experiment.GRAPH:
                return self.graph.m
            case Experiment.CONSISTENCY:
                return self.ma.outputs
        return 1


class MetricSummary(BaseModel):
    """
    Descriptive statistics over the successful trials of one metric at one N
    """

    model_config = ConfigDict(frozen=True)

    mean: float
    median: float
    q1: float
    q3: float
    n_success: int = Field(ge=0)

    @classmethod
    def from_values(cls, values: list[float]) -> "MetricSummary":
        if not values:
            nan = float("nan")
            return cls(mean=nan, median=nan, q1=nan, q3=nan, n_success=0)
        q1, median, q3 = np.percentile(values, [25, 50, 75])
        return cls(
            mean=sum(values) / len(values),
            median=float(median),
            q1=float(q1),
            q3=float(q3),
            n_success=len(values),
        )


class TrialResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    trial_index: int = Field(ge=0)
    N: int
    seed: int
    metrics: dict[str, float] = {}
    failures: dict[str, str] = {}
    primary: tuple[str, ...] = ()

    @property
    def status(self) -> TrialStatus:
        """
        FAILED when a primary metric failed; comparison and baseline failures stay
        in `failures` without failing the trial. No primary names means any failure counts.
        """
        failed = set(self.failures)
        if self.primary:
            failed &= set(self.primary)
        return TrialStatus.FAILED if failed else TrialStatus.OK


class TrialExport(BaseModel):
    """
    Estimates of one trial under the main policy, written on request next to the
    sweep metrics. `peak` is set for radar trials, whose spectra are exported as
    sections through it.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    experiment: Experiment
    N: int
    seed: int
    covariances: CovarianceSequence | None = None
    spectrum: SpectrumGrid | None = None
    peak: PeakEstimate | None = None
    transfer_functions: dict[str, TransferFunctionEstimate] = {}
    topologies: dict[str, GraphTopology] = {}


class SweepPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    n: int
    consistent: bool
    trials: list[TrialResult]
    aggregates: dict[str, MetricSummary]

    @property
    def failed(self) -> int:
        return sum(trial.status == TrialStatus.FAILED for trial in self.trials)


class SweepResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    experiment: Experiment
    base_seed: int
    points: list[SweepPoint]

    @property
    def N_values(self) -> list[int]:
        return [point.N for point in self.points]

    @property
    def metric_names(self) -> list[str]:
        names: dict[str, None] = {}
        for point in self.points:
            for trial in point.trials:
                names.update(dict.fromkeys(trial.metrics))
                names.update(dict.fromkeys(trial.failures))
        return list(names)

    def point(self, N: int) -> SweepPoint:
        for point in self.points:
            if point.N == N:
                return point
        raise KeyError(f"N={N} is not part of the sweep")


class RunManifest(BaseModel):
    """
    Everything needed to re-run a sweep bit-identically
    """

    version: str
    experiment: Experiment
    config: dict
    config_hash: str
    base_seed: int
    workers: int
    wall_time_s: float
    truncation: dict[int, int]
    consistent: bool
    metric_files: list[str]
