"""
One Monte Carlo trial per experiment: simulate data for (N, seed), run every
configured estimator and return its metrics.

Each estimator is isolated: a library error fails that estimator's metrics only.
"""

from collections.abc import Callable

import numpy as np

from src.core.apps.entities import GraphTopology
from src.core.apps.services import (
    etfe_raw,
    etfe_smoothed,
    graph_topology,
    impulse_from_tf,
    radar_peak,
)
from src.core.covariance.services import sample_autocov
from src.core.exceptions import M2SpecError
from src.core.kinds import Experiment
from src.core.lattice.entities import BlockShape, FieldSample
from src.core.mc.entities import ExperimentConfig, TrialExport
from src.core.mc.metrics import (
    metric_edge_error,
    metric_impulse_error,
    metric_peak_error,
    metric_spectrum_error,
    metric_spectrum_mse,
)
from src.core.simulate.entities import GraphicalSpec, RadarModel
from src.core.simulate.services import (
    REFERENCE_RADAR_OMEGA,
    gen_etfe_dataset,
    gen_graphical_field,
    gen_ma_field,
    gen_radar_field,
    make_rng,
    mix_seed,
    runge_impulse_response,
)
from src.core.spectrum.entities import FrequencyGrid, TruncationPolicy
from src.core.spectrum.services import (
    exact_spectrum,
    full_periodogram,
    periodogram,
    policy_eval,
    truncated_periodogram,
)

Metrics = dict[str, float]
Failures = dict[str, str]


class TrialRecorder:
    """
    Collects metric values, turning library errors into per-metric failures
    """

    def __init__(self):
        self.metrics: Metrics = {}
        self.failures: Failures = {}

    def record(
        self, names: list[str], compute: Callable[[], tuple[float, ...]]
    ) -> None:
        try:
            values = compute()
        except M2SpecError as e:
            for name in names:
                self.failures[name] = f"{type(e).__name__}: {e}"
            return
        for name, value in zip(names, values):
            self.metrics[name] = float(value)


def _estimators(config: ExperimentConfig) -> list[tuple[str, TruncationPolicy]]:
    """
    (metric suffix, policy) pairs; the main policy carries no suffix
    """
    pairs = [("", config.policy)]
    pairs += [(f"_{policy.slug}", policy) for policy in config.compare]
    return pairs


def structural_topology(wspec: GraphicalSpec) -> GraphTopology:
    """
    Edges of W^-H W^-1: {i, j} whenever some row of W^-1 is non-zero in both columns
    """
    edges = set()
    for row in wspec.sections:
        support = [j + 1 for j, section in enumerate(row) if section is not None]
        edges.update((i, j) for i in support for j in support if i < j)
    return GraphTopology(m=wspec.m, edges=edges)


def etfe_trial(
    config: ExperimentConfig, N: int, seed: int, workers: int = 1
) -> tuple[Metrics, Failures]:
    g = runge_impulse_response(config.impulse_taps)
    data = gen_etfe_dataset(g, config.input_filter, N, config.noise_ratio, seed)
    grid = FrequencyGrid(d=1, points_per_dim=config.resolved_grid_size)
    reference = g[: config.horizon + 1]
    recorder = TrialRecorder()

    for suffix, policy in _estimators(config):
        recorder.record(
            [f"impulse_error{suffix}"],
            lambda policy=policy: (
                metric_impulse_error(
                    reference,
                    impulse_from_tf(
                        etfe_smoothed(data.u, data.y, policy, grid, workers=workers),
                        config.horizon,
                    ),
                    config.horizon,
                ),
            ),
        )
    if config.baseline:
        recorder.record(
            ["impulse_error_raw"],
            lambda: (
                metric_impulse_error(
                    reference,
                    impulse_from_tf(etfe_raw(data.u, data.y, grid), config.horizon),
                    config.horizon,
                ),
            ),
        )
    return recorder.metrics, recorder.failures


def graph_trial(
    config: ExperimentConfig, N: int, seed: int, workers: int = 1
) -> tuple[Metrics, Failures]:
    y = gen_graphical_field(config.graph, N, seed, burn_in=config.burn_in)
    grid = FrequencyGrid(d=1, points_per_dim=config.resolved_grid_size)
    exact = exact_spectrum(config.graph, grid)
    truth = structural_topology(config.graph)
    recorder = TrialRecorder()

    for suffix, policy in _estimators(config):

        def evaluate(policy=policy):
            est = truncated_periodogram(y, policy, grid, config.covariance_kind, workers)
            topology = graph_topology(
                est, config.threshold, config.entry_norm, config.cond_limit
            )
            return metric_edge_error(truth, topology), metric_spectrum_error(exact, est)

        recorder.record([f"edges{suffix}", f"spectrum_error{suffix}"], evaluate)
    return recorder.metrics, recorder.failures


def draw_omega(seed: int) -> tuple[float, float, float]:
    """
    Uniform peak location in [0, 2*pi)^3
    """
    omega = make_rng(seed).uniform(0.0, 2 * np.pi, size=3)
    return tuple(float(w) for w in np.mod(omega, 2 * np.pi))


def _radar_model(config: ExperimentConfig, seed: int) -> RadarModel:
    omega = config.radar.omega or draw_omega(mix_seed(seed, "omega"))
    return RadarModel(rho=config.radar.rho, omega=omega, lambda2=config.radar.lambda2)


def radar_trial(
    config: ExperimentConfig, N: int, seed: int, workers: int = 1
) -> tuple[Metrics, Failures]:
    model = _radar_model(config, seed)
    omega = model.omega
    y = gen_radar_field(model, N, seed)
    grid = FrequencyGrid(d=3, points_per_dim=config.resolved_grid_size)
    exact = exact_spectrum(model, grid)
    recorder = TrialRecorder()
    recorder.record(
        ["degenerate_truth"], lambda: (float(radar_peak(exact).degenerate),)
    )

    def evaluate(est):
        return (
            metric_peak_error(omega, radar_peak(est), config.peak_distance),
            metric_spectrum_error(exact, est),
        )

    for suffix, policy in _estimators(config):
        recorder.record(
            [f"peak_error{suffix}", f"spectrum_error{suffix}"],
            lambda policy=policy: evaluate(
                truncated_periodogram(y, policy, grid, config.covariance_kind, workers)
            ),
        )
    if config.baseline:
        recorder.record(
            ["peak_error_full", "spectrum_error_full"],
            lambda: evaluate(full_periodogram(y, grid)),
        )
    return recorder.metrics, recorder.failures


def consistency_trial(
    config: ExperimentConfig, N: int, seed: int, workers: int = 1
) -> tuple[Metrics, Failures]:
    kernel = config.ma
    y = gen_ma_field(kernel, BlockShape.cube(N, kernel.d), seed)
    grid = FrequencyGrid(d=kernel.d, points_per_dim=config.resolved_grid_size)
    exact = exact_spectrum(kernel, grid)
    recorder = TrialRecorder()

    for suffix, policy in _estimators(config):

        def evaluate(policy=policy):
            est = truncated_periodogram(y, policy, grid, config.covariance_kind, workers)
            return metric_spectrum_error(exact, est), metric_spectrum_mse(exact, est)

        recorder.record([f"spectrum_error{suffix}", f"mse{suffix}"], evaluate)
    return recorder.metrics, recorder.failures


TRIALS = {
    Experiment.ETFE: etfe_trial,
    Experiment.GRAPH: graph_trial,
    Experiment.RADAR: radar_trial,
    Experiment.CONSISTENCY: consistency_trial,
}

PRIMARY_METRICS: dict[Experiment, tuple[str, ...]] = {
    Experiment.ETFE: ("impulse_error",),
    Experiment.GRAPH: ("edges", "spectrum_error"),
    Experiment.RADAR: ("peak_error", "spectrum_error"),
    Experiment.CONSISTENCY: ("spectrum_error", "mse"),
}


def simulate_field(config: ExperimentConfig, N: int, seed: int) -> FieldSample:
    """
    One realization of the experiment's generative model; the ETFE record is
    stored as the stacked field (y, u)
    """
    match config.experiment:
        case Experiment.ETFE:
            g = runge_impulse_response(config.impulse_taps)
            data = gen_etfe_dataset(g, config.input_filter, N, config.noise_ratio, seed)
            return FieldSample.from_array(np.stack([data.y, data.u], axis=-1))
        case Experiment.GRAPH:
            return gen_graphical_field(config.graph, N, seed, burn_in=config.burn_in)
        case Experiment.RADAR:
            model = RadarModel(
                rho=config.radar.rho,
                omega=config.radar.omega or REFERENCE_RADAR_OMEGA,
                lambda2=config.radar.lambda2,
            )
            return gen_radar_field(model, N, seed)
        case Experiment.CONSISTENCY:
            return gen_ma_field(config.ma, BlockShape.cube(N, config.ma.d), seed)


def export_trial(
    config: ExperimentConfig, N: int, seed: int, workers: int = 1
) -> TrialExport:
    """
    Estimates of the main policy on the data of trial (N, seed); comparison
    policies are not exported
    """
    policy, kind = config.policy, config.covariance_kind
    grid = FrequencyGrid(d=config.d, points_per_dim=config.resolved_grid_size)
    export = {"experiment": config.experiment, "N": N, "seed": seed}

    match config.experiment:
        case Experiment.ETFE:
            g = runge_impulse_response(config.impulse_taps)
            data = gen_etfe_dataset(g, config.input_filter, N, config.noise_ratio, seed)
            tfs = {"smoothed": etfe_smoothed(data.u, data.y, policy, grid, workers=workers)}
            if config.baseline:
                tfs["raw"] = etfe_raw(data.u, data.y, grid)
            return TrialExport(**export, transfer_functions=tfs)
        case Experiment.RADAR:
            y = gen_radar_field(_radar_model(config, seed), N, seed)
            spec = truncated_periodogram(y, policy, grid, kind, workers)
            return TrialExport(**export, spectrum=spec, peak=radar_peak(spec))
        case Experiment.GRAPH:
            y = gen_graphical_field(config.graph, N, seed, burn_in=config.burn_in)
        case Experiment.CONSISTENCY:
            y = gen_ma_field(config.ma, BlockShape.cube(N, config.ma.d), seed)

    n, _ = policy_eval(policy, N)
    covs = sample_autocov(y, n, kind, workers)
    spec = periodogram(covs, grid)
    topologies = {}
    if config.experiment == Experiment.GRAPH:
        topologies = {
            "estimated": graph_topology(
                spec, config.threshold, config.entry_norm, config.cond_limit
            ),
            "structural": structural_topology(config.graph),
        }
    return TrialExport(**export, covariances=covs, spectrum=spec, topologies=topologies)
