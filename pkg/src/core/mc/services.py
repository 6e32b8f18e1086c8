import logging
from concurrent.futures import ThreadPoolExecutor

from src.core.kinds import Experiment
from src.core.mc.entities import (
    ExperimentConfig,
    MetricSummary,
    SweepPoint,
    SweepResult,
    TrialResult,
)
from src.core.mc.exceptions import ConfigError, SweepFailedError
from src.core.mc.experiments import PRIMARY_METRICS, TRIALS
from src.core.simulate.services import mix_seed
from src.core.spectrum.services import policy_eval

logger = logging.getLogger(__name__)


def trial_seed(base_seed: int, N: int, trial_index: int) -> int:
    """
    Seed of one trial; adding N values or trials leaves existing seeds unchanged
    """
    return mix_seed(base_seed, N, trial_index)


def run_trial(config: ExperimentConfig, N: int, trial_index: int) -> TrialResult:
    seed = trial_seed(config.base_seed, N, trial_index)
    logger.debug("trial %d at N=%d: seed=%d", trial_index, N, seed)
    metrics, failures = TRIALS[config.experiment](config, N, seed)
    for name, reason in failures.items():
        logger.warning("trial %d at N=%d: %s failed (%s)", trial_index, N, name, reason)
    return TrialResult(
        trial_index=trial_index,
        N=N,
        seed=seed,
        metrics=metrics,
        failures=failures,
        primary=PRIMARY_METRICS[config.experiment],
    )


def aggregate(trials: list[TrialResult]) -> dict[str, MetricSummary]:
    """
    Per-metric summaries over the trials where the metric succeeded, in trial order
    """
    names: dict[str, None] = {}
    for trial in trials:
        names.update(dict.fromkeys(trial.metrics))
        names.update(dict.fromkeys(trial.failures))
    return {
        name: MetricSummary.from_values(
            [trial.metrics[name] for trial in trials if name in trial.metrics]
        )
        for name in names
    }


def run_sweep(
    config: ExperimentConfig,
    workers: int = 1,
    *,
    experiment: Experiment | None = None,
    N_list: list[int] | None = None,
    trials: int | None = None,
    base_seed: int | None = None,
) -> SweepResult:
    """
    Every (N, trial) pair of the configured experiment, distributed over
    `workers` threads. Results do not depend on the worker count.
    """
    overrides = {
        key: value
        for key, value in {
            "experiment": experiment,
            "N_list": N_list,
            "trials": trials,
            "base_seed": base_seed,
        }.items()
        if value is not None
    }
    if overrides:
        config = ExperimentConfig.model_validate(config.model_dump() | overrides)
    if workers < 1:
        raise ConfigError(["workers"], f"must be >= 1, got {workers}")

    for policy in [config.policy, *config.compare]:
        if not policy.consistent:
            logger.warning("policy %s does not give a consistent estimator", policy.label)

    tasks = [(N, trial) for N in config.N_list for trial in range(config.trials)]
    logger.info(
        "sweep %s: N=%s, %d trials each, workers=%d",
        config.experiment,
        config.N_list,
        config.trials,
        workers,
    )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda task: run_trial(config, *task), tasks))
    else:
        results = [run_trial(config, N, trial) for N, trial in tasks]

    points = []
    for N in config.N_list:
        at_n = [result for result in results if result.N == N]
        n, consistent = policy_eval(config.policy, N)
        point = SweepPoint(
            N=N, n=n, consistent=consistent, trials=at_n, aggregates=aggregate(at_n)
        )
        for name, summary in point.aggregates.items():
            logger.info(
                "N=%d %s: mean=%.6g median=%.6g (%d ok)",
                N,
                name,
                summary.mean,
                summary.median,
                summary.n_success,
            )
        points.append(point)

    result = SweepResult(
        experiment=config.experiment, base_seed=config.base_seed, points=points
    )
    for point in points:
        if point.failed > config.max_failure_fraction * config.trials:
            raise SweepFailedError(result, point.N, point.failed, config.trials)
    return result
