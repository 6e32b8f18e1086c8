import logging
import time
from pathlib import Path

from src.api.cli.decorators import EXIT_OK, handle_cli_errors
from src.api.cli.dependencies import load_experiment_config, resolve_workers
from src.core import __version__
from src.core.covariance.services import sample_autocov
from src.core.exceptions import M2SpecError
from src.core.kinds import CovarianceKind
from src.core.mc.exceptions import ConfigError, ExperimentError, SweepFailedError
from src.core.mc.experiments import export_trial, simulate_field
from src.core.mc.services import run_sweep, trial_seed
from src.core.settings import default_grid_size
from src.core.spectrum.entities import EstimateManifest, FrequencyGrid, TruncationPolicy
from src.core.spectrum.services import min_eigenvalue, policy_eval, truncated_periodogram
from src.fields.managers import field_sample_manager
from src.spectra.managers import spectra_manager
from src.sweeps.managers import sweep_manager

logger = logging.getLogger(__name__)


def _verdict(consistent: bool) -> str:
    return "consistent" if consistent else "not-consistent"


@handle_cli_errors("run")
def cmd_run(
    config_path: str | Path,
    workers: int | None = None,
    dry_run: bool = False,
    out: str | Path | None = None,
    seed: int | None = None,
    export: bool = False,
) -> int:
    config = load_experiment_config(config_path, seed)
    workers = resolve_workers(workers)
    out_dir = Path(out or config.output_dir)

    if dry_run:
        print(
            f"experiment {config.experiment}: {config.trials} trials per N, "
            f"seed {config.base_seed}"
        )
        for policy in [config.policy, *config.compare]:
            for N in config.N_list:
                n, consistent = policy_eval(policy, N)
                print(f"  {policy.label:<24} N={N:<10} n={n:<8} {_verdict(consistent)}")
        return EXIT_OK

    start = time.perf_counter()
    failure = None
    try:
        result = run_sweep(config, workers)
    except SweepFailedError as e:
        result, failure = e.result, e
    except M2SpecError as e:
        raise ExperimentError(config.experiment, e) from e
    elapsed = time.perf_counter() - start
    logger.info("sweep %s finished in %.1fs", config.experiment, elapsed)
    sweep_manager.save(result, config, out_dir, workers, elapsed)
    print(f"wrote results to {out_dir}")
    if export:
        N = max(config.N_list)
        try:
            trial = export_trial(config, N, trial_seed(config.base_seed, N, 0), workers)
        except M2SpecError as e:
            raise ExperimentError(config.experiment, e) from e
        paths = sweep_manager.save_export(trial, out_dir)
        print(f"exported trial 0 at N={N} ({len(paths)} files)")
    if failure is not None:
        raise failure
    return EXIT_OK


@handle_cli_errors("estimate")
def cmd_estimate(
    input_path: str | Path,
    policy: TruncationPolicy,
    kind: CovarianceKind = CovarianceKind.BIASED,
    grid_size: int | None = None,
    out: str | Path | None = None,
    workers: int | None = None,
    covariances_out: str | Path | None = None,
) -> int:
    sample = field_sample_manager.load(input_path)
    workers = resolve_workers(workers)
    if sample.shape.side < 2:
        raise ConfigError(["N"], f"field side must be >= 2, got {sample.shape.side}")
    G = default_grid_size(sample.d) if grid_size is None else grid_size
    if G < 1:
        raise ConfigError(["grid"], f"grid needs at least one point per dimension, got {G}")
    grid = FrequencyGrid(d=sample.d, points_per_dim=G)
    n, consistent = policy_eval(policy, sample.shape.side)

    spec = truncated_periodogram(sample, policy, grid, kind, workers)
    if covariances_out is not None:
        spectra_manager.save_covariances(sample_autocov(sample, n, kind, workers), covariances_out)
    out = Path(out or Path(input_path).with_suffix(".spectrum.csv"))
    spectra_manager.save_spectrum(spec, out)
    spectra_manager.save_estimate_manifest(
        EstimateManifest(
            version=__version__,
            source=str(input_path),
            extents=sample.shape.extents,
            N=sample.shape.side,
            n=n,
            consistent=consistent,
            policy=policy.label,
            covariance_kind=str(kind),
            grid_size=G,
            min_eigenvalue=min_eigenvalue(spec),
        ),
        f"{out}.manifest.json",
    )
    print(f"n={n} ({_verdict(consistent)}); wrote {out}")
    return EXIT_OK


@handle_cli_errors("simulate")
def cmd_simulate(
    config_path: str | Path,
    N: int,
    out: str | Path,
    seed: int | None = None,
) -> int:
    config = load_experiment_config(config_path, seed)
    if N < 2:
        raise ConfigError(["N"], f"N must be >= 2, got {N}")
    try:
        sample = simulate_field(config, N, config.base_seed)
    except M2SpecError as e:
        raise ExperimentError(config.experiment, e) from e
    field_sample_manager.save(sample, out)
    print(f"wrote {config.experiment} field {sample.shape.extents} to {out}")
    return EXIT_OK


@handle_cli_errors("policy-check")
def cmd_policy_check(policy: TruncationPolicy, N_list: list[int]) -> int:
    if any(N < 2 for N in N_list):
        raise ConfigError(["N"], "every N must be >= 2")
    for N in N_list:
        n, consistent = policy_eval(policy, N)
        print(f"{policy.label} N={N} n={n} {_verdict(consistent)}")
    return EXIT_OK
