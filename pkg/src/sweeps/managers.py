import csv
import hashlib
import json
import logging
from pathlib import Path

from src.core import __version__
from src.core.kinds import TrialStatus
from src.core.mc.entities import ExperimentConfig, RunManifest, SweepResult, TrialExport
from src.core.spectrum.services import policy_eval
from src.spectra.managers import spectra_manager

logger = logging.getLogger(__name__)

AGGREGATES_FILE = "aggregates.csv"
MANIFEST_FILE = "manifest.json"
EXPORT_DIR = "trial_export"


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


class SweepManager:
    """
    Writes a SweepResult as one CSV per metric, an aggregate CSV and a manifest
    """

    def save_metrics(self, result: SweepResult, out_dir: Path) -> list[str]:
        files = []
        for name in result.metric_names:
            path = out_dir / f"{name}.csv"
            with path.open("w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(["N", "trial", "value", "seed", "status"])
                for point in result.points:
                    for trial in point.trials:
                        ok = name in trial.metrics
                        writer.writerow(
                            [
                                point.N,
                                trial.trial_index,
                                repr(trial.metrics[name]) if ok else "nan",
                                trial.seed,
                                TrialStatus.OK if ok else TrialStatus.FAILED,
                            ]
                        )
            files.append(path.name)
        return files

    def save_aggregates(self, result: SweepResult, out_dir: Path) -> Path:
        path = out_dir / AGGREGATES_FILE
        with path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["metric", "N", "mean", "median", "q1", "q3", "n_success"])
            for name in result.metric_names:
                for point in result.points:
                    summary = point.aggregates.get(name)
                    if summary is None:
                        continue
                    writer.writerow(
                        [
                            name,
                            point.N,
                            repr(summary.mean),
                            repr(summary.median),
                            repr(summary.q1),
                            repr(summary.q3),
                            summary.n_success,
                        ]
                    )
        return path

    def save(
        self,
        result: SweepResult,
        config: ExperimentConfig,
        out_dir: str | Path,
        workers: int,
        wall_time_s: float,
    ) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        files = self.save_metrics(result, out_dir)
        self.save_aggregates(result, out_dir)

        manifest = RunManifest(
            version=__version__,
            experiment=config.experiment,
            config=config.model_dump(mode="json"),
            config_hash=config_hash(config),
            base_seed=config.base_seed,
            workers=workers,
            wall_time_s=wall_time_s,
            truncation={N: policy_eval(config.policy, N)[0] for N in config.N_list},
            consistent=config.policy.consistent,
            metric_files=files,
        )
        path = out_dir / MANIFEST_FILE
        path.write_text(manifest.model_dump_json(indent=2) + "\n")
        logger.info("wrote %d metric files, aggregates and manifest to %s", len(files), out_dir)
        return path

    def save_export(self, export: TrialExport, out_dir: str | Path) -> list[Path]:
        """
        Files under <out_dir>/trial_export/N<N>/. A radar spectrum is written as
        one section per axis through the estimated peak, other spectra in full.
        """
        target = Path(out_dir) / EXPORT_DIR / f"N{export.N}"
        paths = []
        if export.covariances is not None:
            paths.append(
                spectra_manager.save_covariances(export.covariances, target / "covariances.csv")
            )
        if export.spectrum is not None and export.peak is not None:
            for axis in range(export.spectrum.grid.d):
                paths.append(
                    spectra_manager.save_section(
                        export.spectrum,
                        export.peak.omega_hat,
                        axis,
                        target / f"section_axis{axis + 1}.csv",
                    )
                )
        elif export.spectrum is not None:
            paths.append(spectra_manager.save_spectrum(export.spectrum, target / "spectrum.csv"))
        for name, tf in export.transfer_functions.items():
            paths.append(
                spectra_manager.save_transfer_function(tf, target / f"transfer_{name}.csv")
            )
        for name, topology in export.topologies.items():
            paths.append(spectra_manager.save_topology(topology, target / f"{name}.edges"))
        logger.info(
            "exported trial seed=%d at N=%d to %s (%d files)",
            export.seed,
            export.N,
            target,
            len(paths),
        )
        return paths


sweep_manager = SweepManager()
