import csv
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from src.core.apps.entities import GraphTopology, TransferFunctionEstimate
from src.core.covariance.entities import CovarianceSequence
from src.core.spectrum.entities import EstimateManifest, SpectrumGrid
from src.core.spectrum.services import spectrum_section

logger = logging.getLogger(__name__)


def _entry_columns(prefix: str, m: int, complex_entries: bool) -> list[str]:
    names = [f"{prefix}{i + 1}{j + 1}" for i in range(m) for j in range(m)]
    if not complex_entries:
        return names
    return [f"{name}_{part}" for name in names for part in ("re", "im")]


def _entry_values(matrix: np.ndarray, complex_entries: bool) -> list[str]:
    if not complex_entries:
        return [repr(float(x)) for x in matrix.ravel()]
    return [repr(float(part)) for z in matrix.ravel() for part in (z.real, z.imag)]


class SpectraManager:
    """
    CSV export of covariance sequences, spectra and the application results
    """

    def _open(self, path: str | Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path, path.open("w", newline="")

    def save_covariances(self, covs: CovarianceSequence, path: str | Path) -> Path:
        """
        Columns k_1..k_d then the m*m entries row-major
        """
        complex_entries = np.iscomplexobj(covs.values)
        path, f = self._open(path)
        with f:
            writer = csv.writer(f)
            writer.writerow(
                [f"k{j + 1}" for j in range(covs.d)]
                + _entry_columns("r", covs.channels, complex_entries)
            )
            for k, matrix in covs.items():
                writer.writerow([*k.components, *_entry_values(matrix, complex_entries)])
        logger.info("wrote %d covariance lags to %s", len(covs.lags), path)
        return path

    def save_spectrum(self, spec: SpectrumGrid, path: str | Path) -> Path:
        """
        Columns theta_1..theta_d then the m*m entries as (re, im) pairs, one
        row per node in canonical grid order
        """
        path, f = self._open(path)
        flat = spec.flat_values()
        with f:
            writer = csv.writer(f)
            writer.writerow(
                [f"theta{j + 1}" for j in range(spec.grid.d)]
                + _entry_columns("phi", spec.channels, True)
            )
            for theta, matrix in zip(spec.grid.nodes(), flat):
                writer.writerow(
                    [repr(float(t)) for t in theta] + _entry_values(matrix, True)
                )
        logger.info("wrote %d spectrum nodes to %s", spec.grid.size, path)
        return path

    def save_section(
        self, spec: SpectrumGrid, point: Sequence[float], axis: int, path: str | Path
    ) -> Path:
        """
        The spectrum along one axis through the node nearest `point`: column
        theta then the m*m entries as (re, im) pairs
        """
        theta, section = spectrum_section(spec, point, axis)
        path, f = self._open(path)
        with f:
            writer = csv.writer(f)
            writer.writerow(["theta", *_entry_columns("phi", spec.channels, True)])
            for t, matrix in zip(theta, section):
                writer.writerow([repr(float(t)), *_entry_values(matrix, True)])
        return path

    def save_transfer_function(
        self, tf: TransferFunctionEstimate, path: str | Path
    ) -> Path:
        path, f = self._open(path)
        with f:
            writer = csv.writer(f)
            writer.writerow(["node", "re", "im", "defined"])
            for node, (value, defined) in enumerate(zip(tf.values, tf.defined)):
                parts = (value.real, value.imag) if defined else (np.nan, np.nan)
                writer.writerow([node, *(repr(float(p)) for p in parts), int(defined)])
        return path

    def save_topology(self, topology: GraphTopology, path: str | Path) -> Path:
        """
        Edge list, one `i j` pair per line
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(f"{i} {j}\n" for i, j in topology.sorted_edges()))
        return path

    def save_estimate_manifest(self, manifest: EstimateManifest, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(manifest.model_dump_json(indent=2) + "\n")
        return path


spectra_manager = SpectraManager()
