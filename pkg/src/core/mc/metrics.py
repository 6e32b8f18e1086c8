import numpy as np

from src.core.apps.entities import GraphTopology, PeakEstimate
from src.core.kinds import PeakDistance
from src.core.mc.exceptions import MetricInputError, ZeroReferenceError
from src.core.spectrum.entities import SpectrumGrid
from src.core.spectrum.exceptions import GridMismatchError

DEFAULT_HORIZON: int = 300


def metric_impulse_error(g_true, g_hat, horizon: int = DEFAULT_HORIZON) -> float:
    """
    sqrt( sum_{t<=horizon} (g - g_hat)^2 / sum_{t<=horizon} g^2 )
    """
    g_true = np.asarray(g_true, dtype=np.float64)
    g_hat = np.asarray(g_hat, dtype=np.float64)
    if len(g_true) < horizon + 1 or len(g_hat) < horizon + 1:
        raise MetricInputError(f"both impulse responses must cover t = 0..{horizon}")
    g_true, g_hat = g_true[: horizon + 1], g_hat[: horizon + 1]
    reference = float(np.sum(g_true**2))
    if reference == 0.0:
        raise ZeroReferenceError("impulse response")
    return float(np.sqrt(np.sum((g_true - g_hat) ** 2) / reference))


def _check_grids(exact: SpectrumGrid, est: SpectrumGrid) -> None:
    if exact.grid != est.grid:
        raise GridMismatchError(f"{exact.grid} vs {est.grid}")
    if exact.values.shape != est.values.shape:
        raise GridMismatchError(f"values {exact.values.shape} vs {est.values.shape}")


def _frobenius(values: np.ndarray) -> np.ndarray:
    return np.linalg.norm(values, ord="fro", axis=(-2, -1))


def metric_spectrum_error(exact: SpectrumGrid, est: SpectrumGrid) -> float:
    """
    Grid mean of |Phi_hat - Phi|_F over grid mean of |Phi|_F
    """
    _check_grids(exact, est)
    reference = float(_frobenius(exact.flat_values()).mean())
    if reference == 0.0:
        raise ZeroReferenceError("spectrum")
    return float(_frobenius(est.flat_values() - exact.flat_values()).mean() / reference)


def metric_spectrum_mse(exact: SpectrumGrid, est: SpectrumGrid) -> float:
    _check_grids(exact, est)
    return float((_frobenius(est.flat_values() - exact.flat_values()) ** 2).mean())


def metric_edge_error(true_graph: GraphTopology, est_graph: GraphTopology) -> int:
    if true_graph.m != est_graph.m:
        raise MetricInputError(f"graphs have {true_graph.m} and {est_graph.m} nodes")
    return len(true_graph.edges ^ est_graph.edges)


def metric_peak_error(
    omega_true,
    peak: PeakEstimate,
    distance: PeakDistance = PeakDistance.EUCLIDEAN,
) -> float:
    omega_true = np.asarray(omega_true, dtype=np.float64)
    omega_hat = np.asarray(peak.omega_hat, dtype=np.float64)
    if omega_hat.shape != omega_true.shape:
        raise MetricInputError("peak and true frequency differ in dimension")
    diff = omega_hat - omega_true
    if distance == PeakDistance.WRAPPED:
        diff = np.mod(diff + np.pi, 2 * np.pi) - np.pi
    return float(np.linalg.norm(diff))
