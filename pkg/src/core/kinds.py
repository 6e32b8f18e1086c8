from enum import StrEnum


class ListableEnum(StrEnum):
    @classmethod
    def list(cls):
        return [member for member in cls]


class ScalarKind(ListableEnum):
    REAL = "real"
    COMPLEX = "complex"


class NoiseKind(ListableEnum):
    REAL_GAUSSIAN = "real-gaussian"
    CIRCULAR_COMPLEX = "circular-complex"


class CovarianceKind(ListableEnum):
    UNBIASED = "unbiased"
    BIASED = "biased"
    EXACT = "exact"


class FilterMode(ListableEnum):
    FORWARD = "forward"
    INVERSE = "inverse"


class Provenance(ListableEnum):
    ESTIMATED = "estimated"
    EXACT = "exact"


class PolicyFamily(ListableEnum):
    CUBE_ROOT = "cube-root"
    POWER = "power"
    LINEAR_FRACTION = "linear-fraction"
    CONSTANT = "constant"
    FULL = "full"


class TransferMethod(ListableEnum):
    RAW = "raw-etfe"
    SMOOTHED = "smoothed"


class EntryNorm(ListableEnum):
    L1 = "l1"
    L1_MEAN = "l1-mean"
    SUP = "sup"


class PeakDistance(ListableEnum):
    EUCLIDEAN = "euclidean"
    WRAPPED = "wrapped"


class Experiment(ListableEnum):
    ETFE = "etfe"
    GRAPH = "graph"
    RADAR = "radar"
    CONSISTENCY = "consistency"


class TrialStatus(ListableEnum):
    OK = "ok"
    FAILED = "failed"
