from src.core.exceptions import M2SpecError


class UnstableFilterError(M2SpecError):
    def __init__(self, reason: str):
        super().__init__(f"Unstable filter: {reason}")


class FilterDimensionError(M2SpecError):
    def __init__(self, reason: str):
        super().__init__(f"Filter dimension mismatch: {reason}")


class InvalidNoiseRatioError(M2SpecError):
    def __init__(self, ratio: float):
        super().__init__(f"noise_ratio must be >= 0, got {ratio}")
