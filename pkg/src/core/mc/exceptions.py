from src.core.exceptions import M2SpecError


class ZeroReferenceError(M2SpecError):
    def __init__(self, what: str):
        super().__init__(f"Reference {what} vanishes; relative error is undefined")


class SweepFailedError(M2SpecError):
    def __init__(self, result, N: int, failed: int, trials: int):
        self.result = result
        super().__init__(
            f"{failed} of {trials} trials failed at N={N}, above the tolerated fraction"
        )


class ConfigError(M2SpecError):
    def __init__(self, keys: list[str], reason: str):
        self.keys = keys
        super().__init__(f"Invalid config ({', '.join(keys)}): {reason}")


class ExperimentError(M2SpecError):
    def __init__(self, experiment: str, cause: Exception):
        self.experiment = experiment
        super().__init__(f"experiment {experiment}: {type(cause).__name__}: {cause}")


class MetricInputError(M2SpecError):
    def __init__(self, reason: str):
        super().__init__(f"Metric inputs do not match: {reason}")
