from src.core.exceptions import M2SpecError


class AllNodesUndefinedError(M2SpecError):
    def __init__(self):
        super().__init__("Input transform vanishes at every frequency node")


class TooManyUndefinedNodesError(M2SpecError):
    def __init__(self, undefined: int, total: int):
        super().__init__(
            f"{undefined} of {total} frequency nodes are undefined (limit is 10%)"
        )


class ScalarSpectrumRequiredError(M2SpecError):
    def __init__(self, m: int):
        super().__init__(f"Peak search needs a scalar spectrum, got {m} channels")


class TransferInputError(M2SpecError):
    def __init__(self, reason: str):
        super().__init__(f"Invalid transfer function input: {reason}")


class HorizonTooLongError(M2SpecError):
    def __init__(self, horizon: int, G: int):
        super().__init__(f"A {G}-point grid cannot resolve horizon {horizon}")


class InvalidThresholdError(M2SpecError):
    def __init__(self, threshold: float):
        super().__init__(f"Threshold must be >= 0, got {threshold}")


class UnknownEntryNormError(M2SpecError):
    def __init__(self, norm):
        super().__init__(f"Unknown entry norm {norm}")
