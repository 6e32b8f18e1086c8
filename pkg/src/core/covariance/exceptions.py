from src.core.exceptions import M2SpecError


class TruncationTooLargeError(M2SpecError):
    def __init__(self, n: int, side: int):
        super().__init__(
            f"Truncation n={n} is too large for a block of side {side} (need n <= {side - 1})"
        )


class IncompleteLagWindowError(M2SpecError):
    def __init__(self, missing: tuple[int, ...], n: int):
        super().__init__(f"Lag {missing} is missing from the lag window of order {n}")


class NegativeTruncationError(M2SpecError):
    def __init__(self, n: int):
        super().__init__(f"Truncation must be >= 0, got n={n}")


class CovarianceKindError(M2SpecError):
    def __init__(self, kind):
        super().__init__(f"Sample covariances are either biased or unbiased, got {kind}")
