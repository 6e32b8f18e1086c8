from src.core.exceptions import M2SpecError


class InvalidPolicyError(M2SpecError):
    def __init__(self, reason: str):
        super().__init__(f"Invalid truncation policy: {reason}")


class GridMismatchError(M2SpecError):
    def __init__(self, reason: str):
        super().__init__(f"Frequency grid mismatch: {reason}")


class SplitMismatchError(M2SpecError):
    def __init__(self, split: tuple[int, int], m: int):
        super().__init__(f"Block split {split} does not partition {m} channels")


class NearSingularNodeError(M2SpecError):
    def __init__(self, theta: tuple[float, ...], cond: float):
        self.theta = theta
        self.cond = cond
        super().__init__(
            f"Spectrum is near singular at theta={tuple(round(t, 6) for t in theta)} "
            f"(condition number {cond:.3e})"
        )


class SampleSizeError(M2SpecError):
    def __init__(self, N: int):
        self.N = N
        super().__init__(f"Sample size must be >= 2 per dimension, got N={N}")


class UnsupportedModelError(M2SpecError):
    def __init__(self, name: str):
        super().__init__(f"No exact spectrum for {name}")
