from src.core.exceptions import M2SpecError


class LagWindowOverflowError(M2SpecError):
    def __init__(self, n: int, d: int):
        super().__init__(
            f"Lag window (2*{n}+1)^{d} exceeds the addressable element count"
        )


class EmptyIndexSetError(M2SpecError):
    def __init__(self, k: tuple[int, ...], extents: tuple[int, ...]):
        super().__init__(f"Lag {k} leaves no summation points in block {extents}")


class FieldFormatError(M2SpecError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"Field file line {line}: {reason}")


class FieldReadError(M2SpecError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"Cannot read field file {path}: {reason}")


class LagDimensionError(M2SpecError):
    def __init__(self, block_d: int, d: int):
        super().__init__(f"Block of dimension {block_d} used with a {d}-D lag")


class InvalidLagWindowError(M2SpecError):
    def __init__(self, n: int, d: int):
        super().__init__(f"Lag window needs n >= 0 and d >= 1, got n={n}, d={d}")
