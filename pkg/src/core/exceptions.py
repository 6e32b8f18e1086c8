class M2SpecError(Exception):
    """
    Base class for every domain error raised by the library
    """
