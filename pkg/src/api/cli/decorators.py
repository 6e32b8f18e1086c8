import sys
from functools import wraps

from src.core.exceptions import M2SpecError
from src.core.mc.exceptions import ConfigError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def handle_cli_errors(command: str):
    """
    Turn library errors raised by a command into exit codes and a message on stderr
    """

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs) -> int:
            try:
                return func(*args, **kwargs)
            except ConfigError as e:
                print(f"{command}: {e}", file=sys.stderr)
                return EXIT_CONFIG
            except M2SpecError as e:
                print(f"{command}: {e}", file=sys.stderr)
                return EXIT_FAILED

        return wrapper

    return decorator
