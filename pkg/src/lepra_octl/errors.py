"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Bad configuration input (unknown key, malformed value, out-of-range setting)."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        prefix = ""
        if key is not None:
            prefix += f"key '{key}'"
        if line is not None:
            prefix += f" (line {line})" if prefix else f"line {line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class IntegrationError(RuntimeError):
    """A non-finite value appeared while stepping an ODE system.

    `node` is the index of the mesh node whose value failed the finiteness
    check; `iteration` is set when the failure happened inside an optimizer
    sweep.
    """

    def __init__(self, message: str, node: int | None = None, iteration: int | None = None):
        self.node = node
        self.iteration = iteration
        super().__init__(message)
