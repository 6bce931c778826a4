"""Exception types shared across the toolkit."""


class ParameterError(ValueError):
    """Model parameters fall outside the supported regime."""


class DomainError(ValueError):
    """A measure is undefined for the given input (e.g. GC on a complete graph)."""


class DataError(ValueError):
    """Malformed or invalid input data (matrices, manifests, network files)."""


class CapExceeded(RuntimeError):
    """Path enumeration for a pair would exceed the configured path cap."""

    def __init__(self, source, target, cap):
        self.source = source
        self.target = target
        self.cap = cap
        super().__init__(
            f"cap_exceeded: more than {cap} topological shortest paths "
            f"between nodes {source} and {target}"
        )
