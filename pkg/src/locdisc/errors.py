class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ResourceError(RuntimeError):
    """A request exceeds the memory/runtime policy (dense oracles, large N)."""
