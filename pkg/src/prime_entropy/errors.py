"""Exception types shared across the package."""


class PrimeEntropyError(Exception):
    """Base class for all package errors."""


class DomainError(PrimeEntropyError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(PrimeEntropyError, IndexError):
    """A query reaches beyond the limit of the prime table it was given."""


class ResourceError(PrimeEntropyError, MemoryError):
    """A request would exceed a configured memory or work budget."""


class CacheFormatError(PrimeEntropyError, ValueError):
    """A prime cache file is malformed or inconsistent with its header."""
