"""Exception types shared across the library."""


class HotplugError(Exception):
    """Base class for all library errors."""


class InvalidField(HotplugError):
    """Field order is not a prime or a supported power of two."""


class FieldTooSmall(HotplugError):
    """Requested code length exceeds the number of usable field elements."""


class ShapeError(HotplugError):
    """Mismatched block counts or block lengths."""


class InsufficientSymbols(HotplugError):
    """Fewer than k coded symbols were supplied to the decoder."""


class InvalidParameter(HotplugError):
    """Arguments outside the documented parameter range."""


class SearchFailed(HotplugError):
    """Randomized design search exhausted its budget."""


class NotAnHpPda(HotplugError):
    """No row subset of P aligns star-for-star with B for some active set."""


class ConfigRejected(HotplugError):
    """Scheme configuration violates its feasibility constraints."""


class InvalidRemoval(HotplugError):
    """Removal set exceeds the per-column surplus budget."""


class DecodeFailure(HotplugError):
    """A user could not reconstruct its demanded file."""


class ParseError(HotplugError):
    """Malformed design, PDA, or bundle file."""
