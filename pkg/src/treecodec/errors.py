"""Exception types raised across the package.

Every condition a caller may want to catch has its own class; catching
:class:`TreecodecError` covers all of them.  Input-data problems (bad files,
bad records) and domain problems (capacity, collisions) are kept separate so
the CLI can map them to distinct exit codes.
"""

from __future__ import annotations


class TreecodecError(Exception):
    """Base class for all errors raised by this package."""


# --- decomposition parsing ---------------------------------------------------

class MalformedIdsError(TreecodecError):
    """An IDS string is truncated, empty, or has trailing material."""


class UnknownOperatorError(TreecodecError):
    """A codepoint from the IDC block that is not a supported operator."""


class TreeTooDeepError(TreecodecError):
    """A tree node falls below the last level of the full embedding tree."""


class RadicalOverflowError(TreecodecError):
    """A tree carries more radical leaves than the code layout allows."""


# --- code tables and codebooks -----------------------------------------------

class ParamsTooSmallError(TreecodecError):
    """Code layout too small to give every structure operator a distinct code."""


class CapacityExceededError(TreecodecError):
    """Random code generation cannot place all radicals at the requested
    length and minimum distance."""


class UnknownRadicalError(TreecodecError):
    """A tree leaf has no entry in the radical code table."""


class DuplicateCharacterError(TreecodecError):
    """The same character appears twice in a decomposition source."""


class CodeCollisionError(TreecodecError):
    """Two characters encode to the same code vector."""


class DuplicateRadicalError(TreecodecError):
    """The same radical appears twice in a prototype code file."""


class DuplicateCodeError(TreecodecError):
    """Two radicals in a prototype code file share one code."""


class WrongLengthError(TreecodecError):
    """A prototype code row does not match the configured code length."""


class ZeroVectorError(TreecodecError):
    """A radical code with no nonzero entries; such a code can never score."""


class BadFormatError(TreecodecError):
    """A prototype code file line that does not parse."""


# --- serialized containers ---------------------------------------------------

class VersionMismatchError(TreecodecError):
    """A codebook file written by an incompatible format version."""


class CorruptError(TreecodecError):
    """A codebook file that fails checksum, magic, or structural checks."""


# --- similarity and losses ---------------------------------------------------

class DimensionMismatchError(TreecodecError):
    """Frame length does not match the codebook's code length."""


class NonFiniteError(TreecodecError):
    """NaN or infinity where finite values are required."""


class InfeasibleLabelError(TreecodecError):
    """A label sequence no frame alignment can produce."""


class TooLargeError(TreecodecError):
    """A brute-force enumeration beyond its supported instance size."""


class BadLabelError(TreecodecError):
    """A label index outside the codebook's range."""
