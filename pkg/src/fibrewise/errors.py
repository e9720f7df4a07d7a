"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input and precondition problems exit 2,
verification mismatches exit 1.
"""


class FibrewiseError(Exception):
    """Base class for all package errors."""


class InputError(FibrewiseError, ValueError):
    """Malformed or unknown input (bad point reference, unbounded enumeration, parse failure)."""


class PreconditionError(FibrewiseError, ValueError):
    """Well-formed input that violates an operation's precondition."""


class UnsupportedInputError(InputError):
    """Input outside the decidable fragment an operation handles."""


class VerificationError(FibrewiseError):
    """An identity that must hold exactly did not."""

    def __init__(self, identity, detail=""):
        self.identity = identity
        self.detail = detail
        msg = identity if not detail else f"{identity}: {detail}"
        super().__init__(msg)
