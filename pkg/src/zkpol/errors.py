"""Exception hierarchy shared across the package."""


class ZkpolError(Exception):
    """Base class for every error raised by zkpol."""


class DivisionByZero(ZkpolError, ZeroDivisionError):
    pass


class EmptyInput(ZkpolError, ValueError):
    pass


class DecodeError(ZkpolError, ValueError):
    """Bytes do not decode to a canonical value."""


# arithmetization

class InvalidLevel(ZkpolError, ValueError):
    pass


class FieldTooSmall(ZkpolError, ValueError):
    pass


class MissingInput(ZkpolError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InternalInconsistency(ZkpolError):
    pass


class UnsatisfiedWitness(ZkpolError):
    pass


# snark

class KeyMismatch(ZkpolError):
    pass


class MalformedProof(ZkpolError, ValueError):
    pass


class ArityMismatch(ZkpolError, ValueError):
    pass


# identity

class OpenFailed(ZkpolError):
    """Envelope could not be authenticated for this recipient."""


# ledger

class DuplicateRecord(ZkpolError):
    pass


class NothingToMine(ZkpolError):
    pass


class ScenarioError(ZkpolError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
