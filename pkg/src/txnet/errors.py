"""Exception hierarchy.

Everything raised on bad *data* derives from :class:`DataError`; the CLI maps
those to exit code 2. Transport failures derive from :class:`ConnectFailed`
(exit code 3), as do ordinary ``OSError`` instances.
"""


class TxnetError(Exception):
    pass


class DataError(TxnetError):
    pass


class _LineError(DataError):
    def __init__(self, line: int, reason: str = ""):
        self.line = line
        self.reason = reason
        msg = f"line {line}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


# ingest
class MalformedMessage(DataError):
    pass


class ZeroInputValue(DataError):
    pass


class CorruptLog(_LineError):
    pass


class ConnectFailed(TxnetError):
    pass


# ledger
class CsvFormatError(_LineError):
    pass


# graph / metrics
class SelfLoopPresent(DataError):
    pass


class EmptyGraph(DataError):
    pass


class NoReachablePairs(DataError):
    pass


class CliqueBudgetExceeded(DataError):
    pass


# distfit
class InsufficientTail(DataError):
    pass


class DegenerateData(DataError):
    pass


class DegenerateAbscissa(DataError):
    pass


class EmptyInput(DataError):
    pass


# linkcomm
class NotAdjacent(DataError):
    pass


class InvalidPartition(DataError):
    pass


# synth
class InvalidSpec(DataError):
    pass
