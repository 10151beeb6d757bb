class RptError(Exception):
    """Base class for every error raised by the toolkit."""


class FrontendError(RptError):
    pass


class ParseError(FrontendError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class DuplicateFunctionError(FrontendError):
    pass


class UndeclaredCalleeError(FrontendError):
    pass


class ArityError(FrontendError):
    pass


class DuplicateParameterError(FrontendError):
    pass


class ReusedSamplingVariableError(FrontendError):
    pass


class SamplingVariableMisuseError(FrontendError):
    pass


class DistributionError(RptError):
    pass


class ValuationError(RptError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class EvaluationError(RptError):
    pass


class CertificateFormatError(RptError):
    pass


class VerifyBoxError(RptError):
    pass


class DisabledActionError(RptError):
    pass


class TerminalEntryError(RptError):
    pass


class BoundHypothesisError(RptError):
    pass


class OutsideValidityDomainError(BoundHypothesisError):
    pass


class UnsupportedQueryError(RptError):
    pass


class ConfigError(RptError):
    pass
