"""Exception hierarchy shared by all modules."""


class AnisoError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class DegenerateSimplex(AnisoError):
    pass


class FactorizationFailure(AnisoError):
    pass


class UnsupportedDegree(AnisoError):
    pass


class WrongDimension(AnisoError):
    pass


class UnsupportedKind(AnisoError):
    pass


class QuadratureFailure(AnisoError):
    pass


class SingularGram(AnisoError):
    pass


class MissingDerivative(AnisoError):
    pass


class InvalidN(AnisoError):
    pass


class NonConformal(AnisoError):
    pass


class ParseError(AnisoError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
