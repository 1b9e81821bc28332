"""Exception types raised across the package."""


class DormancyError(Exception):
    """Base class for all package errors."""


class MalformedHeaderError(DormancyError):
    pass


class DuplicateIdError(DormancyError):
    def __init__(self, paper_id):
        super().__init__(f"duplicate paper id: {paper_id!r}")
        self.paper_id = paper_id


class UnknownPaperError(DormancyError, KeyError):
    def __init__(self, paper_id):
        super().__init__(f"unknown paper id: {paper_id!r}")
        self.paper_id = paper_id

    def __str__(self):
        return self.args[0]


class SamePaperError(DormancyError, ValueError):
    pass


class VersionMismatchError(DormancyError):
    pass


class CorruptFileError(DormancyError):
    pass


class EmptySeriesError(DormancyError, ValueError):
    pass


class EmptyCorpusError(DormancyError):
    pass


class NoPrinceError(DormancyError):
    pass


class EmptySamplesError(DormancyError, ValueError):
    pass


class NonPositiveBandwidthError(DormancyError, ValueError):
    pass


class EmptyInputError(DormancyError, ValueError):
    pass


class InfeasibleConfigError(DormancyError, ValueError):
    pass


class InfeasibleSpecError(DormancyError, ValueError):
    pass


class UnknownSbError(DormancyError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else ""
