"""Exception hierarchy shared by the fuzzy agent packages."""


class FuzzyAgentError(Exception):
    """Base class for all errors raised by this project."""


# FML parsing / serialization

class FmlError(FuzzyAgentError):
    pass


class MalformedXml(FmlError):
    pass


class UnknownShape(FmlError):
    pass


class UnknownElement(FmlError):
    pass


class DanglingReference(FmlError):
    pass


class MissingAttribute(FmlError):
    pass


class InvalidSystem(FmlError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid fuzzy system")


# Datasets

class DatasetError(FuzzyAgentError):
    pass


class SchemaMismatch(DatasetError):
    pass


class NonNumericCell(DatasetError):
    pass


class EmptyDataset(DatasetError):
    pass


class TooFewRecords(DatasetError):
    pass


# Inference / learning

class ShapeMismatch(FuzzyAgentError):
    pass


class MissingInput(FuzzyAgentError):
    pass


class NonFiniteInput(MissingInput):
    pass


class ZeroArea(FuzzyAgentError):
    pass


# Content ontology

class ContentGraphError(FuzzyAgentError):
    pass


class UnknownGrade(ContentGraphError):
    pass


class CyclicGraph(ContentGraphError):
    pass


class UnknownContent(ContentGraphError):
    pass
