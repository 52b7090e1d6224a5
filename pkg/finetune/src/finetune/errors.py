"""Failure types raised by the training and export pipeline."""


class FinetuneError(Exception):
    """Base class for every error this package raises on purpose."""


class DatasetError(FinetuneError):
    """Dataset file unusable: bad header, malformed rows, wrong label set."""


class ExportMismatch(FinetuneError):
    """Exported artifacts disagree with the trained network on probe texts."""
