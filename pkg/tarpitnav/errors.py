"""
Exception hierarchy

Alle Fehler des Pakets erben von TarpitNavError, damit die CLI sie einheitlich als
maschinenlesbaren Fehler-Datensatz ausgeben kann. Eingabefehler erben zusätzlich von ValueError.
"""


class TarpitNavError(Exception):
    """Base class for all errors raised by tarpitnav."""


### Screen ###
class MalformedDocument(TarpitNavError, ValueError):
    pass


class MalformedBounds(TarpitNavError, ValueError):
    pass


class EmptyDocument(TarpitNavError, ValueError):
    pass


### Features ###
class EmptyCorpus(TarpitNavError, ValueError):
    pass


class EmbedderUnavailable(TarpitNavError):
    pass


### Motifs ###
class DegenerateInput(TarpitNavError, ValueError):
    pass


class InsufficientClassSupport(TarpitNavError, ValueError):
    pass


class DatasetError(TarpitNavError, ValueError):
    pass


class ModelFormatError(TarpitNavError, ValueError):
    pass


### Detector ###
class TimeRegression(TarpitNavError, ValueError):
    pass


### Navigation ###
class LexiconError(TarpitNavError, ValueError):
    pass


class StoreError(TarpitNavError, ValueError):
    pass


class NoApplicableTarget(TarpitNavError):
    """No node satisfied a heuristic's selector; counts as a failed attempt."""


### Device ###
class DeviceError(TarpitNavError):
    pass


class SpecError(TarpitNavError, ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


### Engine ###
class MixedApps(TarpitNavError, ValueError):
    pass


class ZeroBase(TarpitNavError, ValueError):
    pass
