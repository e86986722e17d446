"""
Ausnahmen des Pakets.
"""
from typing import Optional


class TmoError(Exception):
    """Basisklasse für alle Fehler des Pakets."""


class ParseError(TmoError, ValueError):
    """Fehler beim Einlesen einer LIBSVM-Datei, mit Zeilennummer (1-basiert)."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"Zeile {line_number}: {message}"
        super().__init__(message)


class DatasetError(TmoError, ValueError):
    """Ungültiger Datensatz oder ungültige Aufteilung."""


class TreeError(TmoError, ValueError):
    """Verletzte Baum-Invariante oder ungültige Kodierung."""


class ConfigError(TmoError, ValueError):
    """Ungültige Hyperparameter oder Experiment-Einstellungen."""


class ReportError(TmoError, ValueError):
    """Unbekanntes Ausgabeformat oder nicht lesbarer Bericht."""


class ExperimentError(TmoError):
    """Ein Experiment wurde wegen eines Fehlers in einem Seed abgebrochen."""
