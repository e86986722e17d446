"""
Enthält Konstanten und Konfigurationsparameter für den gesamten Lernprozess.
"""

# Versuchsprotokoll (Aufteilung der Daten)
TRAIN_FRACTION = 0.64
VAL_FRACTION = 0.16
TEST_FRACTION = 0.20
SPLIT_TOLERANCE = 1e-9
DEFAULT_SEEDS = [0, 1, 2, 3, 4]

# Baumtiefe
MIN_DEPTH = 1
MAX_DEPTH = 8
DEFAULT_DEPTH = 2

# TMO
POPULATION_SIZE = 100
CROSS_RATE = 0.75
GENERATIONS = 5
TIME_LIMIT_SECONDS = 600.0  # Sekunden pro Lauf
GENERATION_STREAM_KEY = 1  # Spawn-Schlüssel des Stroms der Generationsschleife

# TAO
TAO_MAX_PASSES = 10

# Greedy-Induktion
GAIN_EPSILON = 1e-12  # Kleinere Gini-Abnahmen gelten als kein Gewinn

# Kodierung der Slots (Konventionen für Blätter und fehlende Knoten)
LEAF_SLOT = (-1, -1)
NIL_SLOT = (None, None)

# Präferenzen der TAO-Knotenoptimierung
PREFER_LEFT = -1
DONT_CARE = 0
PREFER_RIGHT = 1

# Algorithmen und Ausgabeformate
ALGORITHMS = ("cart", "tao", "tmo")
REPORT_FORMATS = ("records", "table", "both")
STD_KIND = "population"

# Logging
LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

# Speicherort für Einstellungen
SETTINGS_FILE = "settings.json"

# Standard-Einstellungen (Schlüssel entsprechen den langen CLI-Optionen)
DEFAULT_SETTINGS = {
    "algo": "tmo",
    "depth": str(DEFAULT_DEPTH),
    "seeds": ",".join(str(s) for s in DEFAULT_SEEDS),
    "split": f"{TRAIN_FRACTION},{VAL_FRACTION},{TEST_FRACTION}",
    "cr": CROSS_RATE,
    "pop_size": POPULATION_SIZE,
    "generations": GENERATIONS,
    "time_limit": TIME_LIMIT_SECONDS,
    "tao_passes": TAO_MAX_PASSES,
    "jobs": 1,
    "format": "both",
    "timings": False,
}
