import numpy as np
from tmo.constants import GENERATION_STREAM_KEY
from typing import Optional, Sequence, Union

SeedLike = Union[None, int, np.random.Generator]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """
    Liefert einen Zufallsgenerator.
    Ein bestehender Generator wird unverändert durchgereicht, damit Aufrufer
    einen Strom über mehrere Operationen hinweg teilen können.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def member_seed(master_seed: int, index: int) -> int:
    """Unabhängiger, deterministischer Seed für das Populationsmitglied `index`."""
    return int(master_seed) ^ int(index)


def generation_rng(master_seed: int) -> np.random.Generator:
    """
    Strom der Generationsschleife. Der Spawn-Schlüssel trennt ihn von allen
    Mitgliedsströmen `default_rng(seed XOR i)`, die ohne Spawn-Schlüssel entstehen.
    """
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=(GENERATION_STREAM_KEY,))
    return np.random.default_rng(sequence)


def majority_label(labels: np.ndarray, class_count: int) -> int:
    """
    Mehrheitsklasse einer Label-Menge.
    Gleichstände gehen an die kleinste Klassen-ID (argmax liefert den ersten Treffer).
    """
    counts = np.bincount(labels, minlength=class_count)
    return int(np.argmax(counts))


def midpoint(low: float, high: float) -> float:
    """
    Schwellwert zwischen zwei aufeinanderfolgenden verschiedenen Werten.
    Bei Rundung auf `high` wird `low` genommen, damit `high` rechts bleibt.
    """
    value = (low + high) / 2.0
    if value >= high:
        return float(low)
    return float(value)


def population_std(values: Sequence[float]) -> float:
    """Populations-Standardabweichung (ddof=0)."""
    if len(values) == 0:
        return 0.0
    return float(np.std(np.asarray(values, dtype=float)))


def encoded_length(depth: int) -> int:
    """Länge der Kodierung eines Baums der Tiefe `depth` (2^d - 1 Slots)."""
    return (1 << depth) - 1


def level_of(position: int) -> int:
    """Tiefe einer Heap-Position (Wurzel 0, Kinder 2z+1 und 2z+2)."""
    return (position + 1).bit_length() - 1


def parse_int_list(text: str) -> list:
    """Zerlegt '0,1,2' in [0, 1, 2]."""
    return [int(part) for part in text.split(",") if part.strip()]


def parse_float_list(text: str) -> list:
    """Zerlegt '0.64,0.16,0.2' in Gleitkommazahlen."""
    return [float(part) for part in text.split(",") if part.strip()]


def format_percent(value: Optional[float]) -> str:
    """Formatiert einen Anteil als Prozentwert mit zwei Nachkommastellen."""
    if value is None:
        return "-"
    return f"{100.0 * value:.2f}"
