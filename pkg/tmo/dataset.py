"""
Datensätze im LIBSVM-Format: Einlesen, Aufteilen und Bootstrap-Stichproben.
"""
import logging
import math
import numpy as np
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union
from tmo.constants import SPLIT_TOLERANCE, TRAIN_FRACTION, VAL_FRACTION, TEST_FRACTION
from tmo.errors import DatasetError, ParseError
from tmo.utils import SeedLike, make_rng

logger = logging.getLogger(__name__)


class Dataset:
    """
    Dichte n×p-Merkmalsmatrix mit ganzzahligen Klassen-IDs 0..C-1.
    Nach der Konstruktion unveränderlich (Arrays sind schreibgeschützt).
    """
    __slots__ = ('features', 'labels', 'class_count', 'raw_labels')

    def __init__(self, features, labels, class_count: Optional[int] = None,
                 raw_labels: Optional[Sequence[float]] = None):
        features = np.array(features, dtype=np.float64)
        labels = np.array(labels, dtype=np.int64)

        if features.ndim != 2:
            raise DatasetError(f"Merkmalsmatrix muss zweidimensional sein, ist {features.ndim}-dimensional")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise DatasetError("Anzahl der Labels passt nicht zur Anzahl der Zeilen")
        if features.shape[0] < 1:
            raise DatasetError("Datensatz enthält keine Zeilen")
        if not np.all(np.isfinite(features)):
            raise DatasetError("Merkmalsmatrix enthält fehlende oder unendliche Werte")

        if class_count is None:
            class_count = int(labels.max()) + 1
        if class_count < 2:
            raise DatasetError(f"Mindestens zwei Klassen erforderlich, gefunden: {class_count}")
        if labels.min() < 0 or labels.max() >= class_count:
            raise DatasetError(f"Labels müssen im Bereich [0, {class_count - 1}] liegen")

        features.flags.writeable = False
        labels.flags.writeable = False
        self.features = features
        self.labels = labels
        self.class_count = int(class_count)
        self.raw_labels = tuple(float(r) for r in raw_labels) if raw_labels is not None else None

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def feature_count(self) -> int:
        return int(self.features.shape[1])

    def subset(self, indices: Iterable[int]) -> 'Dataset':
        """Teilmenge der Zeilen; Klassenzahl und Roh-Labels werden geerbt."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[indices], self.labels[indices],
                       class_count=self.class_count, raw_labels=self.raw_labels)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, p={self.feature_count}, classes={self.class_count})"


@dataclass(frozen=True)
class SplitSpec:
    """Anteile für Training, Validierung und Test sowie der Seed der Permutation."""
    train_fraction: float = TRAIN_FRACTION
    val_fraction: float = VAL_FRACTION
    test_fraction: float = TEST_FRACTION
    seed: int = 0

    def __post_init__(self):
        for name in ("train_fraction", "val_fraction", "test_fraction"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise DatasetError(f"{name} muss in (0, 1) liegen, ist {value}")
        total = self.train_fraction + self.val_fraction + self.test_fraction
        if abs(total - 1.0) > SPLIT_TOLERANCE:
            raise DatasetError(f"Anteile müssen sich zu 1 summieren, Summe ist {total}")
        if self.seed < 0:
            raise DatasetError(f"Seed muss nicht-negativ sein, ist {self.seed}")


def _parse_number(token: str, line_number: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{what} ist keine Zahl: '{token}'", line_number) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} ist nicht endlich: '{token}'", line_number)
    return value


def parse_libsvm(text: Union[str, Iterable[str]], feature_count: Optional[int] = None) -> Dataset:
    """
    Liest Daten im Format `<label> <idx>:<wert> ...` (Indizes 1-basiert, streng steigend).

    Nicht aufgeführte Indizes werden zu 0.0, p ist der größte gesehene Index
    (oder `feature_count`, falls größer). Roh-Labels werden in aufsteigender
    Reihenfolge auf die Klassen-IDs 0..C-1 abgebildet.
    """
    lines = text.splitlines() if isinstance(text, str) else text

    raw_rows: List[Tuple[float, List[Tuple[int, float]]]] = []
    max_index = 0
    for line_number, line in enumerate(lines, start=1):
        # Kommentare abschneiden
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        label = _parse_number(tokens[0], line_number, "Label")

        entries = []
        previous = 0
        for token in tokens[1:]:
            index_text, sep, value_text = token.partition(":")
            if not sep:
                raise ParseError(f"Eintrag ohne ':' gefunden: '{token}'", line_number)
            try:
                index = int(index_text)
            except ValueError:
                raise ParseError(f"Index ist keine ganze Zahl: '{index_text}'", line_number) from None
            if index < 1:
                raise ParseError(f"Index muss >= 1 sein, ist {index}", line_number)
            if index <= previous:
                raise ParseError(f"Indizes nicht streng steigend ({previous} -> {index})", line_number)
            previous = index
            entries.append((index, _parse_number(value_text, line_number, "Wert")))

        max_index = max(max_index, previous)
        raw_rows.append((label, entries))

    if not raw_rows:
        raise ParseError("Eingabe enthält keine Datenzeilen")

    p = max(max_index, feature_count or 0)
    features = np.zeros((len(raw_rows), p), dtype=np.float64)
    for row, (_, entries) in enumerate(raw_rows):
        for index, value in entries:
            features[row, index - 1] = value

    raw_values = np.array([label for label, _ in raw_rows], dtype=np.float64)
    classes, labels = np.unique(raw_values, return_inverse=True)
    logger.debug("LIBSVM gelesen: %d Zeilen, %d Merkmale, %d Klassen", len(raw_rows), p, len(classes))
    return Dataset(features, labels, class_count=len(classes), raw_labels=classes.tolist())


def load_libsvm(path: Union[str, Path], feature_count: Optional[int] = None) -> Dataset:
    """Liest eine LIBSVM-Datei von der Festplatte."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            dataset = parse_libsvm(handle.read(), feature_count=feature_count)
    except OSError as e:
        raise DatasetError(f"Datei {path} kann nicht gelesen werden: {e}") from e
    logger.info("Datensatz %s geladen: %r", path.name, dataset)
    return dataset


def _format_label(value: float) -> str:
    # Ganzzahlige Labels ohne Nachkommastellen schreiben (z.B. '+1', '-1', '0')
    if float(value).is_integer():
        return f"{int(value):+d}" if value != 0 else "0"
    return repr(float(value))


def serialize_libsvm(dataset: Dataset) -> str:
    """
    Schreibt den Datensatz im LIBSVM-Format (nur Einträge ungleich 0.0).
    Werte werden mit kürzester exakter Darstellung geschrieben.
    """
    out = []
    for row in range(dataset.n):
        class_id = int(dataset.labels[row])
        raw = dataset.raw_labels[class_id] if dataset.raw_labels is not None else class_id
        parts = [_format_label(raw)]
        for column in np.nonzero(dataset.features[row])[0]:
            parts.append(f"{column + 1}:{float(dataset.features[row, column])!r}")
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def split_dataset(dataset: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset, Dataset]:
    """
    Teilt eine gleichverteilte Permutation der Zeilen in Training, Validierung und Test.
    Training und Validierung erhalten floor(f·n) Zeilen, der Rest geht in den Test.
    """
    n = dataset.n
    if n < 3:
        raise DatasetError(f"Aufteilung benötigt mindestens 3 Zeilen, vorhanden: {n}")

    # Kleine Toleranz gegen Rundungsfehler wie 0.29 * 100 = 28.999...
    n_train = int(math.floor(spec.train_fraction * n + SPLIT_TOLERANCE))
    n_val = int(math.floor(spec.val_fraction * n + SPLIT_TOLERANCE))
    n_test = n - n_train - n_val
    if min(n_train, n_val, n_test) < 1:
        raise DatasetError(f"Leerer Teil bei n={n}: Größen ({n_train}, {n_val}, {n_test})")

    permutation = make_rng(spec.seed).permutation(n)
    train_idx = permutation[:n_train]
    val_idx = permutation[n_train:n_train + n_val]
    test_idx = permutation[n_train + n_val:]
    return dataset.subset(train_idx), dataset.subset(val_idx), dataset.subset(test_idx)


def bootstrap_indices(n: int, seed: SeedLike) -> np.ndarray:
    """n Zeilenindizes, gleichverteilt mit Zurücklegen gezogen."""
    return make_rng(seed).integers(0, n, size=n)


def bootstrap_sample(dataset: Dataset, seed: SeedLike) -> Dataset:
    """Bootstrap-Stichprobe gleicher Größe; die Klassenzahl wird vom Original geerbt."""
    return dataset.subset(bootstrap_indices(dataset.n, seed))
