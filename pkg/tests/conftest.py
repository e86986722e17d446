"""
Gemeinsame Fixtures: synthetische Datensätze und zufällige Bäume.
"""
import numpy as np
import pytest
from tmo.dataset import Dataset
from tmo.tree import Node, Tree, assign_leaf_labels


def synthetic_dataset(n: int, p: int, seed: int, noise: float = 0.1, class_count: int = 2) -> Dataset:
    """Gleichverteilte Merkmale in [-1, 1], Labels aus einer schrägen Grenze plus Rauschen."""
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1.0, 1.0, size=(n, p))
    score = features[:, 0] + 0.5 * features[:, min(1, p - 1)]
    if class_count == 2:
        labels = (score > 0.0).astype(np.int64)
    else:
        labels = np.digitize(score, np.linspace(-1.5, 1.5, class_count + 1)[1:-1]).astype(np.int64)
    flip = rng.random(n) < noise
    labels[flip] = rng.integers(0, class_count, size=int(flip.sum()))
    return Dataset(features, labels, class_count=class_count)


def random_tree(data: Dataset, max_depth: int, rng: np.random.Generator, branch_rate: float = 0.7) -> Tree:
    """Zufällige Struktur mit zufälligen Splits im Wertebereich, Blätter per Mehrheit gelabelt."""
    def grow(level: int) -> Node:
        if level >= max_depth or (level > 0 and rng.random() > branch_rate):
            return Node.leaf(0)
        feature = int(rng.integers(data.feature_count))
        column = data.features[:, feature]
        threshold = float(rng.uniform(column.min(), column.max()))
        return Node.branch(feature, threshold, grow(level + 1), grow(level + 1))

    return assign_leaf_labels(Tree(grow(0), max_depth), data)


@pytest.fixture
def make_dataset():
    return synthetic_dataset


@pytest.fixture
def make_tree():
    return random_tree


@pytest.fixture
def line_data() -> Dataset:
    # x = [1, 2, 3, 4], y = [0, 0, 1, 1]
    return Dataset([[1.0], [2.0], [3.0], [4.0]], [0, 0, 1, 1])


@pytest.fixture
def pure_data() -> Dataset:
    rng = np.random.default_rng(7)
    return Dataset(rng.uniform(size=(40, 3)), np.zeros(40, dtype=np.int64), class_count=2)
