"""
CART-ähnliche Greedy-Induktion mit Gini-Unreinheit, Bagging und zufälligen
Merkmals-Teilräumen. Dient als Baseline und zum Aufbau der Startpopulation.
"""
import logging
import math
import numpy as np
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterable, List, Optional, Sequence, Tuple
from tmo.constants import GAIN_EPSILON, TAO_MAX_PASSES
from tmo.dataset import Dataset, bootstrap_sample
from tmo.errors import ConfigError
from tmo.memetic import Population
from tmo.tao import tao_optimize
from tmo.tree import Node, Tree, evaluate_accuracy
from tmo.utils import SeedLike, majority_label, make_rng, member_seed, midpoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitCandidate:
    """Achsenparalleler Split x[feature] <= threshold mit seiner Gini-Abnahme."""
    feature: int
    threshold: float
    impurity_decrease: float


def gini_impurity(counts: Sequence[int]) -> float:
    """1 - Σ (n_c / n)^2 für Klassenhäufigkeiten `counts`."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("Gini-Unreinheit einer leeren Menge ist nicht definiert")
    shares = counts / total
    return float(1.0 - np.sum(shares * shares))


def best_axis_split(data: Dataset, rows: np.ndarray, feature_pool: Iterable[int]) -> Optional[SplitCandidate]:
    """
    Bester Split über alle Mittelpunkte aufeinanderfolgender verschiedener Werte
    der Merkmale im Pool, nach gewichteter Gini-Abnahme. Gleichstände gehen an das
    kleinere Merkmal, dann an den kleineren Schwellwert. None, falls keine
    Abnahme strikt positiv ist.
    """
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[0]
    y = data.labels[rows]
    parent_counts = np.bincount(y, minlength=data.class_count).astype(np.float64)
    parent_gini = gini_impurity(parent_counts)
    if parent_gini <= 0.0:
        return None

    best: Optional[SplitCandidate] = None
    for feature in sorted(set(int(f) for f in feature_pool)):
        values = data.features[rows, feature]
        order = np.argsort(values, kind="mergesort")
        sorted_values = values[order]
        change = np.nonzero(sorted_values[:-1] < sorted_values[1:])[0]
        if change.size == 0:
            continue

        # Kumulierte Klassenhäufigkeiten links jedes Kandidaten
        one_hot = np.zeros((n, data.class_count), dtype=np.float64)
        one_hot[np.arange(n), y[order]] = 1.0
        left_counts = np.cumsum(one_hot, axis=0)[change]
        right_counts = parent_counts - left_counts
        n_left = (change + 1).astype(np.float64)
        n_right = n - n_left

        gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
        decrease = parent_gini - (n_left / n) * gini_left - (n_right / n) * gini_right

        pos = int(np.argmax(decrease))
        gain = float(decrease[pos])
        if best is None or gain > best.impurity_decrease:
            i = change[pos]
            best = SplitCandidate(feature, midpoint(sorted_values[i], sorted_values[i + 1]), gain)

    if best is None or best.impurity_decrease <= GAIN_EPSILON:
        return None
    return best


def _feature_pool(feature_count: int, subspace_size: Optional[int], rng: np.random.Generator) -> List[int]:
    if subspace_size is None or subspace_size >= feature_count:
        return list(range(feature_count))
    return sorted(int(f) for f in rng.choice(feature_count, size=subspace_size, replace=False))


def grow_greedy_tree(train: Dataset, max_depth: int, subspace_size: Optional[int] = None,
                     bootstrap: bool = False, rng: SeedLike = None) -> Tree:
    """
    Rekursives Top-down-Wachstum bis Tiefe d, reinem Knoten oder fehlendem Gewinn.
    Pro Knoten wird ein frischer Merkmalspool der Größe m gezogen (alle bei m=None).
    Mit `bootstrap` wird auf einer Bootstrap-Stichprobe gewachsen und gelabelt.
    """
    if max_depth < 1:
        raise ConfigError(f"max_depth muss >= 1 sein, ist {max_depth}")
    rng = make_rng(rng)
    sample = bootstrap_sample(train, rng) if bootstrap else train

    def grow(rows: np.ndarray, level: int) -> Node:
        label = majority_label(sample.labels[rows], sample.class_count)
        if level >= max_depth:
            return Node.leaf(label)
        pool = _feature_pool(sample.feature_count, subspace_size, rng)
        split = best_axis_split(sample, rows, pool)
        if split is None:
            return Node.leaf(label)
        go_left = sample.features[rows, split.feature] <= split.threshold
        return Node.branch(split.feature, split.threshold,
                           grow(rows[go_left], level + 1), grow(rows[~go_left], level + 1))

    return Tree(grow(np.arange(sample.n), 0), max_depth)


def default_subspace_size(feature_count: int) -> int:
    """Standardgröße des Teilraums für Klassifikationswälder: ⌈√p⌉."""
    return int(math.ceil(math.sqrt(feature_count)))


def _grow_member(args: Tuple[Dataset, int, int, int, int]) -> Tuple[Tree, float]:
    train, max_depth, seed, index, tao_passes = args
    rng = make_rng(member_seed(seed, index))
    tree = grow_greedy_tree(train, max_depth, default_subspace_size(train.feature_count),
                            bootstrap=True, rng=rng)
    tree = tao_optimize(tree, train, tao_passes)
    return tree, evaluate_accuracy(tree, train)


def init_population(train: Dataset, k: int, max_depth: int, seed: int = 0,
                    tao_passes: int = TAO_MAX_PASSES, n_jobs: int = 1) -> Population:
    """
    Startpopulation aus einem Zufallswald: k Bäume mit Bagging und Teilraum ⌈√p⌉,
    jeder anschließend per TAO auf dem vollständigen Trainingssatz optimiert.
    Mitglied i nutzt den Seed `seed XOR i`, das Ergebnis ist daher unabhängig von n_jobs.
    """
    if k < 2:
        raise ConfigError(f"Populationsgröße muss >= 2 sein, ist {k}")

    jobs = [(train, max_depth, seed, index, tao_passes) for index in range(k)]
    if n_jobs > 1:
        with Pool(n_jobs) as pool:
            grown = pool.map(_grow_member, jobs)
    else:
        grown = [_grow_member(job) for job in jobs]

    population = Population([tree for tree, _ in grown], [fitness for _, fitness in grown])
    logger.info("Startpopulation: %d Bäume, beste Fitness %.4f, mittlere Fitness %.4f",
                k, population.best_fitness, population.mean_fitness())
    return population
