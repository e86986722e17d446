"""
Das memetische Verfahren: Generationsschleife mit gleichverteilter Partnerwahl,
Crossover pro Slot, lokaler Optimierung auf einer Bootstrap-Stichprobe und
elitärer Ersetzung.
"""
import json
import logging
import time
import numpy as np
from dataclasses import asdict, dataclass, field
from typing import List, Sequence, Tuple
from tmo.constants import (CROSS_RATE, DEFAULT_DEPTH, GENERATIONS, POPULATION_SIZE,
                           TAO_MAX_PASSES, TIME_LIMIT_SECONDS)
from tmo.dataset import Dataset, bootstrap_sample
from tmo.errors import ConfigError, ReportError, TreeError
from tmo.tao import tao_optimize
from tmo.tree import EncodedTree, Tree, decode_and_repair, encode, evaluate_accuracy
from tmo.utils import SeedLike, generation_rng, make_rng

logger = logging.getLogger(__name__)


class Population:
    """k Bäume mit zwischengespeicherter Fitness (Genauigkeit auf dem ganzen Trainingssatz)."""
    __slots__ = ('members', 'fitness', 'best_tree', 'best_fitness')

    def __init__(self, members: Sequence[Tree], fitness: Sequence[float]):
        if len(members) == 0:
            raise ConfigError("Population ist leer")
        if len(members) != len(fitness):
            raise ConfigError("Anzahl der Fitnesswerte passt nicht zur Population")
        self.members: List[Tree] = list(members)
        self.fitness: List[float] = [float(f) for f in fitness]
        best_index = int(np.argmax(self.fitness))
        self.best_tree: Tree = self.members[best_index]
        self.best_fitness: float = self.fitness[best_index]

    @classmethod
    def evaluate(cls, members: Sequence[Tree], train: Dataset) -> 'Population':
        """Population mit frisch berechneter Fitness."""
        return cls(members, [evaluate_accuracy(tree, train) for tree in members])

    @property
    def size(self) -> int:
        return len(self.members)

    def mean_fitness(self) -> float:
        return float(np.mean(self.fitness))

    def offer(self, index: int, candidate: Tree, candidate_fitness: float) -> bool:
        """
        Ersetzt Mitglied `index` nur bei strikt höherer Fitness und aktualisiert
        das beste Individuum ebenfalls nur bei strikter Verbesserung.
        """
        replaced = False
        if candidate_fitness > self.fitness[index]:
            self.members[index] = candidate
            self.fitness[index] = candidate_fitness
            replaced = True
        if candidate_fitness > self.best_fitness:
            self.best_fitness = candidate_fitness
            self.best_tree = candidate
        return replaced

    def __len__(self) -> int:
        return self.size


@dataclass
class TmoConfig:
    """Hyperparameter eines TMO-Laufs."""
    population_size: int = POPULATION_SIZE
    max_depth: int = DEFAULT_DEPTH
    cross_rate: float = CROSS_RATE
    generations: int = GENERATIONS
    time_limit_seconds: float = TIME_LIMIT_SECONDS
    seed: int = 0
    tao_max_passes: int = TAO_MAX_PASSES
    n_jobs: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError(f"population_size muss >= 2 sein, ist {self.population_size}")
        if self.max_depth < 1:
            raise ConfigError(f"max_depth muss >= 1 sein, ist {self.max_depth}")
        if not (0.0 <= self.cross_rate <= 1.0):
            raise ConfigError(f"cross_rate muss in [0, 1] liegen, ist {self.cross_rate}")
        if self.generations < 0:
            raise ConfigError(f"generations muss >= 0 sein, ist {self.generations}")
        if self.time_limit_seconds <= 0:
            raise ConfigError(f"time_limit_seconds muss > 0 sein, ist {self.time_limit_seconds}")
        if self.seed < 0:
            raise ConfigError(f"seed muss nicht-negativ sein, ist {self.seed}")
        if self.tao_max_passes < 1:
            raise ConfigError(f"tao_max_passes muss >= 1 sein, ist {self.tao_max_passes}")
        if self.n_jobs < 1:
            raise ConfigError(f"n_jobs muss >= 1 sein, ist {self.n_jobs}")


@dataclass
class GenerationRecord:
    index: int
    best_fitness: float
    mean_fitness: float
    elapsed_seconds: float


@dataclass
class EvolutionReport:
    """Verlauf eines TMO-Laufs: Startwerte und ein Eintrag pro Generation."""
    initial_best_fitness: float
    initial_mean_fitness: float
    generations: List[GenerationRecord] = field(default_factory=list)
    replacements: int = 0
    timed_out: bool = False

    def best_fitness_history(self) -> List[float]:
        return [self.initial_best_fitness] + [record.best_fitness for record in self.generations]

    def to_jsonl(self) -> str:
        """Eine JSON-Zeile pro Generation (Index, beste und mittlere Fitness, Sekunden)."""
        return "".join(json.dumps(asdict(record), sort_keys=True) + "\n" for record in self.generations)

    @staticmethod
    def records_from_jsonl(text: str) -> List[GenerationRecord]:
        records = []
        for line_number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(GenerationRecord(**json.loads(line)))
            except (ValueError, TypeError) as e:
                raise ReportError(f"Generationszeile {line_number} nicht lesbar: {e}") from e
        return records


def sample_partner(index: int, k: int, rng: SeedLike = None) -> int:
    """Partnerindex j gleichverteilt aus {0..k-1} ohne `index`."""
    if k < 2:
        raise ConfigError(f"Partnerwahl braucht mindestens 2 Mitglieder, vorhanden: {k}")
    j = int(make_rng(rng).integers(0, k - 1))
    return j + 1 if j >= index else j


def crossover(first: EncodedTree, second: EncodedTree, cross_rate: float, rng: SeedLike = None) -> EncodedTree:
    """
    Slot z des Kindes stammt mit Wahrscheinlichkeit CR aus `second`, sonst aus `first`.
    Eine Ziehung pro Slot, in BFS-Reihenfolge.
    """
    if first.depth != second.depth:
        raise TreeError(f"Crossover zwischen Tiefe {first.depth} und {second.depth} nicht möglich")
    draws = make_rng(rng).random(len(first))
    slots = [second[z] if draws[z] < cross_rate else first[z] for z in range(len(first))]
    return EncodedTree(slots, first.depth)


def tmo_run(train: Dataset, config: TmoConfig, initial: Population) -> Tuple[Tree, EvolutionReport]:
    """
    Generationsschleife: pro Generation eine Bootstrap-Stichprobe für alle Mitglieder;
    pro Mitglied Partnerwahl, Crossover, Reparatur auf `train`, TAO auf der Stichprobe
    und Fitness auf dem ganzen Trainingssatz. Die Population wird in-place aktualisiert.
    Das Zeitlimit wird zwischen zwei Mitgliedern geprüft.
    """
    if initial.size == 0:
        raise ConfigError("Population ist leer")
    population = initial
    rng = generation_rng(config.seed)
    report = EvolutionReport(initial.best_fitness, initial.mean_fitness())
    start = time.perf_counter()

    for generation in range(1, config.generations + 1):
        sample = bootstrap_sample(train, rng)
        for i in range(population.size):
            j = sample_partner(i, population.size, rng)
            child_code = crossover(encode(population.members[i]), encode(population.members[j]),
                                   config.cross_rate, rng)
            child = decode_and_repair(child_code, train, rng)
            child = tao_optimize(child, sample, config.tao_max_passes)
            if population.offer(i, child, evaluate_accuracy(child, train)):
                report.replacements += 1
            if time.perf_counter() - start > config.time_limit_seconds:
                report.timed_out = True
                break

        elapsed = time.perf_counter() - start
        report.generations.append(GenerationRecord(generation, population.best_fitness,
                                                   population.mean_fitness(), elapsed))
        logger.info("Generation %d: beste Fitness %.4f, mittlere Fitness %.4f (%.1fs)",
                    generation, population.best_fitness, population.mean_fitness(), elapsed)
        if report.timed_out:
            logger.warning("Zeitlimit von %.0fs erreicht, Abbruch nach Generation %d",
                           config.time_limit_seconds, generation)
            break

    return population.best_tree, report
