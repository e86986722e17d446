"""
Reproduzierbare Experimente: CART, TAO und TMO auf LIBSVM-Daten nach dem
Protokoll 64/16/20 über mehrere Seeds.
"""
import logging
import time
import numpy as np
from dataclasses import asdict, dataclass, field
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Sequence, Tuple
from tmo.constants import *
from tmo.dataset import Dataset, SplitSpec, load_libsvm, split_dataset
from tmo.errors import ConfigError, DatasetError, ExperimentError, TmoError
from tmo.greedy import grow_greedy_tree, init_population
from tmo.memetic import TmoConfig, tmo_run
from tmo.tao import tao_optimize
from tmo.tree import Tree, evaluate_accuracy
from tmo.utils import population_std

logger = logging.getLogger(__name__)


@dataclass
class ExperimentSpec:
    """Ein Experiment: Datensatz, Algorithmus, Tiefe, Seeds und TMO-Parameter."""
    dataset_path: str
    algorithm: str = "tmo"
    max_depth: int = DEFAULT_DEPTH
    seeds: List[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    split_fractions: Tuple[float, float, float] = (TRAIN_FRACTION, VAL_FRACTION, TEST_FRACTION)
    population_size: int = POPULATION_SIZE
    cross_rate: float = CROSS_RATE
    generations: int = GENERATIONS
    time_limit_seconds: float = TIME_LIMIT_SECONDS
    tao_max_passes: int = TAO_MAX_PASSES
    n_jobs: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"Unbekannter Algorithmus '{self.algorithm}', erlaubt: {', '.join(ALGORITHMS)}")
        if not self.seeds:
            raise ConfigError("Mindestens ein Seed erforderlich")
        if any(seed < 0 for seed in self.seeds):
            raise ConfigError(f"Seeds müssen nicht-negativ sein: {self.seeds}")
        if not (MIN_DEPTH <= self.max_depth <= MAX_DEPTH):
            raise ConfigError(f"Tiefe muss in [{MIN_DEPTH}, {MAX_DEPTH}] liegen, ist {self.max_depth}")
        if len(self.split_fractions) != 3:
            raise ConfigError("Aufteilung braucht genau drei Anteile")
        self.split_fractions = tuple(float(f) for f in self.split_fractions)
        try:
            self.split_spec(0)
        except DatasetError as e:
            raise ConfigError(str(e)) from e
        # TMO-Parameter früh prüfen, nicht erst im ersten Seed
        self.tmo_config(0)

    def split_spec(self, seed: int) -> SplitSpec:
        train, val, test = self.split_fractions
        return SplitSpec(train, val, test, seed)

    def tmo_config(self, seed: int) -> TmoConfig:
        return TmoConfig(population_size=self.population_size, max_depth=self.max_depth,
                         cross_rate=self.cross_rate, generations=self.generations,
                         time_limit_seconds=self.time_limit_seconds, seed=seed,
                         tao_max_passes=self.tao_max_passes)

    def config_echo(self) -> Dict[str, Any]:
        """Aufgelöste Einstellungen für den Bericht (ohne Pfad und Seeds)."""
        echo = asdict(self)
        for key in ("dataset_path", "seeds", "n_jobs"):
            echo.pop(key)
        echo["split_fractions"] = list(self.split_fractions)
        if self.algorithm != "tmo":
            for key in ("population_size", "cross_rate", "generations", "time_limit_seconds"):
                echo.pop(key)
        if self.algorithm == "cart":
            echo.pop("tao_max_passes")
        return echo


@dataclass
class SeedResult:
    seed: int
    train_accuracy: float
    val_accuracy: float
    test_accuracy: float
    seconds: Optional[float] = None


@dataclass
class RunReport:
    """Ergebnisse pro Seed; Mittelwert und Standardabweichung werden daraus berechnet."""
    dataset: str
    algorithm: str
    max_depth: int
    n: int
    p: int
    results: List[SeedResult]
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.results:
            raise ConfigError("Bericht ohne Seed-Ergebnisse")

    @property
    def seeds(self) -> List[int]:
        return [r.seed for r in self.results]

    @property
    def test_accuracies(self) -> List[float]:
        return [r.test_accuracy for r in self.results]

    @property
    def mean_test(self) -> float:
        return float(np.mean(self.test_accuracies))

    @property
    def std_test(self) -> float:
        # Populations-Standardabweichung über die Seeds
        return population_std(self.test_accuracies)

    @property
    def mean_train(self) -> float:
        return float(np.mean([r.train_accuracy for r in self.results]))

    @property
    def std_train(self) -> float:
        return population_std([r.train_accuracy for r in self.results])

    @property
    def mean_seconds(self) -> Optional[float]:
        seconds = [r.seconds for r in self.results]
        if any(s is None for s in seconds):
            return None
        return float(np.mean(seconds))


def train_model(algorithm: str, train: Dataset, spec: ExperimentSpec, seed: int) -> Tree:
    """Trainiert den gewählten Algorithmus auf dem Trainingsteil."""
    if algorithm == "cart":
        return grow_greedy_tree(train, spec.max_depth)
    if algorithm == "tao":
        return tao_optimize(grow_greedy_tree(train, spec.max_depth), train, spec.tao_max_passes)
    if algorithm == "tmo":
        config = spec.tmo_config(seed)
        population = init_population(train, config.population_size, config.max_depth,
                                     seed=seed, tao_passes=config.tao_max_passes,
                                     n_jobs=config.n_jobs)
        best, evolution = tmo_run(train, config, population)
        logger.debug("TMO Seed %d: %d Ersetzungen, Verlauf %s", seed, evolution.replacements,
                     evolution.best_fitness_history())
        return best
    raise ConfigError(f"Unbekannter Algorithmus '{algorithm}'")


def run_seed(spec: ExperimentSpec, data: Dataset, seed: int) -> SeedResult:
    """Ein Seed: Aufteilen, Trainieren, Auswerten."""
    start = time.perf_counter()
    train, val, test = split_dataset(data, spec.split_spec(seed))
    tree = train_model(spec.algorithm, train, spec, seed)
    seconds = time.perf_counter() - start
    result = SeedResult(seed, evaluate_accuracy(tree, train), evaluate_accuracy(tree, val),
                        evaluate_accuracy(tree, test), seconds)
    logger.info("%s d=%d Seed %d: Train %.4f, Test %.4f (%.2fs)", spec.algorithm, spec.max_depth,
                seed, result.train_accuracy, result.test_accuracy, seconds)
    return result


def _run_seed_job(args: Tuple[ExperimentSpec, Dataset, int]) -> SeedResult:
    spec, data, seed = args
    try:
        return run_seed(spec, data, seed)
    except TmoError as e:
        raise ExperimentError(f"{spec.algorithm}, Seed {seed} fehlgeschlagen: {e}") from e
    except Exception as e:
        raise ExperimentError(f"{spec.algorithm}, Seed {seed} fehlgeschlagen: "
                              f"{type(e).__name__}: {e}") from e


def run_experiment(spec: ExperimentSpec, data: Optional[Dataset] = None) -> RunReport:
    """
    Führt das Experiment für alle Seeds aus. Seeds können parallel laufen;
    der Bericht wird immer in Seed-Reihenfolge zusammengesetzt.
    """
    if data is None:
        data = load_libsvm(spec.dataset_path)

    jobs = [(spec, data, seed) for seed in spec.seeds]
    if spec.n_jobs > 1 and len(jobs) > 1:
        with Pool(min(spec.n_jobs, len(jobs))) as pool:
            results = pool.map(_run_seed_job, jobs)
    else:
        results = [_run_seed_job(job) for job in jobs]

    return RunReport(dataset=spec.dataset_path, algorithm=spec.algorithm, max_depth=spec.max_depth,
                     n=data.n, p=data.feature_count, results=results, config=spec.config_echo())


def run_comparison(spec: ExperimentSpec, algorithms: Sequence[str], depths: Sequence[int],
                   data: Optional[Dataset] = None) -> List[RunReport]:
    """Ein Bericht pro (Tiefe, Algorithmus) auf demselben Datensatz und denselben Seeds."""
    if data is None:
        data = load_libsvm(spec.dataset_path)
    reports = []
    for depth in depths:
        for algorithm in algorithms:
            variant = ExperimentSpec(**{**asdict(spec), "algorithm": algorithm, "max_depth": depth})
            reports.append(run_experiment(variant, data))
    return reports
