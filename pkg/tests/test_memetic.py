import numpy as np
import pytest
from tmo.constants import LEAF_SLOT, NIL_SLOT
from tmo.dataset import bootstrap_indices
from tmo.errors import ConfigError, ReportError, TreeError
from tmo.greedy import init_population
from tmo.memetic import (EvolutionReport, GenerationRecord, Population, TmoConfig, crossover, sample_partner,
                         tmo_run)
from tmo.tree import EncodedTree, Node, Tree, dump_tree, evaluate_accuracy
from tmo.utils import generation_rng, make_rng, member_seed


def test_partner_of_two_members():
    rng = np.random.default_rng(0)
    assert {sample_partner(0, 2, rng) for _ in range(200)} == {1}


def test_partner_is_uniform_and_never_self():
    rng = np.random.default_rng(1)
    draws = np.array([sample_partner(1, 3, rng) for _ in range(60000)])
    assert not np.any(draws == 1)
    assert abs(np.mean(draws == 0) - 0.5) < 0.01
    assert abs(np.mean(draws == 2) - 0.5) < 0.01


def test_partner_needs_two_members():
    with pytest.raises(ConfigError):
        sample_partner(0, 1)


def _encodings():
    first = EncodedTree([(0, 0.1), (1, 0.2), (2, 0.3), LEAF_SLOT, LEAF_SLOT, (0, 0.6), LEAF_SLOT], 3)
    second = EncodedTree([(3, 1.1), LEAF_SLOT, (4, 1.3), NIL_SLOT, NIL_SLOT, NIL_SLOT, (1, 1.7)], 3)
    return first, second


def test_crossover_extremes():
    first, second = _encodings()
    assert crossover(first, second, 0.0, rng=3) == first
    assert crossover(first, second, 1.0, rng=3) == second


def test_crossover_is_reproducible():
    first, second = _encodings()
    child = crossover(first, second, 0.75, rng=42)
    assert child == crossover(first, second, 0.75, rng=42)
    # Ziehungen mit Seed 42: 0.774, 0.439, 0.859, 0.697, 0.094, 0.976, 0.761
    assert list(child) == [(0, 0.1), LEAF_SLOT, (2, 0.3), NIL_SLOT, NIL_SLOT, (0, 0.6), LEAF_SLOT]


def test_crossover_depth_mismatch():
    first, _ = _encodings()
    with pytest.raises(TreeError):
        crossover(first, EncodedTree([LEAF_SLOT, NIL_SLOT, NIL_SLOT], 2), 0.5)


def test_population_offer_is_strict(line_data):
    leaf = Tree(Node.leaf(0), 1)
    stump = Tree(Node.branch(0, 2.5, Node.leaf(0), Node.leaf(1)), 1)
    population = Population.evaluate([leaf, leaf.copy()], line_data)
    assert population.fitness == [0.5, 0.5]

    assert not population.offer(0, leaf.copy(), 0.5)
    assert population.offer(1, stump, 1.0)
    assert population.best_tree is stump
    assert population.best_fitness == 1.0
    assert not population.offer(0, stump.copy(), 0.25)
    assert population.fitness == [0.5, 1.0]


def test_population_must_not_be_empty():
    with pytest.raises(ConfigError):
        Population([], [])


@pytest.mark.parametrize("kwargs", [
    {"population_size": 1},
    {"max_depth": 0},
    {"cross_rate": 1.5},
    {"generations": -1},
    {"time_limit_seconds": 0.0},
    {"seed": -3},
    {"tao_max_passes": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        TmoConfig(**kwargs)


def test_zero_generations_returns_initial_best(make_dataset):
    data = make_dataset(80, 3, seed=0)
    population = init_population(data, 4, 2, seed=1)
    initial_best = population.best_tree
    best, report = tmo_run(data, TmoConfig(population_size=4, max_depth=2, generations=0, seed=1), population)
    assert best is initial_best
    assert report.generations == []
    assert report.best_fitness_history() == [population.best_fitness]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_elitism(make_dataset, seed):
    data = make_dataset(500, 10, seed=seed, noise=0.2)
    depth = 3
    population = init_population(data, 8, depth, seed=seed, tao_passes=3)
    initial_best = population.best_fitness
    previous = list(population.fitness)

    for generation in range(3):
        config = TmoConfig(population_size=8, max_depth=depth, generations=1,
                           seed=seed * 10 + generation, tao_max_passes=3)
        best, report = tmo_run(data, config, population)

        assert all(b >= a for a, b in zip(previous, population.fitness))
        assert population.best_fitness >= max(population.fitness)
        for tree, fitness in zip(population.members, population.fitness):
            assert fitness == evaluate_accuracy(tree, data)
            assert tree.depth() <= depth
            tree.validate(feature_count=data.feature_count, class_count=data.class_count)
        previous = list(population.fitness)

    assert evaluate_accuracy(best, data) >= initial_best


def test_best_fitness_history_is_monotone(make_dataset):
    data = make_dataset(200, 5, seed=3, noise=0.2)
    population = init_population(data, 6, 2, seed=3, tao_passes=3)
    _, report = tmo_run(data, TmoConfig(population_size=6, max_depth=2, generations=4, seed=3,
                                        tao_max_passes=3), population)
    history = report.best_fitness_history()
    assert len(history) == 5
    assert all(a <= b for a, b in zip(history, history[1:]))
    assert [record.index for record in report.generations] == [1, 2, 3, 4]
    assert not report.timed_out


def test_run_is_deterministic(make_dataset):
    data = make_dataset(150, 4, seed=9, noise=0.2)
    config = TmoConfig(population_size=5, max_depth=2, generations=2, seed=7, tao_max_passes=3)
    results = []
    for _ in range(2):
        population = init_population(data, 5, 2, seed=7, tao_passes=3)
        best, report = tmo_run(data, config, population)
        results.append((dump_tree(best), report.best_fitness_history(), report.replacements,
                        [dump_tree(tree) for tree in population.members]))
    assert results[0] == results[1]


def test_time_limit_stops_after_current_member(make_dataset):
    data = make_dataset(100, 3, seed=1)
    population = init_population(data, 4, 2, seed=1)
    config = TmoConfig(population_size=4, max_depth=2, generations=5, seed=1, time_limit_seconds=1e-9)
    _, report = tmo_run(data, config, population)
    assert report.timed_out
    assert len(report.generations) == 1


def test_report_jsonl():
    report = EvolutionReport(0.5, 0.4, [GenerationRecord(1, 0.6, 0.5, 0.25), GenerationRecord(2, 0.7, 0.55, 0.5)])
    text = report.to_jsonl()
    assert len(text.splitlines()) == 2
    assert EvolutionReport.records_from_jsonl(text) == report.generations
    with pytest.raises(ReportError):
        EvolutionReport.records_from_jsonl('{"index": 1}\n')


@pytest.mark.slow
def test_generation_time_scales_linearly(make_dataset):
    seconds = {}
    for n in (2000, 4000):
        data = make_dataset(n, 20, seed=n)
        population = init_population(data, 20, 3, seed=0)
        config = TmoConfig(population_size=20, max_depth=3, generations=1, seed=0)
        _, report = tmo_run(data, config, population)
        seconds[n] = report.generations[0].elapsed_seconds
    assert 1.5 <= seconds[4000] / seconds[2000] <= 3.0


@pytest.mark.parametrize("seed", range(5))
def test_generation_bootstrap_differs_from_member_bags(seed):
    n = 200
    first_generation = bootstrap_indices(n, generation_rng(seed))
    for index in range(8):
        bag = bootstrap_indices(n, make_rng(member_seed(seed, index)))
        assert not np.array_equal(first_generation, bag)


def test_generation_stream_is_deterministic():
    assert generation_rng(5).random(4).tolist() == generation_rng(5).random(4).tolist()
