"""
TMO: memetische Optimierung achsenparalleler Klassifikationsbäume begrenzter Tiefe.
"""
from tmo.dataset import Dataset, SplitSpec, parse_libsvm, load_libsvm, serialize_libsvm, split_dataset, bootstrap_sample
from tmo.tree import Node, Tree, EncodedTree, predict, evaluate_accuracy, encode, decode_and_repair, assign_leaf_labels, dump_tree, load_tree
from tmo.memetic import Population, TmoConfig, EvolutionReport, sample_partner, crossover, tmo_run
from tmo.tao import compute_reduced_sets, optimize_internal_node, tao_optimize
from tmo.greedy import SplitCandidate, gini_impurity, best_axis_split, grow_greedy_tree, init_population

__all__ = [
    # Daten
    'Dataset',
    'SplitSpec',
    'parse_libsvm',
    'load_libsvm',
    'serialize_libsvm',
    'split_dataset',
    'bootstrap_sample',

    # Bäume
    'Node',
    'Tree',
    'EncodedTree',
    'predict',
    'evaluate_accuracy',
    'encode',
    'decode_and_repair',
    'assign_leaf_labels',
    'dump_tree',
    'load_tree',

    # Greedy
    'SplitCandidate',
    'gini_impurity',
    'best_axis_split',
    'grow_greedy_tree',
    'init_population',

    # TAO
    'compute_reduced_sets',
    'optimize_internal_node',
    'tao_optimize',

    # Memetik
    'Population',
    'TmoConfig',
    'EvolutionReport',
    'sample_partner',
    'crossover',
    'tmo_run'
]
