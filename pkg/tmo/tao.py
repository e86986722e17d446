"""
TAO: abwechselnde Optimierung der Knoten eines achsenparallelen Baums fester
Struktur bezüglich der Fehlklassifikation auf einem Datensatz.
"""
import logging
import numpy as np
from typing import Dict, List, Optional, Tuple
from tmo.constants import DONT_CARE, PREFER_LEFT, PREFER_RIGHT, TAO_MAX_PASSES
from tmo.dataset import Dataset
from tmo.errors import ConfigError
from tmo.tree import Node, Tree, misclassification_count, predict_rows, relabel_leaves
from tmo.utils import midpoint

logger = logging.getLogger(__name__)


def compute_reduced_sets(tree: Tree, data: Dataset) -> Dict[int, np.ndarray]:
    """
    Reduzierte Mengen: Heap-Position -> Zeilenindizes, die den Knoten erreichen.
    Die Wurzel erhält alle Zeilen, Kinder partitionieren die Menge des Elternknotens.
    """
    sets: Dict[int, np.ndarray] = {}

    def collect(node: Node, position: int, rows: np.ndarray) -> None:
        sets[position] = rows
        if node.is_leaf:
            return
        go_left = data.features[rows, node.feature] <= node.threshold
        collect(node.left, 2 * position + 1, rows[go_left])
        collect(node.right, 2 * position + 2, rows[~go_left])

    collect(tree.root, 0, np.arange(data.n))
    return sets


def care_labels(node: Node, data: Dataset, rows: np.ndarray) -> np.ndarray:
    """
    Präferenz jedes Punkts: PREFER_LEFT, wenn nur der linke Teilbaum ihn richtig
    klassifiziert, PREFER_RIGHT umgekehrt, sonst DONT_CARE.
    """
    truth = data.labels[rows]
    left_ok = predict_rows(node.left, data.features, rows) == truth
    right_ok = predict_rows(node.right, data.features, rows) == truth
    care = np.full(rows.shape[0], DONT_CARE, dtype=np.int8)
    care[left_ok & ~right_ok] = PREFER_LEFT
    care[right_ok & ~left_ok] = PREFER_RIGHT
    return care


def care_errors(values: np.ndarray, threshold: float, care: np.ndarray) -> int:
    """Anzahl der Punkte, die entgegen ihrer Präferenz geleitet werden."""
    go_left = values <= threshold
    return int(np.count_nonzero((care == PREFER_LEFT) & ~go_left)
               + np.count_nonzero((care == PREFER_RIGHT) & go_left))


def optimize_internal_node(node: Node, data: Dataset, rows: np.ndarray,
                           care: np.ndarray) -> Tuple[int, float]:
    """
    Bestes (Merkmal, Mittelpunkt)-Paar für den Branch `node` bei festen Teilbäumen.
    Die bisherigen Parameter bleiben, solange kein Paar die Fehlerzahl strikt senkt.
    """
    incumbent = (node.feature, node.threshold)
    prefer_left = care == PREFER_LEFT
    prefer_right = care == PREFER_RIGHT
    if not prefer_left.any() and not prefer_right.any():
        return incumbent

    best_errors = care_errors(data.features[rows, node.feature], node.threshold, care)
    best = incumbent
    if best_errors == 0:
        return best

    total_left = int(np.count_nonzero(prefer_left))
    for feature in range(data.feature_count):
        values = data.features[rows, feature]
        order = np.argsort(values, kind="mergesort")
        sorted_values = values[order]
        change = np.nonzero(sorted_values[:-1] < sorted_values[1:])[0]
        if change.size == 0:
            continue
        # Schnitt nach Position i: links bevorzugte Punkte rechts + rechts bevorzugte links
        errors = (total_left - np.cumsum(prefer_left[order])[change]) + np.cumsum(prefer_right[order])[change]
        pos = int(np.argmin(errors))
        if errors[pos] < best_errors:
            best_errors = int(errors[pos])
            i = change[pos]
            best = (feature, midpoint(sorted_values[i], sorted_values[i + 1]))
    return best


def _deepest_branch_level(tree: Tree) -> int:
    return max((level for _, level, node in tree.iter_nodes() if not node.is_leaf), default=-1)


def optimize_level(tree: Tree, data: Dataset, level: int) -> int:
    """
    Optimiert alle Branches einer Tiefe (in-place) und setzt danach die Blatt-Labels neu.
    Knoten gleicher Tiefe haben disjunkte reduzierte Mengen und sind unabhängig.
    Gibt die Zahl geänderter Knoten zurück.
    """
    sets = compute_reduced_sets(tree, data)
    changed = 0
    for position, node_level, node in list(tree.iter_nodes()):
        if node_level != level or node.is_leaf:
            continue
        rows = sets[position]
        if rows.size == 0:
            continue
        care = care_labels(node, data, rows)
        feature, threshold = optimize_internal_node(node, data, rows, care)
        if (feature, threshold) != (node.feature, node.threshold):
            node.feature, node.threshold = int(feature), float(threshold)
            changed += 1
    relabel_leaves(tree.root, data)
    return changed


def tao_optimize(tree: Tree, data: Dataset, max_passes: int = TAO_MAX_PASSES,
                 trace: Optional[List[int]] = None) -> Tree:
    """
    Durchläufe von der tiefsten Branch-Ebene bis zur Wurzel, bis ein Durchlauf
    die Fehlklassifikation auf `data` nicht mehr senkt oder `max_passes` erreicht ist.
    Die Struktur bleibt erhalten; nur Parameter und Blatt-Labels ändern sich.
    `trace` erhält die Fehlerzahl vor dem ersten und nach jedem Durchlauf.
    """
    if max_passes < 1:
        raise ConfigError(f"max_passes muss >= 1 sein, ist {max_passes}")
    result = tree.copy()
    errors = misclassification_count(result, data)
    if trace is not None:
        trace.append(errors)
    if errors == 0:
        return result

    deepest = _deepest_branch_level(result)
    if deepest < 0:
        # Nur ein Blatt: einzig möglicher Schritt ist das Mehrheits-Label
        relabel_leaves(result.root, data)
        if trace is not None:
            trace.append(misclassification_count(result, data))
        return result

    for pass_index in range(1, max_passes + 1):
        for level in range(deepest, -1, -1):
            optimize_level(result, data, level)
        new_errors = misclassification_count(result, data)
        if trace is not None:
            trace.append(new_errors)
        logger.debug("TAO-Durchlauf %d: %d -> %d Fehler", pass_index, errors, new_errors)
        if new_errors >= errors:
            break
        errors = new_errors
    return result
