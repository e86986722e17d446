"""
Achsenparallele Entscheidungsbäume begrenzter Tiefe: Struktur, Vorhersage,
Kodierung fester Länge und Dekodierung mit Strukturreparatur.
"""
import logging
import numpy as np
from collections import deque
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
from tmo.constants import LEAF_SLOT, NIL_SLOT
from tmo.dataset import Dataset
from tmo.errors import TreeError
from tmo.utils import SeedLike, encoded_length, level_of, majority_label, make_rng

logger = logging.getLogger(__name__)

Slot = Tuple[Optional[float], Optional[float]]

# Slot-Arten
BRANCH = "branch"
LEAF = "leaf"
NIL = "nil"


class Node:
    """Knoten eines Baums: Branch mit (feature, threshold) oder Blatt mit Label."""
    __slots__ = ('feature', 'threshold', 'label', 'left', 'right')

    def __init__(self, feature: Optional[int] = None, threshold: Optional[float] = None,
                 label: Optional[int] = None, left: Optional['Node'] = None,
                 right: Optional['Node'] = None):
        self.feature = feature
        self.threshold = threshold
        self.label = label
        self.left = left
        self.right = right

    @classmethod
    def branch(cls, feature: int, threshold: float, left: 'Node', right: 'Node') -> 'Node':
        return cls(feature=int(feature), threshold=float(threshold), left=left, right=right)

    @classmethod
    def leaf(cls, label: int) -> 'Node':
        return cls(label=int(label))

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def copy(self) -> 'Node':
        """Tiefe Kopie des Teilbaums."""
        if self.is_leaf:
            return Node(label=self.label)
        return Node(self.feature, self.threshold, self.label, self.left.copy(), self.right.copy())

    def __repr__(self) -> str:
        if self.is_leaf:
            return f"Leaf({self.label})"
        return f"Branch(x[{self.feature}] <= {self.threshold!r})"


class Tree:
    """Baum mit maximaler Tiefe d. Wird nach der Konstruktion nicht mehr verändert."""
    __slots__ = ('root', 'max_depth')

    def __init__(self, root: Node, max_depth: int):
        if max_depth < 1:
            raise TreeError(f"max_depth muss >= 1 sein, ist {max_depth}")
        self.root = root
        self.max_depth = int(max_depth)
        if self.depth() > self.max_depth:
            raise TreeError(f"Baumtiefe {self.depth()} überschreitet max_depth {self.max_depth}")

    def iter_nodes(self) -> Iterator[Tuple[int, int, Node]]:
        """Breitensuche (links zuerst); liefert (Heap-Position, Tiefe, Knoten)."""
        queue = deque([(0, 0, self.root)])
        while queue:
            position, level, node = queue.popleft()
            yield position, level, node
            if not node.is_leaf:
                queue.append((2 * position + 1, level + 1, node.left))
                queue.append((2 * position + 2, level + 1, node.right))

    def nodes_by_position(self) -> Dict[int, Node]:
        return {position: node for position, _, node in self.iter_nodes()}

    def depth(self) -> int:
        return max(level for _, level, _ in self.iter_nodes())

    def skeleton(self) -> List[Tuple[int, bool]]:
        """Struktur ohne Parameter: (Position, ist Blatt) in BFS-Reihenfolge."""
        return [(position, node.is_leaf) for position, _, node in self.iter_nodes()]

    def copy(self) -> 'Tree':
        return Tree(self.root.copy(), self.max_depth)

    def validate(self, feature_count: Optional[int] = None, class_count: Optional[int] = None) -> None:
        """Prüft alle Baum-Invarianten und wirft TreeError bei einer Verletzung."""
        for position, level, node in self.iter_nodes():
            if level > self.max_depth:
                raise TreeError(f"Knoten {position} liegt in Tiefe {level} > {self.max_depth}")
            if node.is_leaf:
                if node.left is not None or node.right is not None:
                    raise TreeError(f"Blatt {position} hat Kinder")
                if node.label is None:
                    raise TreeError(f"Blatt {position} hat kein Label")
                if class_count is not None and not (0 <= node.label < class_count):
                    raise TreeError(f"Label {node.label} von Blatt {position} außerhalb [0, {class_count})")
            else:
                if node.left is None or node.right is None:
                    raise TreeError(f"Branch {position} hat nicht genau zwei Kinder")
                if node.feature < 0 or (feature_count is not None and node.feature >= feature_count):
                    raise TreeError(f"Merkmal {node.feature} von Branch {position} ungültig")
                if not np.isfinite(node.threshold):
                    raise TreeError(f"Schwellwert von Branch {position} ist nicht endlich")

    def __repr__(self) -> str:
        return f"Tree(max_depth={self.max_depth}, nodes={sum(1 for _ in self.iter_nodes())})"


# Vorhersage

def predict(tree: Tree, x: Sequence[float]) -> int:
    """Leitet x von der Wurzel aus: links genau dann, wenn x[f] <= τ."""
    node = tree.root
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return int(node.label)


def predict_rows(node: Node, features: np.ndarray, rows: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Vektorisierte Vorhersage des Teilbaums `node` für die angegebenen Zeilen.
    Ergebnis in der Reihenfolge von `rows`.
    """
    if rows is None:
        rows = np.arange(features.shape[0])
    out = np.empty(rows.shape[0], dtype=np.int64)
    _route(node, features, rows, np.arange(rows.shape[0]), out)
    return out


def _route(node: Node, features: np.ndarray, rows: np.ndarray, slots: np.ndarray, out: np.ndarray) -> None:
    if node.is_leaf:
        out[slots] = node.label
        return
    go_left = features[rows, node.feature] <= node.threshold
    _route(node.left, features, rows[go_left], slots[go_left], out)
    _route(node.right, features, rows[~go_left], slots[~go_left], out)


def misclassification_count(tree: Tree, data: Dataset) -> int:
    return int(np.count_nonzero(predict_rows(tree.root, data.features) != data.labels))


def evaluate_accuracy(tree: Tree, data: Dataset) -> float:
    """Anteil korrekt klassifizierter Zeilen, berechnet als 1 - Fehler/n."""
    return 1.0 - misclassification_count(tree, data) / data.n


# Blatt-Labels

def relabel_leaves(root: Node, data: Dataset) -> None:
    """
    Setzt jedes Blatt-Label auf die Mehrheitsklasse der ankommenden Punkte (in-place).
    Leere Blätter erben die Mehrheit des nächsten Vorfahren mit nicht-leerer Menge.
    """
    rows = np.arange(data.n)
    fallback = majority_label(data.labels, data.class_count)
    _relabel(root, data, rows, fallback)


def _relabel(node: Node, data: Dataset, rows: np.ndarray, fallback: int) -> None:
    if rows.size:
        fallback = majority_label(data.labels[rows], data.class_count)
    if node.is_leaf:
        node.label = fallback
        return
    go_left = data.features[rows, node.feature] <= node.threshold
    _relabel(node.left, data, rows[go_left], fallback)
    _relabel(node.right, data, rows[~go_left], fallback)


def assign_leaf_labels(tree: Tree, train: Dataset) -> Tree:
    """Kopie des Baums mit Mehrheits-Labels aus `train`."""
    result = tree.copy()
    relabel_leaves(result.root, train)
    return result


# Kodierung fester Länge

def slot_kind(slot: Slot) -> str:
    if slot[0] is None:
        return NIL
    if slot[0] == LEAF_SLOT[0]:
        return LEAF
    return BRANCH


class EncodedTree:
    """
    Liste von 2^d - 1 Slots in BFS-Reihenfolge (links zuerst); Slot z hat die
    Kinder 2z+1 und 2z+2. Ein Slot ist (f, τ), LEAF_SLOT oder NIL_SLOT.
    """
    __slots__ = ('slots', 'depth')

    def __init__(self, slots: Sequence[Slot], depth: int):
        if depth < 1:
            raise TreeError(f"Tiefe der Kodierung muss >= 1 sein, ist {depth}")
        slots = tuple(tuple(slot) for slot in slots)
        if len(slots) != encoded_length(depth):
            raise TreeError(f"Kodierung der Tiefe {depth} braucht {encoded_length(depth)} Slots, hat {len(slots)}")
        for slot in slots:
            if len(slot) != 2:
                raise TreeError(f"Slot {slot!r} ist kein Paar")
        self.slots = slots
        self.depth = int(depth)

    def kinds(self) -> List[str]:
        return [slot_kind(slot) for slot in self.slots]

    def __len__(self) -> int:
        return len(self.slots)

    def __getitem__(self, index: int) -> Slot:
        return self.slots[index]

    def __iter__(self):
        return iter(self.slots)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EncodedTree):
            return NotImplemented
        return self.depth == other.depth and self.slots == other.slots

    def __hash__(self) -> int:
        return hash((self.depth, self.slots))

    def __repr__(self) -> str:
        return f"EncodedTree(depth={self.depth}, slots={list(self.slots)!r})"


def encode(tree: Tree) -> EncodedTree:
    """
    Kodiert den Baum über der balancierten Struktur der Tiefe d-1.
    Branches werden zu (f, τ), Blätter oberhalb von Tiefe d zu LEAF_SLOT,
    fehlende Positionen zu NIL_SLOT; Blätter der Tiefe d entfallen.
    """
    depth = tree.max_depth
    slots: List[Slot] = [NIL_SLOT] * encoded_length(depth)
    for position, level, node in tree.iter_nodes():
        if level >= depth:
            continue
        slots[position] = LEAF_SLOT if node.is_leaf else (node.feature, node.threshold)
    return EncodedTree(slots, depth)


def _random_split(train: Dataset, rng: np.random.Generator) -> Tuple[int, float]:
    # Merkmal gleichverteilt, Schwellwert gleichverteilt im beobachteten Wertebereich
    feature = int(rng.integers(train.feature_count))
    column = train.features[:, feature]
    threshold = float(rng.uniform(column.min(), column.max()))
    return feature, threshold


def decode_and_repair(encoded: EncodedTree, train: Dataset, rng: SeedLike = None) -> Tree:
    """
    Dekodiert eine (ggf. durch Crossover inkonsistente) Kodierung in einen gültigen Baum.

    Ein einziger BFS-Durchlauf über die erreichbaren Slots:
      (a) Wurzel NIL -> Baum aus einem Blatt;
      (b) Blatt, dessen Kind-Slot ein Branch ist -> Branch mit zufälligen Parametern;
      (c) NIL unter einem Branch -> Blatt (danach gilt wieder (b));
      (d) Slots unter einem Blatt sind unerreichbar und werden ignoriert;
      (e) Branches in Tiefe d-1 erhalten implizit zwei Blätter in Tiefe d.
    Anschließend werden die Blatt-Labels per Mehrheit auf `train` gesetzt.
    """
    rng = make_rng(rng)
    depth = encoded.depth
    last_level = depth - 1
    slots = encoded.slots

    resolved: Dict[int, Optional[Tuple[int, float]]] = {}
    repairs = 0
    queue = deque([0])
    while queue:
        position = queue.popleft()
        level = level_of(position)
        slot = slots[position]
        kind = slot_kind(slot)

        params = None
        if kind == BRANCH:
            params = (int(slot[0]), float(slot[1]))
        elif not (position == 0 and kind == NIL):
            if level < last_level and (slot_kind(slots[2 * position + 1]) == BRANCH
                                       or slot_kind(slots[2 * position + 2]) == BRANCH):
                params = _random_split(train, rng)
                repairs += 1

        resolved[position] = params
        if params is not None and level < last_level:
            queue.append(2 * position + 1)
            queue.append(2 * position + 2)

    def build(position: int) -> Node:
        params = resolved.get(position)
        if params is None:
            return Node.leaf(0)
        return Node.branch(params[0], params[1], build(2 * position + 1), build(2 * position + 2))

    root = build(0)
    relabel_leaves(root, train)
    if repairs:
        logger.debug("Reparatur: %d Blätter zu zufälligen Branches umgewandelt", repairs)
    return Tree(root, depth)


# Textformat

def dump_tree(tree: Tree) -> str:
    """
    Zeilenformat: Kopfzeile `depth d`, danach eine Zeile pro Heap-Position der
    vollständigen Struktur der Tiefe d (`branch f τ`, `leaf label` oder `nil`).
    """
    nodes = tree.nodes_by_position()
    lines = [f"depth {tree.max_depth}"]
    for position in range(encoded_length(tree.max_depth + 1)):
        node = nodes.get(position)
        if node is None:
            lines.append(f"{position} nil")
        elif node.is_leaf:
            lines.append(f"{position} leaf {node.label}")
        else:
            lines.append(f"{position} branch {node.feature} {node.threshold!r}")
    return "\n".join(lines) + "\n"


def load_tree(text: str) -> Tree:
    """Liest das Format von `dump_tree`."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("depth "):
        raise TreeError("Kopfzeile 'depth d' fehlt")
    try:
        depth = int(lines[0].split()[1])
        entries: Dict[int, List[str]] = {}
        for line in lines[1:]:
            tokens = line.split()
            entries[int(tokens[0])] = tokens[1:]
    except (IndexError, ValueError) as e:
        raise TreeError(f"Baumdatei nicht lesbar: {e}") from e

    def build(position: int) -> Node:
        tokens = entries.get(position)
        if not tokens or tokens[0] == "nil":
            raise TreeError(f"Position {position} ist erreichbar, aber nicht belegt")
        if tokens[0] == "leaf":
            return Node.leaf(int(tokens[1]))
        if tokens[0] == "branch":
            return Node.branch(int(tokens[1]), float(tokens[2]),
                               build(2 * position + 1), build(2 * position + 2))
        raise TreeError(f"Unbekannter Knotentyp '{tokens[0]}' an Position {position}")

    try:
        root = build(0)
    except (IndexError, ValueError) as e:
        raise TreeError(f"Baumdatei nicht lesbar: {e}") from e
    return Tree(root, depth)
