"""Finite metric-tree model of the Berkovich closed unit disc.

Edges are identified by their child node. The A-coordinate is stored as edge
lengths; alpha is always derived as the sum of a_length / edge_multiplicity
along the root path.
"""
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx

from disc.rationals import INF, ExtendedRational, to_fraction
from disc.validation_funcs import (is_extended_rational, is_list, is_mapping, is_not_blank, is_positive_integer,
                                   validate_value)
from util.exceptions import (PointError, SubtreeError, TreeValidationError, UnknownPointError,
                             ValidationException)


class PointType(enum.Enum):
    T1 = 1
    T2 = 2
    T3 = 3
    T4 = 4

    @classmethod
    def parse(cls, value):
        if isinstance(value, PointType):
            return value
        text = str(value).strip().upper()
        if not text.startswith('T'):
            text = f'T{text}'
        try:
            return cls[text]
        except KeyError:
            raise ValidationException(f"Value [{value}] is not a point type, expected one of T1, T2, T3, T4")

    def __str__(self):
        return self.name


LEAF_TYPES = (PointType.T1, PointType.T4)
INTERIOR_TYPES = (PointType.T2, PointType.T3)


@dataclass(frozen=True)
class TreePoint:
    """A node, or a point strictly inside an edge at an A-offset from the edge's parent."""
    node: Optional[str] = None
    edge: Optional[str] = None
    offset: Optional[Fraction] = None

    @classmethod
    def at(cls, node_id):
        return cls(node=node_id)

    @classmethod
    def on_edge(cls, edge_id, offset):
        return cls(edge=edge_id, offset=to_fraction(offset))

    @classmethod
    def parse(cls, text):
        parts = str(text).strip().split(':')
        if len(parts) == 2 and parts[0] == 'node' and parts[1]:
            return cls.at(parts[1])
        if len(parts) == 3 and parts[0] == 'edge' and parts[1]:
            try:
                return cls.on_edge(parts[1], parts[2])
            except ValueError:
                pass
        raise PointError(f"Point [{text}] is not of the form node:<id> or edge:<id>:<p/q>")

    @property
    def is_node(self):
        return self.node is not None

    def __str__(self):
        if self.is_node:
            return f"node:{self.node}"
        return f"edge:{self.edge}:{self.offset.numerator}/{self.offset.denominator}"


class Coords(NamedTuple):
    A: ExtendedRational
    alpha: ExtendedRational
    m: int


class DiscTree:
    """
    Rooted finite tree with typed, multiplicity-annotated nodes and A-length edges.

    Instances are immutable: the underlying graph is frozen and every mutating
    operation of this module returns a new tree. Node and edge iteration follows
    a depth-first preorder with children sorted by id, so every algorithm that
    walks the tree is deterministic.
    """

    def __init__(self, graph: nx.DiGraph, root: str, edge_labels: Optional[Dict[str, str]] = None):
        self._graph = nx.freeze(graph)
        self._root = root
        self._edge_labels = dict(edge_labels or {})
        self._parents = {child: parent for parent, child in self._graph.edges}
        self._order = tuple(nx.dfs_preorder_nodes(self._graph, source=root, sort_neighbors=sorted))
        self._A = {root: ExtendedRational(0)}
        self._alpha = {root: ExtendedRational(0)}
        for node in self._order[1:]:
            parent = self._parents[node]
            self._A[node] = self._A[parent] + self.a_length(node)
            self._alpha[node] = self._alpha[parent] + self.a_length(node) / self.edge_mult(node)

    @property
    def graph(self):
        return self._graph

    @property
    def root(self):
        return self._root

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self._order

    @property
    def edges(self) -> Tuple[str, ...]:
        """Edge ids, i.e. every non-root node in preorder."""
        return self._order[1:]

    @property
    def edge_labels(self) -> Dict[str, str]:
        return dict(self._edge_labels)

    def __contains__(self, node_id):
        return node_id in self._A

    def __len__(self):
        return len(self._order)

    def __eq__(self, other):
        if not isinstance(other, DiscTree):
            return NotImplemented
        if self is other:
            return True
        return (self._root == other._root
                and self._edge_labels == other._edge_labels
                and dict(self._graph.nodes(data=True)) == dict(other._graph.nodes(data=True))
                and {(u, v): d for u, v, d in self._graph.edges(data=True)}
                == {(u, v): d for u, v, d in other._graph.edges(data=True)})

    __hash__ = object.__hash__

    def _require(self, node_id):
        if node_id not in self._A:
            raise UnknownPointError(f"Node [{node_id}] is not in the tree")

    def point_type(self, node_id) -> PointType:
        self._require(node_id)
        return self._graph.nodes[node_id]['point_type']

    def node_mult(self, node_id) -> int:
        self._require(node_id)
        return self._graph.nodes[node_id]['mult']

    def parent(self, node_id) -> Optional[str]:
        self._require(node_id)
        return self._parents.get(node_id)

    def children(self, node_id) -> List[str]:
        self._require(node_id)
        return sorted(self._graph.successors(node_id))

    def a_length(self, edge_id) -> ExtendedRational:
        return self._graph.edges[self._parents[edge_id], edge_id]['a_length']

    def edge_mult(self, edge_id) -> int:
        return self._graph.edges[self._parents[edge_id], edge_id]['mult']

    def A(self, node_id) -> ExtendedRational:
        self._require(node_id)
        return self._A[node_id]

    def alpha(self, node_id) -> ExtendedRational:
        self._require(node_id)
        return self._alpha[node_id]

    def path_to_root(self, node_id) -> List[str]:
        self._require(node_id)
        path = [node_id]
        while path[-1] != self._root:
            path.append(self._parents[path[-1]])
        return path

    def is_below(self, lower, upper) -> bool:
        """True when ``lower`` lies in the subtree hanging from ``upper`` (inclusive)."""
        return upper in self.path_to_root(lower)

    def subtree_nodes(self, node_id) -> List[str]:
        below = nx.descendants(self._graph, node_id)
        return [node for node in self._order if node in below or node == node_id]

    def lca(self, first, second) -> str:
        self._require(first)
        self._require(second)
        return nx.lowest_common_ancestor(self._graph, first, second)

    def leaves(self) -> List[str]:
        return [node for node in self._order if self._graph.out_degree(node) == 0]

    def all_multiplicities_one(self) -> bool:
        return all(self.node_mult(node) == 1 for node in self._order)

    def edge_child(self, edge_ref) -> str:
        """Resolve an edge label or a child id to the child id."""
        if edge_ref in self._edge_labels:
            return self._edge_labels[edge_ref]
        if edge_ref in self._parents:
            return edge_ref
        raise UnknownPointError(f"Edge [{edge_ref}] is not in the tree")

    def edge_label(self, edge_id) -> str:
        for label, child in self._edge_labels.items():
            if child == edge_id:
                return label
        return edge_id

    def locate(self, point: TreePoint) -> TreePoint:
        """Return the canonical form of a point: edge labels resolved to child ids, offset checked."""
        if point.is_node:
            self._require(point.node)
            return point
        child = self.edge_child(point.edge)
        length = self.a_length(child)
        if not (0 < point.offset and ExtendedRational(point.offset) < length):
            raise PointError(f"Offset {point.offset} is not strictly inside edge [{point.edge}] of length {length}")
        if child == point.edge:
            return point
        return TreePoint.on_edge(child, point.offset)

    def fresh_id(self, base) -> str:
        candidate, index = base, 1
        while candidate in self._A:
            index += 1
            candidate = f"{base}{index}"
        return candidate

    def mutable_graph(self) -> nx.DiGraph:
        return nx.DiGraph(self._graph)

    def to_description(self) -> dict:
        labels = {child: label for label, child in self._edge_labels.items()}
        edges = []
        for child in self.edges:
            record = {'parent': self._parents[child], 'child': child,
                      'a_length': str(self.a_length(child)), 'mult': self.edge_mult(child)}
            if child in labels:
                record = {'id': labels[child], **record}
            edges.append(record)
        return {
            'nodes': [{'id': node, 'type': str(self.point_type(node)), 'mult': self.node_mult(node)}
                      for node in self._order],
            'edges': edges,
            'root': self._root,
        }


def collect_tree_violations(description: dict) -> List[str]:
    """Check a scene's nodes/edges/root sections and list every invariant violation found."""
    violations = []

    def check(field_name, value, funcs):
        try:
            validate_value(field_name, value, funcs)
            return True
        except ValidationException as e:
            violations.append(str(e))
            return False

    if not check('nodes', description.get('nodes'), [is_list]) \
            or not check('edges', description.get('edges'), [is_list]) \
            or not check('root', description.get('root'), [is_not_blank]):
        return violations

    nodes = {}
    for index, record in enumerate(description['nodes']):
        if not check(f'nodes[{index}]', record, [is_mapping]):
            continue
        node_id = record.get('id')
        if not check(f'nodes[{index}].id', node_id, [is_not_blank]):
            continue
        node_id = str(node_id)
        if node_id in nodes:
            violations.append(f"duplicate node id [{node_id}]")
            continue
        try:
            point_type = PointType.parse(record.get('type'))
        except ValidationException as e:
            violations.append(f"Field: [nodes[{index}].type]. Validation message: {e}")
            continue
        if not check(f'nodes[{index}].mult', record.get('mult', 1), [is_positive_integer]):
            continue
        nodes[node_id] = (point_type, record.get('mult', 1))

    root = str(description['root'])
    if root not in nodes:
        violations.append(f"root [{root}] is not a declared node")
    elif nodes[root] != (PointType.T2, 1):
        violations.append(f"root [{root}] must have type T2 and multiplicity 1")

    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    labels = set()
    for index, record in enumerate(description['edges']):
        if not check(f'edges[{index}]', record, [is_mapping]):
            continue
        parent, child = str(record.get('parent')), str(record.get('child'))
        label = record.get('id')
        if label is not None:
            label = str(label)
            if label in labels:
                violations.append(f"duplicate edge id [{label}]")
            labels.add(label)
        if parent not in nodes or child not in nodes:
            violations.append(f"edge {parent}->{child} references an unknown node")
            continue
        if not check(f'edges[{index}].a_length', record.get('a_length'), [is_extended_rational]) \
                or not check(f'edges[{index}].mult', record.get('mult', 1), [is_positive_integer]):
            continue
        length, mult = ExtendedRational(record['a_length']), record.get('mult', 1)
        if length <= 0:
            violations.append(f"edge {parent}->{child} has nonpositive length {length}")
            continue
        if child == root:
            violations.append(f"root [{root}] cannot have a parent edge")
            continue
        if graph.in_degree(child) > 0:
            violations.append(f"node [{child}] has more than one parent edge")
            continue
        child_type, child_mult = nodes[child]
        if child_type is PointType.T1 and length.is_finite:
            violations.append(f"node [{child}]: T1 requires infinite edge")
        if child_type is not PointType.T1 and length.is_infinite:
            violations.append(f"node [{child}]: infinite edge requires a T1 child")
        if mult != child_mult:
            violations.append(f"edge {parent}->{child}: edge multiplicity {mult} differs from node multiplicity "
                              f"{child_mult}")
        if mult < nodes[parent][1]:
            violations.append(f"edge {parent}->{child}: edge multiplicity {mult} is below parent multiplicity "
                              f"{nodes[parent][1]}")
        if nodes[parent][0] in LEAF_TYPES:
            violations.append(f"node [{parent}] of type {nodes[parent][0]} must be a leaf")
        graph.add_edge(parent, child)

    if not nx.is_directed_acyclic_graph(graph):
        violations.append("cycle detected")
    elif root in nodes:
        unreachable = set(nodes) - {root} - nx.descendants(graph, root)
        for node_id in sorted(unreachable):
            violations.append(f"node [{node_id}] is not connected to the root")
    return violations


def build_tree(description: dict) -> DiscTree:
    violations = collect_tree_violations(description)
    if violations:
        raise TreeValidationError(violations)
    graph = nx.DiGraph()
    for record in description['nodes']:
        graph.add_node(str(record['id']), point_type=PointType.parse(record['type']), mult=record.get('mult', 1))
    labels = {}
    for record in description['edges']:
        parent, child = str(record['parent']), str(record['child'])
        graph.add_edge(parent, child, a_length=ExtendedRational(record['a_length']), mult=record.get('mult', 1))
        if record.get('id') is not None:
            labels[str(record['id'])] = child
    return DiscTree(graph, str(description['root']), labels)


def anchor(tree: DiscTree, point: TreePoint) -> Tuple[str, ExtendedRational]:
    """The lowest node whose root path contains the point, and the point's A-coordinate."""
    point = tree.locate(point)
    if point.is_node:
        return point.node, tree.A(point.node)
    return point.edge, tree.A(tree.parent(point.edge)) + point.offset


def point_on_root_path(tree: DiscTree, node_id, a_value) -> TreePoint:
    """The point of the segment [node, root] with A-coordinate ``a_value``."""
    a_value = ExtendedRational(a_value)
    current = node_id
    if a_value > tree.A(current) or a_value < 0:
        raise PointError(f"A = {a_value} is not on the path from [{node_id}] to the root")
    while True:
        if tree.A(current) == a_value:
            return TreePoint.at(current)
        parent = tree.parent(current)
        if tree.A(parent) < a_value:
            return TreePoint.on_edge(current, (a_value - tree.A(parent)).fraction)
        current = parent


def coords(tree: DiscTree, p: TreePoint) -> Coords:
    point = tree.locate(p)
    if point.is_node:
        return Coords(tree.A(point.node), tree.alpha(point.node), tree.node_mult(point.node))
    parent = tree.parent(point.edge)
    mult = tree.edge_mult(point.edge)
    return Coords(tree.A(parent) + point.offset, tree.alpha(parent) + Fraction(point.offset, mult), mult)


def join(tree: DiscTree, p: TreePoint, q: TreePoint) -> TreePoint:
    """The least upper bound p v q: the deepest point lying on both root paths."""
    first, first_a = anchor(tree, p)
    second, second_a = anchor(tree, q)
    common = tree.lca(first, second)
    return point_on_root_path(tree, common, min(first_a, second_a, tree.A(common)))


@dataclass(frozen=True)
class Subtree:
    """
    Closed connected subtree containing the root (or the empty set).

    ``nodes`` is closed under taking parents; every edge between two member
    nodes is included in full. ``partial`` maps an edge leaving the node set to
    the A-offset at which the subtree stops on it.
    """
    nodes: FrozenSet[str]
    partial: Dict[str, Fraction] = field(default_factory=dict)

    @classmethod
    def empty(cls):
        return cls(frozenset())

    @classmethod
    def whole(cls, tree: DiscTree):
        return cls(frozenset(tree.nodes))

    @classmethod
    def root_only(cls, tree: DiscTree):
        return cls(frozenset([tree.root]))

    def __hash__(self):
        return hash((self.nodes, frozenset(self.partial.items())))

    @property
    def is_empty(self):
        return not self.nodes

    def check(self, tree: DiscTree) -> None:
        if tree.root not in self.nodes:
            raise SubtreeError("Subtree does not contain the root")
        for node in self.nodes:
            if node not in tree:
                raise SubtreeError(f"Subtree node [{node}] is not in the tree")
            if node != tree.root and tree.parent(node) not in self.nodes:
                raise SubtreeError(f"Subtree is not connected: parent of [{node}] is missing")
        for edge, offset in self.partial.items():
            if edge not in tree or edge == tree.root:
                raise SubtreeError(f"Subtree cut on unknown edge [{edge}]")
            if edge in self.nodes or tree.parent(edge) not in self.nodes:
                raise SubtreeError(f"Subtree cut on edge [{edge}] does not leave the node set")
            if not (0 < offset and ExtendedRational(offset) < tree.a_length(edge)):
                raise SubtreeError(f"Subtree cut {offset} is not strictly inside edge [{edge}]")

    def contains(self, tree: DiscTree, p: TreePoint) -> bool:
        return retraction(tree, self, p) == tree.locate(p)

    def __str__(self):
        parts = sorted(self.nodes) + [f"{edge}<={offset}" for edge, offset in sorted(self.partial.items())]
        return "{" + ", ".join(parts) + "}"


def hull(tree: DiscTree, points: Iterable[TreePoint], base: Optional[Subtree] = None) -> Subtree:
    """Convex hull of the root, the base subtree and the points."""
    nodes = set(base.nodes) if base is not None else set()
    nodes.add(tree.root)
    partial = dict(base.partial) if base is not None else {}
    for p in points:
        point = tree.locate(p)
        if point.is_node:
            top = point.node
        else:
            partial[point.edge] = max(partial.get(point.edge, Fraction(0)), point.offset)
            top = tree.parent(point.edge)
        nodes.update(tree.path_to_root(top))
    partial = {edge: offset for edge, offset in partial.items() if edge not in nodes}
    return Subtree(frozenset(nodes), partial)


def retraction(tree: DiscTree, subtree: Subtree, p: TreePoint) -> TreePoint:
    """The point of the subtree closest to p along the path from p to the root."""
    subtree.check(tree)
    point = tree.locate(p)
    if point.is_node:
        current = point.node
    else:
        if point.edge in subtree.nodes:
            return point
        if point.edge in subtree.partial:
            cut = subtree.partial[point.edge]
            return point if point.offset <= cut else TreePoint.on_edge(point.edge, cut)
        current = tree.parent(point.edge)
    while current not in subtree.nodes:
        if current in subtree.partial:
            return TreePoint.on_edge(current, subtree.partial[current])
        current = tree.parent(current)
    return TreePoint.at(current)


def insert_point(tree: DiscTree, p: TreePoint, point_type=PointType.T2) -> Tuple[DiscTree, str]:
    """Subdivide an edge at p; both halves keep the edge multiplicity, so every coordinate is unchanged."""
    point_type = PointType.parse(point_type)
    if point_type not in INTERIOR_TYPES:
        raise PointError(f"Only T2 or T3 points can be inserted, got {point_type}")
    point = tree.locate(p)
    if point.is_node:
        raise PointError(f"Point [{p}] is already a node")
    child = point.edge
    parent = tree.parent(child)
    length, mult = tree.a_length(child), tree.edge_mult(child)
    new_id = tree.fresh_id(f"{child}.s")
    graph = tree.mutable_graph()
    graph.remove_edge(parent, child)
    graph.add_node(new_id, point_type=point_type, mult=mult)
    graph.add_edge(parent, new_id, a_length=ExtendedRational(point.offset), mult=mult)
    graph.add_edge(new_id, child, a_length=length - point.offset, mult=mult)
    return DiscTree(graph, tree.root, tree.edge_labels), new_id


def descend_multiplicity(tree: DiscTree, x) -> Tuple[DiscTree, str]:
    """Attach a rigid leaf x' below x with m(x') = m(x)."""
    if tree.point_type(x) not in INTERIOR_TYPES:
        raise PointError(f"Node [{x}] has type {tree.point_type(x)}; only T2/T3 points have rigid descendants")
    mult = tree.node_mult(x)
    new_id = tree.fresh_id(f"{x}'")
    graph = tree.mutable_graph()
    graph.add_node(new_id, point_type=PointType.T1, mult=mult)
    graph.add_edge(x, new_id, a_length=INF, mult=mult)
    return DiscTree(graph, tree.root, tree.edge_labels), new_id


def pin_point(tree: DiscTree, p: TreePoint) -> Tuple[DiscTree, str]:
    """Make p a node, inserting a T2 point if it lies inside an edge."""
    point = tree.locate(p)
    if point.is_node:
        return tree, point.node
    return insert_point(tree, point, PointType.T2)


def transfer_point(source: DiscTree, target: DiscTree, p: TreePoint) -> TreePoint:
    """Map a point of ``source`` onto ``target``, a refinement of it."""
    node_id, a_value = anchor(source, p)
    if node_id not in target:
        raise UnknownPointError(f"Node [{node_id}] is missing from the refined tree")
    return point_on_root_path(target, node_id, a_value)
