"""Quasisubharmonic functions as piecewise-affine data on a DiscTree.

A function is stored as its value at the root plus one alpha-slope per edge
(oriented away from the root). Its Laplacian is atomic: the atom at a node is
the sum of its child slopes minus its own parent slope.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional

from disc.disc_model import DiscTree, PointType, Subtree, TreePoint, insert_point
from disc.rationals import INF, ExtendedRational, to_fraction
from util.exceptions import MismatchedTreesError, QshValidationError, UnknownPointError


def require_same_tree(first: DiscTree, second: DiscTree) -> None:
    if first is not second and first != second:
        raise MismatchedTreesError("Operands live on different trees")


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: Dict[str, Fraction] = field(default_factory=dict)

    def __getitem__(self, node_id):
        return self.atoms.get(node_id, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0))

    def support(self):
        return [node for node, atom in self.atoms.items() if atom != 0]

    def __str__(self):
        return "{" + ", ".join(f"{node}: {ExtendedRational(atom)}" for node, atom in self.atoms.items()) + "}"


class QshReport(NamedTuple):
    mass: Fraction
    violations: List[str]

    @property
    def valid(self):
        return not self.violations


@dataclass(frozen=True)
class QshFunction:
    tree: DiscTree
    root_value: Fraction = Fraction(0)
    slopes: Dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'root_value', to_fraction(self.root_value))
        slopes = {}
        for edge, slope in self.slopes.items():
            if edge not in self.tree or edge == self.tree.root:
                raise UnknownPointError(f"Slope given for unknown edge [{edge}]")
            slope = to_fraction(slope)
            if slope != 0:
                slopes[edge] = slope
        object.__setattr__(self, 'slopes', {edge: slopes[edge] for edge in self.tree.edges if edge in slopes})

    @classmethod
    def zero(cls, tree: DiscTree):
        return cls(tree)

    @classmethod
    def from_atoms(cls, tree: DiscTree, atoms: Dict[str, Fraction], root_value=Fraction(0)):
        """Build the function whose non-root atoms are ``atoms``: each edge slope is minus the atom sum below it."""
        below = {}
        for node in reversed(tree.nodes):
            below[node] = to_fraction(atoms.get(node, 0)) + sum((below[child] for child in tree.children(node)),
                                                                 Fraction(0))
        return cls(tree, root_value, {edge: -below[edge] for edge in tree.edges})

    def slope(self, edge_id) -> Fraction:
        return self.slopes.get(edge_id, Fraction(0))

    def atom(self, node_id) -> Fraction:
        own = Fraction(0) if node_id == self.tree.root else self.slope(node_id)
        return sum((self.slope(child) for child in self.tree.children(node_id)), Fraction(0)) - own

    @cached_property
    def node_values(self) -> Dict[str, ExtendedRational]:
        values = {self.tree.root: ExtendedRational(self.root_value)}
        for node in self.tree.edges:
            parent_value = values[self.tree.parent(node)]
            slope = self.slope(node)
            length = self.tree.a_length(node)
            if slope == 0:
                values[node] = parent_value
            elif length.is_infinite:
                values[node] = parent_value + slope * INF
            else:
                values[node] = parent_value + slope * length / self.tree.edge_mult(node)
        return values

    def shifted(self, constant) -> 'QshFunction':
        return QshFunction(self.tree, self.root_value + to_fraction(constant), self.slopes)

    def scaled(self, factor) -> 'QshFunction':
        factor = to_fraction(factor)
        return QshFunction(self.tree, self.root_value * factor,
                           {edge: slope * factor for edge, slope in self.slopes.items()})

    def added(self, other: 'QshFunction') -> 'QshFunction':
        require_same_tree(self.tree, other.tree)
        slopes = dict(self.slopes)
        for edge, slope in other.slopes.items():
            slopes[edge] = slopes.get(edge, Fraction(0)) + slope
        return QshFunction(self.tree, self.root_value + other.root_value, slopes)

    def normalized(self) -> 'QshFunction':
        """The same function shifted so that its value at the root is 0."""
        if self.root_value == 0:
            return self
        return QshFunction(self.tree, Fraction(0), self.slopes)

    def with_slopes(self, slopes: Dict[str, Fraction]) -> 'QshFunction':
        return QshFunction(self.tree, self.root_value, slopes)

    def sup_value(self) -> ExtendedRational:
        return max(self.node_values.values())

    def lift(self, tree: DiscTree) -> 'QshFunction':
        """Carry the function to a refinement of its tree: inserted nodes inherit slopes, new leaves get 0."""
        if tree is self.tree:
            return self
        slopes = {}
        for edge, slope in self.slopes.items():
            if edge not in tree:
                raise MismatchedTreesError(f"Node [{edge}] is missing from the refined tree")
            top = self.tree.parent(edge)
            current = edge
            while current != top:
                slopes[current] = slope
                current = tree.parent(current)
                if current is None:
                    raise MismatchedTreesError(f"Tree is not a refinement: [{top}] is not above [{edge}]")
        return QshFunction(tree, self.root_value, slopes)


def eval_qsh(phi: QshFunction, p: TreePoint) -> ExtendedRational:
    point = phi.tree.locate(p)
    if point.is_node:
        return phi.node_values[point.node]
    parent = phi.tree.parent(point.edge)
    return phi.node_values[parent] + phi.slope(point.edge) * Fraction(point.offset, phi.tree.edge_mult(point.edge))


def laplacian(phi: QshFunction) -> AtomicMeasure:
    atoms = {}
    for node in phi.tree.nodes:
        atom = phi.atom(node)
        if atom != 0:
            atoms[node] = atom
    return AtomicMeasure(atoms)


def mass(phi: QshFunction) -> Fraction:
    """Mass of the minimal admissible measure at the root."""
    return max(Fraction(0), -phi.atom(phi.tree.root))


def validate_qsh(phi: QshFunction) -> QshReport:
    violations = []
    for node in phi.tree.edges:
        atom = phi.atom(node)
        if atom < 0:
            violations.append(f"node [{node}]: atom {ExtendedRational(atom)} < 0")
    return QshReport(mass(phi), violations)


def check_qsh(phi: QshFunction) -> Fraction:
    report = validate_qsh(phi)
    if not report.valid:
        raise QshValidationError(report.violations)
    return report.mass


def below_mass(phi: QshFunction) -> Dict[str, Fraction]:
    """
    Mass of the measure rho0 + laplacian on the nodes at or below each node.

    Below a non-root node the atoms telescope to minus the parent-edge slope;
    at the root the atoms cancel and only rho0 remains.
    """
    values = {phi.tree.root: mass(phi)}
    for node in phi.tree.edges:
        values[node] = -phi.slope(node)
    return values


def retract_pullback(phi: QshFunction, subtree: Subtree) -> QshFunction:
    """
    Pull phi back along the retraction onto ``subtree``.

    Every partial cut becomes a T2 node, so the result lives on a refinement
    of ``phi.tree`` that is unchanged when the subtree has no partial edges.
    """
    subtree.check(phi.tree)
    tree = phi.tree
    cuts = {}
    for edge, offset in subtree.partial.items():
        tree, cut = insert_point(tree, TreePoint.on_edge(edge, offset), PointType.T2)
        cuts[cut] = edge
    slopes = {edge: phi.slope(edge) for edge in subtree.nodes if edge != tree.root}
    for cut, edge in cuts.items():
        slopes[cut] = phi.slope(edge)
    return QshFunction(tree, phi.root_value, slopes)


def gamma_tree(phi: QshFunction, n: Optional[int] = None) -> Subtree:
    """
    Nodes whose below-mass reaches n/(n+1) of their multiplicity, or the full multiplicity for n = None.

    Open edges share below-mass and multiplicity with their lower node, so the
    result never has partial edges.
    """
    check_qsh(phi)
    ratio = Fraction(1) if n is None else Fraction(n, n + 1)
    below = below_mass(phi)
    tree = phi.tree
    if below[tree.root] < ratio:
        return Subtree.empty()
    members = {tree.root}
    for node in tree.edges:
        if tree.parent(node) in members and below[node] >= ratio * tree.node_mult(node):
            members.add(node)
    return Subtree(frozenset(members))


def gamma_ends(tree: DiscTree, gamma: Subtree) -> List[str]:
    """Leaves of a node-only subtree in preorder; the root when the subtree is just the root."""
    return [node for node in tree.nodes
            if node in gamma.nodes and not any(child in gamma.nodes for child in tree.children(node))]


def regularization_subtree(phi: QshFunction, n: int) -> Subtree:
    check_qsh(phi)
    threshold, radius = Fraction(1, 2 ** n), Fraction(2 ** n)
    below = below_mass(phi)
    tree = phi.tree
    members, partial = {tree.root}, {}
    for node in tree.edges:
        parent = tree.parent(node)
        if parent not in members or below[node] < threshold:
            continue
        if tree.alpha(node) <= radius:
            members.add(node)
        elif tree.alpha(parent) < radius:
            partial[node] = (radius - tree.alpha(parent).fraction) * tree.edge_mult(node)
    return Subtree(frozenset(members), partial)


def regularize_seq(phi: QshFunction, n: int) -> QshFunction:
    return retract_pullback(phi, regularization_subtree(phi, n))
