"""Formal polynomials: a constant log-norm and a root divisor supported on rigid (T1) nodes."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

from disc.disc_model import DiscTree, PointType, TreePoint, coords, join
from disc.potential import AtomicMeasure, QshFunction, require_same_tree
from disc.rationals import ExtendedRational, to_fraction
from util.exceptions import MismatchedTreesError, PointError, UnknownPointError


@dataclass(frozen=True)
class FormalPoly:
    tree: DiscTree
    const_log: Fraction = Fraction(0)
    roots: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'const_log', to_fraction(self.const_log))
        for node, exponent in self.roots.items():
            if node not in self.tree:
                raise UnknownPointError(f"Root [{node}] is not in the tree")
            if self.tree.point_type(node) is not PointType.T1:
                raise PointError(f"Root [{node}] has type {self.tree.point_type(node)}; roots sit at T1 nodes")
            if isinstance(exponent, bool) or not isinstance(exponent, int) or exponent < 0:
                raise PointError(f"Exponent of [{node}] must be a nonnegative integer, got {exponent}")
        object.__setattr__(self, 'roots', {node: self.roots[node] for node in self.tree.nodes
                                           if self.roots.get(node, 0) > 0})

    @classmethod
    def one(cls, tree: DiscTree, const_log=Fraction(0)):
        return cls(tree, const_log)

    @classmethod
    def generator(cls, tree: DiscTree, node_id, exponent=1):
        """g_x^exponent, normalized to |g_x(x_G)| = 1."""
        return cls(tree, Fraction(0), {node_id: exponent})

    def exponent(self, node_id) -> int:
        return self.roots.get(node_id, 0)

    @property
    def degree(self) -> int:
        return sum(self.roots.values())

    def describe(self) -> str:
        if not self.roots:
            return "1"
        return " * ".join(f"g_{node}^{exponent}" for node, exponent in self.roots.items())

    def as_qsh(self) -> QshFunction:
        """log|f| as a piecewise-affine function: each edge has slope -sum(e_x * m(x)) over the roots below it."""
        slopes = {}
        for node, exponent in self.roots.items():
            weight = exponent * self.tree.node_mult(node)
            for edge in self.tree.path_to_root(node)[:-1]:
                slopes[edge] = slopes.get(edge, Fraction(0)) - weight
        return QshFunction(self.tree, self.const_log, slopes)

    def lift(self, tree: DiscTree) -> 'FormalPoly':
        if tree is self.tree:
            return self
        for node in self.tree.nodes:
            if node not in tree:
                raise MismatchedTreesError(f"Node [{node}] is missing from the refined tree")
        return FormalPoly(tree, self.const_log, self.roots)

    def divides(self, other: 'FormalPoly') -> bool:
        """Exponentwise divisibility of the root divisors; constants are units."""
        return all(other.exponent(node) >= exponent for node, exponent in self.roots.items())


def log_norm_eval(f: FormalPoly, p: TreePoint) -> ExtendedRational:
    value = ExtendedRational(f.const_log)
    for node, exponent in f.roots.items():
        alpha = coords(f.tree, join(f.tree, p, TreePoint.at(node))).alpha
        value = value - exponent * f.tree.node_mult(node) * alpha
    return value


def pl_divisor_laplacian(f: FormalPoly) -> AtomicMeasure:
    atoms = {}
    total = Fraction(0)
    for node, exponent in f.roots.items():
        weight = Fraction(exponent * f.tree.node_mult(node))
        atoms[node] = weight
        total += weight
    if total:
        atoms = {f.tree.root: -total, **atoms}
    return AtomicMeasure(atoms)


def poly_multiply(f: FormalPoly, g: FormalPoly) -> FormalPoly:
    require_same_tree(f.tree, g.tree)
    roots = dict(f.roots)
    for node, exponent in g.roots.items():
        roots[node] = roots.get(node, 0) + exponent
    return FormalPoly(f.tree, f.const_log + g.const_log, roots)


def poly_power(f: FormalPoly, k: int) -> FormalPoly:
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise PointError(f"Power must be a nonnegative integer, got {k}")
    return FormalPoly(f.tree, f.const_log * k, {node: exponent * k for node, exponent in f.roots.items()})


def with_value_at(f: FormalPoly, z: TreePoint, target_log) -> FormalPoly:
    """Rescale the constant so that log|f(z)| equals ``target_log``."""
    current = log_norm_eval(f, z)
    if current.is_infinite:
        raise PointError(f"f = {f.describe()} vanishes at {z}; |f(z)| cannot be prescribed")
    return FormalPoly(f.tree, f.const_log + to_fraction(target_log) - current.fraction, f.roots)
