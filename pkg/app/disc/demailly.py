"""Lelong numbers, multiplier ideals and certified bounds for the Demailly approximation phi_m."""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from disc.disc_model import (INTERIOR_TYPES, DiscTree, PointType, TreePoint, coords, descend_multiplicity,
                             insert_point, transfer_point)
from disc.divisor import FormalPoly, log_norm_eval
from disc.extension import extend
from disc.norms import h_generator, h_membership, lelong_numbers, plus_norm
from disc.potential import QshFunction, check_qsh, eval_qsh, require_same_tree
from disc.rationals import INF, NEG_INF, ExtendedRational
from util.common_util import init_logger, print_timing
from util.conf import DISC_SETTINGS
from util.exceptions import NormalizationError, PointError, ShapeError

log = init_logger(__name__)


@dataclass(frozen=True)
class MultiplierData:
    """Lelong number and multiplier-ideal exponent floor(c_x) at every rigid node with c_x > 0."""
    entries: Dict[str, Tuple[Fraction, int]] = field(default_factory=dict)

    def __getitem__(self, node_id):
        return self.entries.get(node_id, (Fraction(0), 0))

    def exponents(self) -> Dict[str, int]:
        return {node: exponent for node, (_, exponent) in self.entries.items() if exponent > 0}


@dataclass(frozen=True)
class DemaillyBound:
    query: TreePoint
    m: int
    lower: ExtendedRational
    upper: ExtendedRational
    witness: FormalPoly

    def head(self):
        return ["Query", "m", "Lower", "Upper", "Witness"]

    def values(self):
        return [str(self.query), self.m, str(self.lower), str(self.upper), self.witness.describe()]


class SubadditivityRow(NamedTuple):
    node: str
    floor_sum: int
    floor_phi: int
    floor_psi: int

    @property
    def holds(self):
        return self.floor_sum >= self.floor_phi + self.floor_psi


class SubadditivityReport(NamedTuple):
    holds: bool
    rows: List[SubadditivityRow]


def lelong_number(phi: QshFunction, x) -> Fraction:
    if phi.tree.point_type(x) is not PointType.T1:
        raise PointError(f"Lelong numbers live at rigid points; [{x}] has type {phi.tree.point_type(x)}")
    check_qsh(phi)
    return Fraction(phi.atom(x), phi.tree.node_mult(x))


def multiplier_exponents(phi: QshFunction) -> MultiplierData:
    check_qsh(phi)
    return MultiplierData({node: (c, math.floor(c)) for node, c in lelong_numbers(phi).items()})


def single_pole(phi: QshFunction) -> Tuple[str, Fraction]:
    """Return (a, coefficient) when phi = coefficient * log|g_a| exactly; raise ShapeError otherwise."""
    tree = phi.tree
    if phi.root_value != 0:
        raise ShapeError(f"phi(root) = {ExtendedRational(phi.root_value)}, expected 0")
    poles = [node for node in tree.leaves()
             if tree.point_type(node) is PointType.T1 and phi.slope(node) != 0]
    if len(poles) != 1:
        raise ShapeError(f"Expected exactly one pole, found {len(poles)}")
    pole = poles[0]
    slope = phi.slope(pole)
    path = tree.path_to_root(pole)[:-1]
    if set(phi.slopes) != set(path) or any(phi.slope(edge) != slope for edge in path):
        raise ShapeError(f"Slope is not constant on the path to [{pole}] and zero elsewhere")
    coefficient = Fraction(-slope, tree.node_mult(pole))
    if coefficient <= 0:
        raise ShapeError(f"Pole coefficient {ExtendedRational(coefficient)} is not positive")
    return pole, coefficient


def demailly_exact_single_pole(phi: QshFunction, m: int) -> QshFunction:
    """phi_m = (floor(m c) / m) log|g_a| for phi = c log|g_a|."""
    pole, coefficient = single_pole(phi)
    exact = Fraction(math.floor(m * coefficient), m) * phi.tree.node_mult(pole)
    return phi.with_slopes({edge: -exact for edge in phi.tree.path_to_root(pole)[:-1]})


def _candidate_value(f: FormalPoly, scaled_phi: QshFunction, source: DiscTree, y: TreePoint, m: int):
    """(1/m)(log|f(y)| - ||f||+_{m phi}) on the tree of f."""
    lifted = scaled_phi.lift(f.tree)
    y_refined = transfer_point(source, f.tree, y)
    norm = plus_norm(f, lifted).log_norm
    if norm == INF:
        return NEG_INF
    return (log_norm_eval(f, y_refined) - norm) / m


def demailly_bounds(phi: QshFunction, m: int, y: TreePoint,
                    extra_polys: Iterable[FormalPoly] = ()) -> DemaillyBound:
    check_qsh(phi)
    if phi.sup_value() > 0:
        raise NormalizationError(f"sup phi = {phi.sup_value()} > 0; shift phi first")
    scaled = phi.scaled(m)
    candidates = [h_generator(scaled), extend(scaled, y).f] + list(extra_polys)
    lower, witness = NEG_INF, candidates[0]
    for f in candidates:
        value = _candidate_value(f, scaled, phi.tree, y, m)
        if value > lower:
            lower, witness = value, f
    point = coords(phi.tree, y)
    upper = INF if point.A.is_infinite else eval_qsh(phi, y) + point.A / m
    return DemaillyBound(phi.tree.locate(y), m, lower, upper, witness)


def interpolated_tree(tree: DiscTree) -> DiscTree:
    """Add a rigid leaf below every T2/T3 node and below the A-midpoint of every finite edge."""
    for edge in [edge for edge in tree.edges if tree.a_length(edge).is_finite]:
        tree, _ = insert_point(tree, TreePoint.on_edge(edge, tree.a_length(edge).fraction / 2), PointType.T2)
    for node in [node for node in tree.nodes if tree.point_type(node) in INTERIOR_TYPES]:
        tree, _ = descend_multiplicity(tree, node)
    return tree


def exponent_vectors(size: int, degree_bound: int):
    """All nonnegative integer vectors of length ``size`` with total at most ``degree_bound``."""
    if size == 0:
        yield ()
        return
    for first in range(degree_bound + 1):
        for rest in exponent_vectors(size - 1, degree_bound - first):
            yield (first,) + rest


@print_timing('demailly_bruteforce')
def demailly_bruteforce(phi: QshFunction, m: int, y: TreePoint, degree_bound: Optional[int] = None,
                        interpolate_rigid: Optional[bool] = None) -> ExtendedRational:
    check_qsh(phi)
    if phi.sup_value() > 0:
        raise NormalizationError(f"sup phi = {phi.sup_value()} > 0; shift phi first")
    degree_bound = DISC_SETTINGS.degree_bound if degree_bound is None else degree_bound
    interpolate_rigid = DISC_SETTINGS.interpolate_rigid if interpolate_rigid is None else interpolate_rigid
    tree = interpolated_tree(phi.tree) if interpolate_rigid else phi.tree
    scaled = phi.scaled(m).lift(tree)
    y_refined = transfer_point(phi.tree, tree, y)
    rigid = [node for node in tree.nodes if tree.point_type(node) is PointType.T1]
    best = NEG_INF
    for vector in exponent_vectors(len(rigid), degree_bound):
        f = FormalPoly(tree, Fraction(0), dict(zip(rigid, vector)))
        if not h_membership(f, scaled):
            continue
        value = (log_norm_eval(f, y_refined) - plus_norm(f, scaled).log_norm) / m
        best = max(best, value)
    log.verbose_info(f"brute force over {len(rigid)} rigid nodes up to degree {degree_bound}: {best}")
    return best


def subadditivity_check(phi: QshFunction, psi: QshFunction) -> SubadditivityReport:
    require_same_tree(phi.tree, psi.tree)
    check_qsh(phi)
    check_qsh(psi)
    total = phi.added(psi)
    tree = phi.tree
    rows = []
    for node in tree.nodes:
        if tree.point_type(node) is not PointType.T1:
            continue
        rows.append(SubadditivityRow(node,
                                     math.floor(lelong_number(total, node)),
                                     math.floor(lelong_number(phi, node)),
                                     math.floor(lelong_number(psi, node))))
    return SubadditivityReport(all(row.holds for row in rows), rows)
