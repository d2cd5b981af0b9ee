"""
Twisted sup-norms ||f||_{(1+eps)phi}, the limit norm ||f||+_phi and the ideal H_phi.

All norms are returned as log-values. F_eps = log|f| - (1+eps)phi - A is affine
in alpha on every edge and strictly decreasing in every direction leaving the
tree, so its supremum is the maximum over nodes with finite A, unless the tail
of some infinite edge climbs, in which case it is +inf.
"""
import math
from fractions import Fraction
from typing import NamedTuple

from disc.disc_model import PointType, TreePoint
from disc.divisor import FormalPoly, log_norm_eval
from disc.potential import QshFunction, check_qsh, eval_qsh, require_same_tree
from disc.rationals import INF, NEG_INF, ExtendedRational, to_fraction


class PlusNorm(NamedTuple):
    log_norm: ExtendedRational
    shift: Fraction


def _node_terms(f: FormalPoly, phi: QshFunction):
    """(node, log|f| - phi - A, phi) at every node with finite A."""
    log_f = f.as_qsh().node_values
    tree = phi.tree
    for node in tree.nodes:
        if tree.A(node).is_infinite:
            continue
        yield node, log_f[node] - phi.node_values[node] - tree.A(node), phi.node_values[node]


def _tails(f: FormalPoly, phi: QshFunction):
    """(edge, log|f| slope, phi slope, multiplicity) for every infinite edge."""
    log_f = f.as_qsh()
    tree = phi.tree
    for edge in tree.edges:
        if tree.a_length(edge).is_infinite:
            yield edge, log_f.slope(edge), phi.slope(edge), tree.edge_mult(edge)


def sup_norm(f: FormalPoly, phi: QshFunction, eps) -> ExtendedRational:
    require_same_tree(f.tree, phi.tree)
    eps = to_fraction(eps)
    for _, slope_f, slope_phi, mult in _tails(f, phi):
        if slope_f - (1 + eps) * slope_phi - mult > 0:
            return INF
    return max(value - eps * phi_value for _, value, phi_value in _node_terms(f, phi))


def lelong_numbers(phi: QshFunction):
    """c_x = atom(x) / m(x) at every T1 node carrying a positive atom."""
    tree = phi.tree
    numbers = {}
    for node in tree.nodes:
        if tree.point_type(node) is PointType.T1:
            c = Fraction(phi.atom(node), tree.node_mult(node))
            if c > 0:
                numbers[node] = c
    return numbers


def plus_norm(f: FormalPoly, phi: QshFunction) -> PlusNorm:
    require_same_tree(f.tree, phi.tree)
    check_qsh(phi)
    shift = max(Fraction(0), phi.sup_value().fraction)
    phi = phi.shifted(-shift)
    for node, c in lelong_numbers(phi).items():
        if f.exponent(node) < math.floor(c):
            return PlusNorm(INF, shift)
    return PlusNorm(max(value for _, value, _ in _node_terms(f, phi)), shift)


def h_generator(phi: QshFunction) -> FormalPoly:
    check_qsh(phi)
    roots = {node: math.floor(c) for node, c in lelong_numbers(phi).items() if c >= 1}
    return FormalPoly(phi.tree, Fraction(0), roots)


def h_membership(f: FormalPoly, phi: QshFunction) -> bool:
    require_same_tree(f.tree, phi.tree)
    return h_generator(phi).divides(f)


def _tail_bound(slope_f, slope_phi, mult) -> ExtendedRational:
    """Largest eps keeping slope_f - (1+eps)slope_phi - mult <= 0."""
    if slope_phi < 0:
        return ExtendedRational((mult - slope_f) / -slope_phi - 1)
    if slope_f - slope_phi - mult > 0:
        return NEG_INF
    return INF


def integrability_threshold(f: FormalPoly, phi: QshFunction) -> ExtendedRational:
    """Supremum of the eps >= 0 with a finite sup-norm; equals min over poles of (e_x + 1)/c_x - 1."""
    require_same_tree(f.tree, phi.tree)
    check_qsh(phi)
    return min((_tail_bound(*tail[1:]) for tail in _tails(f, phi)), default=INF)


def max_admissible_eps(f: FormalPoly, phi: QshFunction, z: TreePoint) -> ExtendedRational:
    """
    Largest eps >= 0 for which (f, eps) is an extension at z, -inf when none exists.

    phi is normalized first. Each node contributes the linear constraint
    F_0(x) - eps * phi(x) <= log|f(z)| - phi(z) and each infinite edge its tail
    constraint; when phi(z) = -inf only the tails matter.
    """
    require_same_tree(f.tree, phi.tree)
    check_qsh(phi)
    phi = phi.normalized()
    bound = min((_tail_bound(*tail[1:]) for tail in _tails(f, phi)), default=INF)
    phi_z = eval_qsh(phi, z)
    if phi_z.is_finite:
        rhs = log_norm_eval(f, z) - phi_z
        if rhs.is_infinite:
            return NEG_INF
        for _, value, phi_value in _node_terms(f, phi):
            if phi_value == 0:
                if value > rhs:
                    return NEG_INF
            else:
                bound = min(bound, (rhs - value) / -phi_value)
    return bound if bound >= 0 else NEG_INF


def sup_value(phi: QshFunction) -> ExtendedRational:
    return phi.sup_value()
