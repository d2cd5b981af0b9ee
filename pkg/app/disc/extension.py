"""
Constructive extension certificates.

Given a quasisubharmonic phi and a point z, ``extend`` builds a formal
polynomial f and eps0 > 0 such that ||f||_{(1+eps)phi} <= |f(z)| e^{-phi(z)}
for every eps in [0, eps0]. The construction is a strong induction on the
floor of mass(rho0): every type-1 or type-4 step strips at least one unit of
mass, type-2/3 steps trade an interior end for a rigid one, and the chain ends
in the small-mass base case or the segment case.

Every step works on the prepared data of ``prepare``: phi normalized, z made a
node, n chosen so that Gamma_{phi,n} = Gamma_phi, and phi retracted onto the
hull of Gamma_{phi,n} and z. The public ``step_*`` functions return
certificates for that retracted function; ``extend`` additionally caps eps0 by
1/n, which makes the certificate valid for phi itself.
"""
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import NamedTuple, Optional, Tuple

from disc.disc_model import (INTERIOR_TYPES, DiscTree, PointType, Subtree, TreePoint, descend_multiplicity, hull,
                             insert_point, pin_point, point_on_root_path, retraction, transfer_point)
from disc.divisor import FormalPoly, log_norm_eval, poly_multiply, with_value_at
from disc.norms import sup_norm
from disc.potential import (QshFunction, below_mass, check_qsh, eval_qsh, gamma_ends, gamma_tree, mass,
                            retract_pullback)
from disc.rationals import INF, ExtendedRational
from util.common_util import init_logger
from util.conf import DISC_SETTINGS
from util.exceptions import ExtensionDefect, ExtensionPreconditionError

log = init_logger(__name__)

STEP_KINDS = ('base', 'type1', 'type23', 'type4', 'segment')


@dataclass(frozen=True)
class TraceStep:
    kind: str
    node: Optional[str]
    eps0: Fraction
    n: Optional[int] = None
    gamma: Optional[int] = None
    c: Optional[Fraction] = None

    def head(self):
        return ["Step", "Node", "eps0", "n", "gamma", "c"]

    def values(self):
        return [self.kind, self.node or '', str(ExtendedRational(self.eps0)),
                '' if self.n is None else self.n,
                '' if self.gamma is None else self.gamma,
                '' if self.c is None else str(ExtendedRational(self.c))]


@dataclass(frozen=True)
class Certificate:
    f: FormalPoly
    eps0: Fraction
    trace: Tuple[TraceStep, ...] = ()

    @property
    def depth(self):
        return len(self.trace)


class Prepared(NamedTuple):
    phi: QshFunction
    z: str
    n: int
    gamma: Subtree
    hull: Subtree

    @property
    def tree(self) -> DiscTree:
        return self.phi.tree

    @property
    def z_point(self) -> TreePoint:
        return TreePoint.at(self.z)


class ExtensionRun:
    """Bookkeeping for one ``extend`` call: counts reduction steps against the termination budget."""

    def __init__(self, budget: int):
        self.budget = budget
        self.steps = 0

    def record(self, kind, node, **details):
        self.steps += 1
        if self.steps > self.budget:
            raise ExtensionDefect(f"Reduction did not terminate within {self.budget} steps")
        log.verbose_info(f"step {self.steps}: {kind} at [{node}] "
                         + ", ".join(f"{key} = {value}" for key, value in details.items()))


def choose_n(phi: QshFunction) -> int:
    """Smallest n >= 1 with Gamma_{phi,n} = Gamma_phi: every node with 0 < S < m must fail n/(n+1) m."""
    tree = phi.tree
    n = 1
    for node, below in below_mass(phi).items():
        mult = tree.node_mult(node)
        if 0 < below < mult:
            n = max(n, math.floor(below / (mult - below)) + 1)
    return n


def prepare(phi: QshFunction, z: TreePoint, n: Optional[int] = None) -> Prepared:
    check_qsh(phi)
    phi = phi.normalized()
    tree, z_node = pin_point(phi.tree, z)
    phi = phi.lift(tree)
    if n is None:
        n = choose_n(phi)
    gamma = gamma_tree(phi, n)
    gamma_hull = hull(tree, [TreePoint.at(z_node)], base=gamma)
    return Prepared(retract_pullback(phi, gamma_hull), z_node, n, gamma, gamma_hull)


def _base(run: ExtensionRun, phi: QshFunction, z: TreePoint, eps_cap=None) -> Certificate:
    check_qsh(phi)
    total = mass(phi)
    if total >= 1:
        raise ExtensionPreconditionError(f"Base case needs mass < 1, got {ExtendedRational(total)}")
    eps_cap = DISC_SETTINGS.eps_cap if eps_cap is None else eps_cap
    eps0 = eps_cap if total == 0 else min(eps_cap, (1 - total) / total)
    run.record('base', None, eps0=eps0, mass=total)
    return Certificate(FormalPoly.one(phi.tree), eps0, (TraceStep('base', None, eps0),))


def _reduce(run: ExtensionRun, phi: QshFunction, z: TreePoint) -> Certificate:
    phi = phi.normalized()
    if mass(phi) < 1:
        return _base(run, phi, z)
    prep = prepare(phi, z)
    certificate = _dispatch(run, prep)
    return replace(certificate, eps0=min(certificate.eps0, Fraction(1, prep.n)))


def _dispatch(run: ExtensionRun, prep: Prepared) -> Certificate:
    tree = prep.tree
    ends = gamma_ends(tree, prep.gamma)
    z_image = retraction(tree, prep.gamma, prep.z_point)
    for x in ends:
        if tree.point_type(x) is PointType.T1:
            return _type1(run, prep, x)
    for x in ends:
        if tree.point_type(x) in INTERIOR_TYPES and z_image != TreePoint.at(x):
            return _type23(run, prep, x)
    for x in ends:
        if tree.point_type(x) is PointType.T4 and x != prep.z:
            return _type4(run, prep, x)
    return _segment(run, prep)


def _child_toward(tree: DiscTree, top, node) -> str:
    """The child of ``top`` on the path down to ``node``."""
    path = tree.path_to_root(node)
    return path[path.index(top) - 1]


def _raise_path_slopes(phi: QshFunction, x, amount) -> QshFunction:
    """Add ``amount`` to every slope on the root path of x: phi + amount/m(x) * (-log|g_x|) for rigid x."""
    slopes = dict(phi.slopes)
    for edge in phi.tree.path_to_root(x)[:-1]:
        slopes[edge] = phi.slope(edge) + amount
    return phi.with_slopes(slopes)


def _lelong(prep: Prepared, x) -> Fraction:
    return Fraction(prep.phi.atom(x), prep.tree.node_mult(x))


def _type1(run: ExtensionRun, prep: Prepared, x) -> Certificate:
    tree, phi, n = prep.tree, prep.phi, prep.n
    if tree.point_type(x) is not PointType.T1:
        raise ExtensionPreconditionError(f"Node [{x}] is not a type-1 end")
    c = _lelong(prep, x)
    if c < 1:
        raise ExtensionPreconditionError(f"Node [{x}] has Lelong number {ExtendedRational(c)} < 1")
    gamma = math.floor(c)
    mult = tree.node_mult(x)
    reduced = _raise_path_slopes(phi, x, gamma * mult)
    sub = _reduce(run, reduced, prep.z_point)
    eps1 = sub.eps0
    f = poly_multiply(FormalPoly.generator(sub.f.tree, x, gamma), sub.f)

    if c != gamma:
        eps0 = eps1 * (c - gamma) / c
    else:
        bounds = [eps1 * n / (gamma * mult * (n + 1) + n)]
        reduced_gamma = gamma_tree(reduced, n)
        path = tree.path_to_root(x)
        top_index = next(index for index, node in enumerate(path)
                         if index > 0 and (node in reduced_gamma.nodes or node == tree.root))
        v_x = path[top_index - 1]
        bounds.append(Fraction(tree.edge_mult(v_x), (gamma * (n + 1) + n) * mult))
        z_image = retraction(tree, prep.gamma, prep.z_point)
        if z_image.node != prep.z:
            v_z = _child_toward(tree, z_image.node, prep.z)
            bounds.append(Fraction(tree.edge_mult(v_z), n * tree.node_mult(z_image.node)))
        eps0 = min(bounds)

    run.record('type1', x, eps0=eps0, c=c, gamma=gamma)
    return Certificate(f, eps0, (TraceStep('type1', x, eps0, n, gamma, c),) + sub.trace)


def _type23(run: ExtensionRun, prep: Prepared, x) -> Certificate:
    tree, phi = prep.tree, prep.phi
    if tree.point_type(x) not in INTERIOR_TYPES:
        raise ExtensionPreconditionError(f"Node [{x}] has type {tree.point_type(x)}, expected T2 or T3")
    if x not in prep.gamma.nodes or any(child in prep.gamma.nodes for child in tree.children(x)):
        raise ExtensionPreconditionError(f"Node [{x}] is not an end of Gamma")
    if retraction(tree, prep.gamma, prep.z_point) == TreePoint.at(x):
        raise ExtensionPreconditionError(f"z retracts to the end [{x}]")
    c = _lelong(prep, x)
    if c < 1:
        raise ExtensionPreconditionError(f"Node [{x}] has atom ratio {ExtendedRational(c)} < 1")
    descended, rigid = descend_multiplicity(tree, x)
    slopes = dict(phi.slopes)
    slopes[rigid] = -c * tree.node_mult(x)
    extended = QshFunction(descended, phi.root_value, slopes)
    run.record('type23', x, rigid=rigid, c=c)
    sub = _reduce(run, extended, prep.z_point)
    return Certificate(sub.f, sub.eps0, (TraceStep('type23', x, sub.eps0, prep.n, None, c),) + sub.trace)


def _type4(run: ExtensionRun, prep: Prepared, x) -> Certificate:
    tree, phi, n = prep.tree, prep.phi, prep.n
    if tree.point_type(x) is not PointType.T4:
        raise ExtensionPreconditionError(f"Node [{x}] has type {tree.point_type(x)}, expected T4")
    if x == prep.z:
        raise ExtensionPreconditionError(f"The type-4 end [{x}] is z itself")
    if tree.node_mult(x) != 1:
        raise ExtensionPreconditionError(f"Type-4 end [{x}] has multiplicity {tree.node_mult(x)}, "
                                         "its root path must have multiplicity 1")

    path = tree.path_to_root(x)
    top_index = next(index for index, node in enumerate(path)
                     if index > 0 and (node == tree.root or node == prep.z
                                       or any(child in prep.hull.nodes and child != path[index - 1]
                                              for child in tree.children(node))))
    top = path[top_index]
    segment = path[:top_index]
    c = -phi.slope(segment[-1])
    if c < 1:
        raise ExtensionPreconditionError(f"Slope toward [{x}] is {ExtendedRational(-c)}, need at most -1")
    gamma = math.floor(c)

    slopes = dict(phi.slopes)
    for edge in segment:
        slopes[edge] = -c
    linear = phi.with_slopes(slopes)
    reduced = _raise_path_slopes(linear, x, gamma)
    sub = _reduce(run, reduced, prep.z_point)
    eps1 = sub.eps0

    alpha_x = tree.alpha(x).fraction
    linear_x = linear.node_values[x].fraction
    reduced_x = reduced.node_values[x].fraction
    eta_bounds = [alpha_x - tree.alpha(top).fraction, alpha_x / c, -eps1 * linear_x / c]
    if reduced_x < 0:
        eta_bounds.append(-eps1 * reduced_x / c)
    eta = min(eta_bounds) / 2

    sub_tree = sub.f.tree
    u_point = point_on_root_path(sub_tree, x, alpha_x - eta / 2)
    if u_point.is_node:
        refined, u = sub_tree, u_point.node
    else:
        refined, u = insert_point(sub_tree, u_point, PointType.T2)
    refined, u_rigid = descend_multiplicity(refined, u)
    f = poly_multiply(sub.f.lift(refined), FormalPoly.generator(refined, u_rigid, gamma))

    bounds = [eps1 * n / (gamma * (n + 1) + n), Fraction(1, (n + 1) * gamma + n)]
    if reduced_x == 0:
        bounds.append((alpha_x - gamma * eta) / (gamma * alpha_x))
    else:
        bounds.append((-eps1 * reduced_x - gamma * eta) / (-reduced_x + gamma * alpha_x))
    bounds.append((-eps1 * linear_x - gamma * eta) / (-linear_x + gamma * alpha_x))
    eps0 = min(bounds)

    run.record('type4', x, top=top, eta=eta, rigid=u_rigid, eps0=eps0, c=c, gamma=gamma)
    return Certificate(f, eps0, (TraceStep('type4', x, eps0, n, gamma, c),) + sub.trace)


def _segment(run: ExtensionRun, prep: Prepared) -> Certificate:
    tree, phi = prep.tree, prep.phi
    z_path = set(tree.path_to_root(prep.z))
    for node in prep.gamma.nodes:
        if node not in z_path:
            raise ExtensionPreconditionError(f"Gamma node [{node}] is off the segment from z to the root")
        if tree.point_type(node) is PointType.T1:
            raise ExtensionPreconditionError(f"Gamma contains the rigid end [{node}]")
    if prep.z == tree.root:
        eps0 = Fraction(1)
    else:
        first = _child_toward(tree, tree.root, prep.z)
        slope = phi.slope(first)
        eps0 = Fraction(1) if slope == 0 else Fraction(tree.edge_mult(first)) / -slope
        pole_slope = phi.slope(prep.z)
        if tree.A(prep.z).is_infinite and pole_slope < 0:
            eps0 = min(eps0, (tree.edge_mult(prep.z) + pole_slope) / -pole_slope)
    run.record('segment', prep.z, eps0=eps0)
    return Certificate(FormalPoly.one(tree), eps0, (TraceStep('segment', prep.z, eps0, prep.n),))


def _run_for(phi: QshFunction, z: TreePoint) -> ExtensionRun:
    tree, _ = pin_point(phi.tree, z)
    return ExtensionRun(math.floor(mass(phi)) + len(tree))


def step_base(phi: QshFunction, z: TreePoint, eps_cap=None) -> Certificate:
    check_qsh(phi)
    return _base(ExtensionRun(1), phi.normalized(), z, eps_cap)


def step_type1(phi: QshFunction, z: TreePoint, x, n: Optional[int] = None) -> Certificate:
    prep = prepare(phi, z, n)
    if x not in prep.gamma.nodes:
        raise ExtensionPreconditionError(f"Node [{x}] is not in Gamma")
    return _type1(_run_for(phi, z), prep, x)


def step_type23(phi: QshFunction, z: TreePoint, x, n: Optional[int] = None) -> Certificate:
    return _type23(_run_for(phi, z), prepare(phi, z, n), x)


def step_type4(phi: QshFunction, z: TreePoint, x, n: Optional[int] = None) -> Certificate:
    prep = prepare(phi, z, n)
    if x not in prep.gamma.nodes or any(child in prep.gamma.nodes for child in prep.tree.children(x)):
        raise ExtensionPreconditionError(f"Node [{x}] is not an end of Gamma")
    return _type4(_run_for(phi, z), prep, x)


def step_segment(phi: QshFunction, z: TreePoint, n: Optional[int] = None) -> Certificate:
    return _segment(ExtensionRun(1), prepare(phi, z, n))


def extend(phi: QshFunction, z: TreePoint, target_log=None) -> Certificate:
    """
    Build a verified extension certificate for phi at z.

    :param phi: valid quasisubharmonic function; it is normalized to phi(root) = 0.
    :param z: point of ``phi.tree``.
    :param target_log: optional prescribed value of log|f(z)|.
    :return: Certificate whose polynomial lives on a refinement of ``phi.tree``.
    """
    check_qsh(phi)
    run = _run_for(phi, z)
    certificate = _reduce(run, phi.normalized(), z)
    if target_log is not None:
        z_refined = transfer_point(phi.tree, certificate.f.tree, z)
        certificate = replace(certificate, f=with_value_at(certificate.f, z_refined, target_log))
    if not verify_certificate(phi, z, certificate):
        lhs, rhs = certificate_slack(phi, z, certificate)
        raise ExtensionDefect(f"Certificate f = {certificate.f.describe()}, eps0 = {certificate.eps0} "
                              f"fails verification: {lhs} > {rhs}")
    log.verbose_info(f"extend at {z}: f = {certificate.f.describe()}, eps0 = {ExtendedRational(certificate.eps0)}, "
                     f"{run.steps} steps")
    return certificate


def certificate_slack(phi: QshFunction, z: TreePoint, certificate: Certificate):
    """Both sides of the extension inequality: the twisted sup-norm and log|f(z)| - phi(z)."""
    check_qsh(phi)
    f = certificate.f
    lifted = phi.normalized().lift(f.tree)
    z_refined = transfer_point(phi.tree, f.tree, z)
    lhs = sup_norm(f, lifted, certificate.eps0)
    phi_z = eval_qsh(lifted, z_refined)
    if phi_z.is_infinite:
        return lhs, INF
    return lhs, log_norm_eval(f, z_refined) - phi_z


def verify_certificate(phi: QshFunction, z: TreePoint, certificate: Certificate) -> bool:
    """
    Exact check of a certificate at eps0; phi <= 0 after normalization, so eps0 covers all of [0, eps0].

    When phi(z) = -inf the inequality reduces to finiteness of the sup-norm.
    """
    if certificate.eps0 <= 0:
        return False
    lhs, rhs = certificate_slack(phi, z, certificate)
    if rhs == INF:
        return lhs < INF
    return lhs <= rhs
