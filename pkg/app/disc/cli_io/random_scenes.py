"""Seeded generator of valid scenes for the acceptance suites and the ``generate`` command."""
import random
from fractions import Fraction
from typing import List, NamedTuple, Optional

import networkx as nx

from disc.cli_io.scene_file import Scene
from disc.disc_model import DiscTree, PointType, TreePoint
from disc.divisor import FormalPoly
from disc.potential import QshFunction
from disc.rationals import INF, ExtendedRational
from util.conf import DISC_SETTINGS

ROOT = 'r'


class RandomScene(NamedTuple):
    scene: Scene
    z_points: List[TreePoint]
    query_points: List[TreePoint]


def _random_tree(rng: random.Random, size: int, allow_multiplicity: bool) -> DiscTree:
    with_multiplicity = allow_multiplicity and rng.random() < 0.5
    graph = nx.DiGraph()
    graph.add_node(ROOT, point_type=PointType.T2, mult=1)
    open_nodes = [ROOT]
    for index in range(1, size):
        parent = rng.choice(open_nodes)
        parent_mult = graph.nodes[parent]['mult']
        roll = rng.random()
        if roll < 0.35:
            point_type = PointType.T1
        elif roll < 0.5 and not with_multiplicity:
            point_type = PointType.T4
        else:
            point_type = rng.choice([PointType.T2, PointType.T2, PointType.T3])
        mult = parent_mult * (rng.choice([1, 1, 2]) if with_multiplicity and parent_mult < 4 else 1)
        if point_type is PointType.T1:
            length = INF
        else:
            length = ExtendedRational(Fraction(rng.randint(1, 8), rng.randint(1, 4)))
        node = f'n{index}'
        graph.add_node(node, point_type=point_type, mult=mult)
        graph.add_edge(parent, node, a_length=length, mult=mult)
        if point_type not in (PointType.T1, PointType.T4):
            open_nodes.append(node)
    return DiscTree(graph, ROOT)


def _random_function(rng: random.Random, tree: DiscTree) -> QshFunction:
    atoms = {}
    for node in tree.edges:
        if rng.random() < 0.45:
            continue
        atoms[node] = Fraction(rng.randint(1, 8), rng.choice([1, 2, 3, 4])) * tree.node_mult(node)
    return QshFunction.from_atoms(tree, atoms, Fraction(-rng.randint(0, 2)))


def _random_point(rng: random.Random, tree: DiscTree, finite: bool) -> TreePoint:
    candidates = [node for node in tree.nodes if not finite or tree.A(node).is_finite]
    if rng.random() < 0.5 or len(tree) == 1:
        return TreePoint.at(rng.choice(candidates))
    edge = rng.choice(list(tree.edges))
    length = tree.a_length(edge)
    if length.is_infinite:
        return TreePoint.on_edge(edge, Fraction(rng.randint(1, 12), rng.randint(1, 3)))
    return TreePoint.on_edge(edge, length.fraction * Fraction(rng.randint(1, 5), 6))


def random_scene(seed: Optional[int] = None, max_nodes: Optional[int] = None, allow_multiplicity: bool = True,
                 points: int = 5) -> RandomScene:
    """
    Build a reproducible random scene: a tree of up to ``max_nodes`` nodes, functions phi and psi from
    nonnegative atoms, a polynomial f, extension points (any node, poles included) and finite query points.
    """
    seed = DISC_SETTINGS.random_seed if seed is None else seed
    max_nodes = DISC_SETTINGS.random_max_nodes if max_nodes is None else max_nodes
    rng = random.Random(seed)
    tree = _random_tree(rng, rng.randint(2, max(2, max_nodes)), allow_multiplicity)
    rigid = [node for node in tree.nodes if tree.point_type(node) is PointType.T1]
    roots = {node: rng.randint(1, 3) for node in rigid if rng.random() < 0.5}
    z_points = [_random_point(rng, tree, finite=False) for _ in range(points)]
    query_points = [_random_point(rng, tree, finite=True) for _ in range(points)]
    scene = Scene(tree,
                  functions={'phi': _random_function(rng, tree), 'psi': _random_function(rng, tree)},
                  polys={'f': FormalPoly(tree, Fraction(0), roots)},
                  queries=z_points + query_points)
    return RandomScene(scene, z_points, query_points)
