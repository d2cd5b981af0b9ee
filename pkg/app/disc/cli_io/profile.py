"""Breakpoint tables of piecewise-affine expressions along a root-to-point path."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import pandas
from prettytable import PrettyTable

from disc.disc_model import DiscTree, TreePoint, coords
from disc.divisor import FormalPoly, log_norm_eval
from disc.potential import QshFunction, eval_qsh
from disc.rationals import ExtendedRational, to_fraction
from util.exceptions import InfiniteArithmeticError, PointError, UsageError

EXPRESSIONS = ('phi', 'logf', 'A', 'alpha', 'F')


@dataclass(frozen=True)
class ProfileRow:
    alpha: ExtendedRational
    A: ExtendedRational
    value: ExtendedRational

    def values(self):
        return [str(self.alpha), str(self.A), str(self.value)]


@dataclass
class ProfileTable:
    expression: str
    endpoint: TreePoint
    rows: List[ProfileRow] = field(default_factory=list)

    def head(self):
        return ["alpha", "A", "value"]

    def to_prettytable(self) -> PrettyTable:
        table = PrettyTable(self.head())
        table.add_rows([row.values() for row in self.rows])
        return table

    def to_dataframe(self) -> pandas.DataFrame:
        return pandas.DataFrame([row.values() for row in self.rows], columns=self.head())

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index=False)

    def to_records(self):
        return [dict(zip(self.head(), row.values())) for row in self.rows]


def _path_points(tree: DiscTree, endpoint: TreePoint) -> List[TreePoint]:
    point = tree.locate(endpoint)
    if point.is_node:
        nodes, tail = tree.path_to_root(point.node), []
    else:
        nodes, tail = tree.path_to_root(tree.parent(point.edge)), [point]
    return [TreePoint.at(node) for node in reversed(nodes)] + tail


def emit_profile(tree: DiscTree, expression: str, endpoint: TreePoint, phi: Optional[QshFunction] = None,
                 f: Optional[FormalPoly] = None, eps=Fraction(0)) -> ProfileTable:
    """
    Tabulate an expression at the root, every node on the path and the endpoint.

    :param expression: one of phi, logf, A, alpha or F (log|f| - (1+eps)phi - A).
    :raises PointError: if the endpoint has infinite alpha and the expression is infinite there.
    """
    if expression not in EXPRESSIONS:
        raise UsageError(f"Unknown profile expression [{expression}]; expected one of {EXPRESSIONS}")
    if expression in ('phi', 'F') and phi is None:
        raise UsageError(f"Expression [{expression}] needs --phi")
    if expression in ('logf', 'F') and f is None:
        raise UsageError(f"Expression [{expression}] needs --f")
    eps = to_fraction(eps)

    def evaluate(point, point_coords):
        if expression == 'A':
            return point_coords.A
        if expression == 'alpha':
            return point_coords.alpha
        if expression == 'phi':
            return eval_qsh(phi, point)
        if expression == 'logf':
            return log_norm_eval(f, point)
        return log_norm_eval(f, point) - (1 + eps) * eval_qsh(phi, point) - point_coords.A

    rows = []
    for point in _path_points(tree, endpoint):
        point_coords = coords(tree, point)
        try:
            value = evaluate(point, point_coords)
        except InfiniteArithmeticError:
            value = None
        if value is None or (point_coords.alpha.is_infinite and value.is_infinite):
            raise PointError(f"Expression [{expression}] is not finite at the endpoint {endpoint}")
        rows.append(ProfileRow(point_coords.alpha, point_coords.A, value))
    return ProfileTable(expression, tree.locate(endpoint), rows)
