"""Scene documents: a disc tree plus named functions, named polynomials and query points."""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List

import yaml

from disc.disc_model import DiscTree, TreePoint, build_tree
from disc.divisor import FormalPoly
from disc.potential import QshFunction
from disc.rationals import format_rational, to_fraction
from disc.validation_funcs import (is_exact_rational, is_list, is_mapping, is_not_blank, is_positive_integer,
                                   validate_value)
from util.conf import DISC_SETTINGS, SCENE_FORMATS
from util.exceptions import DiscError, UsageError, ValidationException


@dataclass
class Scene:
    tree: DiscTree
    functions: Dict[str, QshFunction] = field(default_factory=dict)
    polys: Dict[str, FormalPoly] = field(default_factory=dict)
    queries: List[TreePoint] = field(default_factory=list)

    def function(self, name) -> QshFunction:
        if name not in self.functions:
            raise UsageError(f"Function [{name}] is not defined in the scene; known: {sorted(self.functions)}")
        return self.functions[name]

    def poly(self, name) -> FormalPoly:
        if name not in self.polys:
            raise UsageError(f"Polynomial [{name}] is not defined in the scene; known: {sorted(self.polys)}")
        return self.polys[name]


def _parse_function(tree: DiscTree, index, record) -> QshFunction:
    prefix = f'functions[{index}]'
    validate_value(prefix, record, [is_mapping])
    validate_value(f'{prefix}.name', record.get('name'), [is_not_blank])
    validate_value(f'{prefix}.root_value', record.get('root_value', 0), [is_exact_rational])
    slopes = record.get('slopes') or {}
    validate_value(f'{prefix}.slopes', slopes, [is_mapping])
    parsed = {}
    for edge, slope in slopes.items():
        validate_value(f'{prefix}.slopes.{edge}', slope, [is_exact_rational])
        try:
            parsed[tree.edge_child(str(edge))] = to_fraction(slope)
        except DiscError as e:
            raise ValidationException(f"Field: [{prefix}.slopes]. Validation message: {e}")
    return QshFunction(tree, to_fraction(record.get('root_value', 0)), parsed)


def _parse_poly(tree: DiscTree, index, record) -> FormalPoly:
    prefix = f'polys[{index}]'
    validate_value(prefix, record, [is_mapping])
    validate_value(f'{prefix}.name', record.get('name'), [is_not_blank])
    validate_value(f'{prefix}.const_log', record.get('const_log', 0), [is_exact_rational])
    roots = record.get('roots') or {}
    validate_value(f'{prefix}.roots', roots, [is_mapping])
    for node, exponent in roots.items():
        validate_value(f'{prefix}.roots.{node}', exponent, [is_positive_integer])
    try:
        return FormalPoly(tree, to_fraction(record.get('const_log', 0)),
                          {str(node): exponent for node, exponent in roots.items()})
    except DiscError as e:
        raise ValidationException(f"Field: [{prefix}.roots]. Validation message: {e}")


def parse_scene(document: dict) -> Scene:
    """Build a Scene from a parsed yml/JSON document; tree violations raise TreeValidationError."""
    validate_value('scene', document, [is_mapping])
    tree = build_tree(document)
    functions, polys = {}, {}
    for index, record in enumerate(document.get('functions') or []):
        phi = _parse_function(tree, index, record)
        functions[str(record['name'])] = phi
    for index, record in enumerate(document.get('polys') or []):
        f = _parse_poly(tree, index, record)
        polys[str(record['name'])] = f
    queries = document.get('queries') or []
    validate_value('queries', queries, [is_list])
    return Scene(tree, functions, polys, [tree.locate(TreePoint.parse(query)) for query in queries])


def serialize_scene(scene: Scene) -> dict:
    tree = scene.tree
    document = tree.to_description()
    document['functions'] = [
        {'name': name,
         'root_value': format_rational(phi.root_value),
         'slopes': {tree.edge_label(edge): format_rational(slope) for edge, slope in phi.slopes.items()}}
        for name, phi in scene.functions.items()]
    document['polys'] = [
        {'name': name, 'const_log': format_rational(f.const_log), 'roots': dict(f.roots)}
        for name, f in scene.polys.items()]
    document['queries'] = [str(query) for query in scene.queries]
    return document


def load_scene(path) -> Scene:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"Scene file {path} does not exist")
    with path.open(mode='r') as file:
        try:
            document = yaml.safe_load(file)
        except yaml.YAMLError as e:
            raise ValidationException(f"Scene file {path} is not valid yml/JSON: {e}")
    return parse_scene(document)


def dump_scene(scene: Scene, path, scene_format=None) -> Path:
    scene_format = scene_format or DISC_SETTINGS.scene_format
    if scene_format not in SCENE_FORMATS:
        raise UsageError(f"Scene format must be one of {SCENE_FORMATS}, got {scene_format}")
    path = Path(path)
    document = serialize_scene(scene)
    with path.open(mode='w') as file:
        if scene_format == 'json':
            json.dump(document, file, indent=2)
        else:
            yaml.safe_dump(document, file, sort_keys=False)
    return path
