import json
from fractions import Fraction

import pandas
import pytest
import yaml

from disc.cli_io.commands import COMMANDS, run_command
from disc.cli_io.profile import emit_profile
from disc.cli_io.random_scenes import random_scene
from disc.cli_io.scene_file import dump_scene, load_scene, parse_scene, serialize_scene
from disc.disc_model import PointType, TreePoint, collect_tree_violations, coords
from disc.potential import QshFunction
from disc.rationals import INF
from util.exceptions import PointError, UsageError, ValidationException
from util.project_paths import SCENE_A, SCENE_B, SCENE_C, SCENE_D


def first_line(capsys):
    return capsys.readouterr().out.splitlines()[0]


def test_norm_command(capsys):
    assert run_command(['norm', str(SCENE_A), '--f', 'f1', '--phi', 'p1', '--eps', '1/3']) == 0
    assert first_line(capsys) == "log_norm = 0/1"


def test_extend_command(capsys):
    assert run_command(['extend', str(SCENE_A), '--phi', 'p1', '--z', 'edge:e1:1']) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "f = g_a^1, eps0 = 1/3, verified = true"
    assert "type1" in out and "base" in out


def test_extend_command_json(capsys):
    assert run_command(['extend', str(SCENE_A), '--phi', 'p1', '--z', 'edge:e1:1', '--json']) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['f'] == "g_a^1"
    assert document['eps0'] == "1/3"
    assert document['verified'] is True
    assert [step['Step'] for step in document['trace']] == ['type1', 'base']


def test_verify_command(capsys):
    assert run_command(['verify', str(SCENE_D), '--phi', 'p', '--f', 'one', '--z', 'node:root',
                        '--eps', '1/10']) == 0
    assert first_line(capsys) == "verified = false, lhs = 1/10, rhs = 0/1, max_eps = 0/1"


def test_validate_command(tmp_path, capsys):
    assert run_command(['validate', str(SCENE_C)]) == 0
    assert first_line(capsys) == "valid = true, nodes = 3"

    document = yaml.safe_load(SCENE_A.read_text())
    document['edges'][0]['a_length'] = 2
    broken = tmp_path / 'broken.yml'
    broken.write_text(yaml.safe_dump(document))
    assert run_command(['validate', str(broken)]) == 1
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "valid = false"
    assert "T1 requires infinite edge" in out


def test_exit_codes(tmp_path, capsys):
    assert run_command(['frobnicate', str(SCENE_A)]) == 2
    assert run_command(['norm', str(SCENE_A), '--f', 'f1', '--phi', 'missing']) == 2
    assert run_command(['norm', str(tmp_path / 'absent.yml'), '--f', 'f1', '--phi', 'p1']) == 2
    assert run_command(['eval', str(SCENE_A), '--phi', 'p1', '--f', 'f1']) == 2
    malformed = tmp_path / 'malformed.yml'
    malformed.write_text("nodes: [{id: root, type: T9}]\nedges: []\nroot: root\n")
    assert run_command(['gamma', str(malformed), '--phi', 'p']) == 1
    assert run_command(['eval', str(SCENE_A), '--phi', 'p1', '--at', 'edge:e1:-1']) == 1
    capsys.readouterr()


def test_every_command_is_routed(capsys):
    assert len(COMMANDS) == 17
    scene_a, scene_b, scene_c = str(SCENE_A), str(SCENE_B), str(SCENE_C)
    runs = [
        ['eval', scene_a, '--phi', 'p1'],
        ['eval', scene_c, '--f', 'ga', '--at', 'node:y'],
        ['laplacian', scene_b, '--phi', 'halves'],
        ['laplacian', scene_b, '--f', 'fab'],
        ['gamma', scene_b, '--phi', 'halves', '--n', '1'],
        ['plus-norm', scene_a, '--f', 'one', '--phi', 'half'],
        ['hgen', scene_b, '--phi', 'mixed', '--f', 'gab'],
        ['demailly-bounds', scene_a, '--phi', 'p1', '--m', '2'],
        ['demailly-exact', scene_a, '--phi', 'p1', '--m', '3'],
        ['multiplier', scene_b, '--phi', 'mixed'],
        ['subadd', scene_b, '--phi', 'mixed', '--psi', 'halves'],
        ['regularize', scene_a, '--phi', 'p1', '--n', '1'],
        ['profile', scene_c, '--expr', 'A', '--to', 'node:y'],
        ['bruteforce', scene_a, '--phi', 'p1', '--m', '2', '--degree', '4', '--at', 'edge:e1:1'],
    ]
    for argv in runs:
        assert run_command(argv) == 0, argv
    out = capsys.readouterr().out
    assert "h = g_a^1 * g_b^1, member = true" in out
    assert "pole = a, coefficient = 3/2, exact_coefficient = 4/3" in out
    assert "log_norm = 0/1, shift = 0/1, threshold = 1/1" in out


def test_gamma_command_json(capsys):
    assert run_command(['gamma', str(SCENE_B), '--phi', 'halves', '--json']) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['n'] == "inf"
    assert document['empty'] is False
    assert document['gamma'] == [{'Node': 'root', 'S': '1/1', 'm': '1'}]


def test_generate_command(tmp_path, capsys):
    first, second = tmp_path / 'first.yml', tmp_path / 'second.yml'
    assert run_command(['generate', '--out', str(first), '--seed', '3']) == 0
    assert run_command(['generate', '--out', str(second), '--seed', '3']) == 0
    assert first.read_text() == second.read_text()
    assert run_command(['validate', str(first)]) == 0
    capsys.readouterr()


def test_profiles(scene_a, scene_c):
    table = emit_profile(scene_a.tree, 'phi', TreePoint.on_edge('e1', 2), phi=scene_a.function('p1'))
    assert [(row.alpha, row.A, row.value) for row in table.rows] == [(0, 0, 0), (2, 2, -3)]
    table = emit_profile(scene_c.tree, 'A', TreePoint.at('y'))
    assert [(row.alpha, row.A, row.value) for row in table.rows] == [(0, 0, 0), (2, 4, 4)]
    zero = QshFunction.zero(scene_c.tree)
    table = emit_profile(scene_c.tree, 'phi', TreePoint.on_edge('ea', 3), phi=zero)
    assert [row.value for row in table.rows] == [0, 0, 0]
    assert len(table.rows) == 3


def test_profile_endpoint_at_infinity(scene_a):
    with pytest.raises(PointError):
        emit_profile(scene_a.tree, 'phi', TreePoint.at('a'), phi=scene_a.function('p1'))
    with pytest.raises(UsageError):
        emit_profile(scene_a.tree, 'F', TreePoint.at('root'), phi=scene_a.function('p1'))
    table = emit_profile(scene_a.tree, 'phi', TreePoint.at('a'), phi=QshFunction.zero(scene_a.tree))
    assert table.rows[-1].alpha == INF


def test_profile_twisted_expression(scene_a):
    table = emit_profile(scene_a.tree, 'F', TreePoint.on_edge('e1', 3), phi=scene_a.function('p1'),
                         f=scene_a.poly('f1'), eps=Fraction(1, 3))
    assert [row.value for row in table.rows] == [0, 0]


def test_profile_csv(scene_c, tmp_path):
    path = tmp_path / 'profile.csv'
    emit_profile(scene_c.tree, 'phi', TreePoint.at('y'), phi=scene_c.function('p')).to_csv(path)
    frame = pandas.read_csv(path, dtype=str)
    assert list(frame.columns) == ['alpha', 'A', 'value']
    assert frame.iloc[1].tolist() == ['2/1', '4/1', '-4/1']


def test_scene_survives_a_file_round_trip(scene_c, tmp_path):
    path = dump_scene(scene_c, tmp_path / 'scene.json', 'json')
    restored = load_scene(path)
    assert restored.tree == scene_c.tree
    assert restored.functions['pole'].slopes == scene_c.functions['pole'].slopes
    assert restored.polys['ga'].roots == {'a': 1}
    assert restored.queries == scene_c.queries
    assert serialize_scene(restored) == serialize_scene(scene_c)


def test_scene_fields_are_validated():
    document = yaml.safe_load(SCENE_A.read_text())
    document['functions'][0]['slopes'] = {'e1': -1.5}
    with pytest.raises(ValidationException):
        parse_scene(document)
    document = yaml.safe_load(SCENE_A.read_text())
    document['polys'][0]['roots'] = {'root': 1}
    with pytest.raises(ValidationException):
        parse_scene(document)


def test_scene_lookup_errors(scene_a):
    with pytest.raises(UsageError):
        scene_a.function('nope')
    with pytest.raises(UsageError):
        scene_a.poly('nope')


def test_random_scenes_are_reproducible_and_valid():
    first, second = random_scene(11), random_scene(11)
    assert serialize_scene(first.scene) == serialize_scene(second.scene)
    for seed in range(100):
        generated = random_scene(seed, max_nodes=8)
        tree = generated.scene.tree
        assert len(tree) <= 8
        assert collect_tree_violations(tree.to_description()) == []
        if any(tree.point_type(node) is PointType.T4 for node in tree.nodes):
            assert tree.all_multiplicities_one()
        assert all(coords(tree, q).A.is_finite for q in generated.query_points)
