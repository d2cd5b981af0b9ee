from fractions import Fraction

import pytest

from disc.disc_model import Subtree, TreePoint, insert_point, transfer_point
from disc.potential import (QshFunction, below_mass, check_qsh, eval_qsh, gamma_tree, laplacian, mass,
                            regularization_subtree, regularize_seq, retract_pullback, validate_qsh)
from disc.rationals import NEG_INF
from util.exceptions import MismatchedTreesError, QshValidationError, UnknownPointError


def test_eval_is_affine_in_alpha(scene_a, scene_c):
    phi = scene_a.function('p1')
    assert eval_qsh(phi, TreePoint.on_edge('e1', 1)) == Fraction(-3, 2)
    assert eval_qsh(phi, TreePoint.on_edge('e1', Fraction(1, 3))) == Fraction(-1, 2)
    assert eval_qsh(phi, TreePoint.at('a')) == NEG_INF
    p = scene_c.function('p')
    assert eval_qsh(p, TreePoint.at('y')) == -4
    assert eval_qsh(p, TreePoint.on_edge('ea', 5)) == -4


def test_laplacian_atoms(scene_a, scene_b):
    assert laplacian(scene_a.function('log_ga')).atoms == {'root': -1, 'a': 1}
    assert laplacian(scene_b.function('halves')).atoms == {'a': Fraction(1, 2), 'b': Fraction(1, 2), 'root': -1}


def test_mass(scene_a, scene_b):
    assert mass(scene_a.function('p1')) == Fraction(3, 2)
    assert mass(scene_b.function('mixed')) == Fraction(11, 4)
    assert mass(QshFunction.zero(scene_a.tree)) == 0


def test_convexity_violation_is_reported(scene_a):
    tree, cut = insert_point(scene_a.tree, TreePoint.on_edge('e1', 1))
    phi = QshFunction(tree, 0, {cut: -1, 'a': -2})
    report = validate_qsh(phi)
    assert not report.valid
    assert len(report.violations) == 1
    assert f"[{cut}]" in report.violations[0]
    with pytest.raises(QshValidationError):
        check_qsh(phi)


def test_from_atoms_matches_slopes(scene_a, scene_b):
    assert QshFunction.from_atoms(scene_a.tree, {'a': Fraction(3, 2)}).slopes == scene_a.function('p1').slopes
    mixed = QshFunction.from_atoms(scene_b.tree, {'a': Fraction(3, 2), 'b': Fraction(5, 4)})
    assert mixed.slopes == scene_b.function('mixed').slopes
    assert below_mass(mixed) == {'root': Fraction(11, 4), 'a': Fraction(3, 2), 'b': Fraction(5, 4)}


def test_slopes_must_sit_on_edges(scene_a, scene_b):
    with pytest.raises(UnknownPointError):
        QshFunction(scene_a.tree, 0, {'root': -1})
    with pytest.raises(MismatchedTreesError):
        scene_a.function('p1').added(scene_b.function('halves'))


def test_arithmetic_helpers(scene_a):
    phi = scene_a.function('p1')
    assert phi.scaled(2).slopes == scene_a.function('two_log_ga').scaled(Fraction(3, 2)).slopes
    assert phi.shifted(-2).sup_value() == -2
    assert phi.shifted(-2).normalized().root_value == 0
    assert scene_a.function('half').added(scene_a.function('log_ga')).slopes == phi.slopes


def test_lift_to_refinement(scene_a):
    phi = scene_a.function('p1')
    tree, cut = insert_point(scene_a.tree, TreePoint.on_edge('e1', 2))
    lifted = phi.lift(tree)
    assert lifted.slopes == {cut: Fraction(-3, 2), 'a': Fraction(-3, 2)}
    assert lifted.node_values[cut] == -3


def test_retract_pullback_clamps(scene_a):
    phi = scene_a.function('p1')
    clamped = retract_pullback(phi, Subtree(frozenset(['root']), {'a': Fraction(1)}))
    assert clamped.tree.A('a.s') == 1
    assert eval_qsh(clamped, TreePoint.at('a')) == Fraction(-3, 2)
    assert eval_qsh(clamped, TreePoint.on_edge('a', 5)) == Fraction(-3, 2)
    assert eval_qsh(clamped, TreePoint.on_edge('a.s', Fraction(1, 2))) == Fraction(-3, 4)


def test_gamma_tree(scene_a, scene_b):
    assert gamma_tree(scene_a.function('p1')).nodes == frozenset(['root', 'a'])
    halves = scene_b.function('halves')
    assert gamma_tree(halves).nodes == frozenset(['root'])
    for n in (2, 3, 10):
        assert gamma_tree(halves, n).nodes == frozenset(['root'])
    assert gamma_tree(halves, 1).nodes == frozenset(['root', 'a', 'b'])
    assert gamma_tree(scene_a.function('half')).is_empty


def test_regularization(scene_a):
    phi = scene_a.function('p1')
    subtree = regularization_subtree(phi, 1)
    assert subtree.nodes == frozenset(['root'])
    assert subtree.partial == {'a': Fraction(2)}
    regular = regularize_seq(phi, 1)
    assert eval_qsh(regular, TreePoint.at('a')) == -3
    assert min(regular.node_values.values()) == -3


def test_regularization_decreases_to_phi(random_scenes):
    for generated in random_scenes(30):
        phi = generated.scene.functions['phi']
        previous = None
        for n in range(1, 9):
            regular = regularize_seq(phi, n)
            values = [eval_qsh(regular, transfer_point(phi.tree, regular.tree, q)) for q in generated.query_points]
            for value, q in zip(values, generated.query_points):
                assert value >= eval_qsh(phi, q)
            if previous is not None:
                assert all(value <= before for value, before in zip(values, previous))
            previous = values
        assert previous == [eval_qsh(phi, q) for q in generated.query_points]


def test_laplacian_total_is_zero(random_scenes):
    for generated in random_scenes(100):
        for phi in generated.scene.functions.values():
            assert validate_qsh(phi).valid
            assert laplacian(phi).total() == 0
