import math
from fractions import Fraction

import pytest

from disc.demailly import (demailly_bounds, demailly_bruteforce, demailly_exact_single_pole, exponent_vectors,
                           interpolated_tree, lelong_number, multiplier_exponents, single_pole,
                           subadditivity_check)
from disc.disc_model import PointType, TreePoint, coords
from disc.potential import eval_qsh
from util.exceptions import NormalizationError, PointError, ShapeError

SINGLE_POLE_SLOPES = {1: Fraction(1), 2: Fraction(3, 2), 3: Fraction(4, 3), 4: Fraction(3, 2), 5: Fraction(7, 5),
                      6: Fraction(3, 2), 7: Fraction(10, 7), 8: Fraction(3, 2)}


def test_lelong_number(scene_a, scene_c):
    assert lelong_number(scene_a.function('p1'), 'a') == Fraction(3, 2)
    assert lelong_number(scene_c.function('pole'), 'a') == 1
    with pytest.raises(PointError):
        lelong_number(scene_c.function('pole'), 'y')


def test_multiplier_exponents(scene_a, scene_b):
    assert multiplier_exponents(scene_b.function('mixed')).exponents() == {'a': 1, 'b': 1}
    data = multiplier_exponents(scene_a.function('p1'))
    assert data['a'] == (Fraction(3, 2), 1)
    assert data['root'] == (0, 0)
    assert multiplier_exponents(scene_b.function('halves')).exponents() == {}


@pytest.mark.parametrize("m", sorted(SINGLE_POLE_SLOPES))
def test_exact_single_pole(scene_a, m):
    exact = demailly_exact_single_pole(scene_a.function('p1'), m)
    assert single_pole(exact) == ('a', SINGLE_POLE_SLOPES[m])


@pytest.mark.parametrize("m", sorted(SINGLE_POLE_SLOPES))
def test_bruteforce_matches_single_pole_formula(scene_a, m):
    phi = scene_a.function('p1')
    exact = demailly_exact_single_pole(phi, m)
    for y in scene_a.queries:
        assert demailly_bruteforce(phi, m, y, degree_bound=math.floor(Fraction(3 * m, 2)) + 1) == eval_qsh(exact, y)


def test_single_pole_shape(scene_a, scene_b):
    with pytest.raises(ShapeError):
        single_pole(scene_b.function('halves'))
    with pytest.raises(ShapeError):
        single_pole(scene_a.function('p1').shifted(-1))
    with pytest.raises(ShapeError):
        single_pole(scene_a.function('p1').scaled(0))


@pytest.mark.parametrize("t", [Fraction(1, 2), Fraction(1), Fraction(5, 2)])
def test_bounds_are_tight_for_even_orders(scene_a, t):
    phi = scene_a.function('p1')
    bound = demailly_bounds(phi, 2, TreePoint.on_edge('e1', t))
    assert bound.lower == Fraction(-3, 2) * t
    assert bound.upper == Fraction(-3, 2) * t + t / 2
    assert bound.lower == eval_qsh(phi, TreePoint.on_edge('e1', t))


def test_bounds_need_nonpositive_functions(scene_a):
    with pytest.raises(NormalizationError):
        demailly_bounds(scene_a.function('p1').shifted(1), 1, TreePoint.at('root'))


def test_bounds_sandwich_on_random_scenes(random_scenes):
    for generated in random_scenes(50):
        phi = generated.scene.functions['phi']
        for m in (1, 2, 3):
            for y in generated.query_points:
                bound = demailly_bounds(phi, m, y)
                value = eval_qsh(phi, y)
                assert value <= bound.lower <= bound.upper
                assert bound.upper == value + coords(phi.tree, y).A / m


def test_interpolated_tree(scene_a, scene_d):
    tree = interpolated_tree(scene_a.tree)
    assert len(tree) == 3
    assert tree.point_type("root'") is PointType.T1
    tree = interpolated_tree(scene_d.tree)
    assert tree.A('x.s') == Fraction(1, 2)
    assert {node for node in tree.nodes if tree.point_type(node) is PointType.T1} == {"root'", "x.s'"}


def test_bruteforce_with_interpolation(scene_d):
    phi = scene_d.function('p')
    y = TreePoint.at('root')
    plain = demailly_bruteforce(phi, 1, y, degree_bound=2)
    interpolated = demailly_bruteforce(phi, 1, y, degree_bound=2, interpolate_rigid=True)
    assert interpolated >= plain
    assert interpolated <= demailly_bounds(phi, 1, y).upper


def test_exponent_vectors():
    vectors = list(exponent_vectors(2, 2))
    assert len(vectors) == 6
    assert (1, 1) in vectors and (2, 0) in vectors
    assert list(exponent_vectors(0, 3)) == [()]


def test_subadditivity(scene_b, random_scenes):
    report = subadditivity_check(scene_b.function('halves'), scene_b.function('halves'))
    assert report.holds
    assert [(row.node, row.floor_sum, row.floor_phi, row.floor_psi) for row in report.rows] \
        == [('a', 1, 0, 0), ('b', 1, 0, 0)]
    for generated in random_scenes(100):
        assert subadditivity_check(generated.scene.functions['phi'], generated.scene.functions['psi']).holds


def test_bruteforce_needs_nonpositive_functions(scene_a):
    with pytest.raises(NormalizationError):
        demailly_bruteforce(scene_a.function('p1').shifted(1), 1, TreePoint.at('root'), degree_bound=1)


def test_bruteforce_grows_with_degree_below_the_upper_bound(random_scenes):
    for generated in random_scenes(30, max_nodes=6):
        phi = generated.scene.functions['phi']
        for m in (1, 2):
            for y in generated.query_points[:2]:
                upper = demailly_bounds(phi, m, y).upper
                values = [demailly_bruteforce(phi, m, y, degree_bound=degree) for degree in range(4)]
                assert values == sorted(values)
                assert values[-1] <= upper
