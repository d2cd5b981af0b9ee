import random
from fractions import Fraction

import pytest

from disc.demailly import multiplier_exponents
from disc.disc_model import PointType, TreePoint
from disc.divisor import FormalPoly
from disc.norms import (h_generator, h_membership, integrability_threshold, lelong_numbers, max_admissible_eps,
                        plus_norm, sup_norm)
from disc.potential import QshFunction
from disc.rationals import INF, NEG_INF
from util.exceptions import QshValidationError


def test_sup_norm_threshold(scene_a):
    f, phi = scene_a.poly('f1'), scene_a.function('p1')
    assert sup_norm(f, phi, Fraction(1, 3)) == 0
    assert sup_norm(f, phi, 0) == 0
    assert sup_norm(f, phi, Fraction(1, 2)) == INF
    assert integrability_threshold(f, phi) == Fraction(1, 3)


def test_sup_norm_sees_interior_nodes(scene_d):
    one, phi = scene_d.poly('one'), scene_d.function('p')
    assert sup_norm(one, phi, 0) == 0
    assert sup_norm(one, phi, Fraction(1, 10)) == Fraction(1, 10)


def test_plus_norm(scene_a):
    assert plus_norm(scene_a.poly('one'), scene_a.function('p1')).log_norm == INF
    assert plus_norm(scene_a.poly('one'), scene_a.function('half')).log_norm == 0
    assert plus_norm(scene_a.poly('f1'), scene_a.function('p1')).log_norm == 0


def test_plus_norm_shifts_positive_functions(scene_a):
    result = plus_norm(scene_a.poly('f1'), scene_a.function('p1').shifted(2))
    assert result.shift == 2
    assert result.log_norm == 0


@pytest.mark.parametrize("coefficient", [Fraction(1, 2), Fraction(9, 10), Fraction(1), Fraction(3, 2)])
def test_plus_norm_finite_exactly_below_one(scene_a, coefficient):
    phi = QshFunction(scene_a.tree, 0, {'a': -coefficient})
    finite = plus_norm(FormalPoly.one(scene_a.tree), phi).log_norm < INF
    assert finite == (coefficient < 1)


def test_lelong_numbers(scene_a, scene_c):
    assert lelong_numbers(scene_a.function('p1')) == {'a': Fraction(3, 2)}
    assert lelong_numbers(scene_c.function('pole')) == {'a': 1}
    assert lelong_numbers(scene_c.function('p')) == {}


def test_h_generator(scene_b):
    phi = scene_b.function('mixed')
    assert h_generator(phi).describe() == "g_a^1 * g_b^1"
    assert h_membership(scene_b.poly('gab'), phi)
    assert h_membership(scene_b.poly('fab'), phi)
    assert not h_membership(scene_b.poly('ga'), phi)
    assert h_generator(scene_b.function('halves')).describe() == "1"


def test_invalid_functions_are_rejected(scene_a):
    bad = QshFunction(scene_a.tree, 0, {'a': 1})
    with pytest.raises(QshValidationError):
        plus_norm(scene_a.poly('f1'), bad)


def test_max_admissible_eps(scene_a, scene_d):
    assert max_admissible_eps(scene_a.poly('f1'), scene_a.function('p1'), TreePoint.on_edge('e1', 1)) \
        == Fraction(1, 3)
    assert max_admissible_eps(scene_d.poly('one'), scene_d.function('p'), TreePoint.at('root')) == 0
    assert max_admissible_eps(scene_a.poly('one'), scene_a.function('p1'), TreePoint.at('root')) == NEG_INF


def _random_poly(rng, tree):
    rigid = [node for node in tree.nodes if tree.point_type(node) is PointType.T1]
    return FormalPoly(tree, Fraction(rng.randint(-2, 2)), {node: rng.randint(0, 4) for node in rigid})


def test_ideal_coherence(random_scenes):
    rng = random.Random(7)
    for generated in random_scenes(100):
        for phi in generated.scene.functions.values():
            generator = h_generator(phi)
            assert multiplier_exponents(phi).exponents() == generator.roots
            for f in [generated.scene.polys['f']] + [_random_poly(rng, phi.tree) for _ in range(3)]:
                member = h_membership(f, phi)
                assert member == (plus_norm(f, phi).log_norm < INF)
                assert member == generator.divides(f)


def test_integrability_threshold_is_open(random_scenes):
    rng = random.Random(11)
    for generated in random_scenes(100):
        for phi in generated.scene.functions.values():
            for f in [generated.scene.polys['f']] + [_random_poly(rng, phi.tree) for _ in range(3)]:
                threshold = integrability_threshold(f, phi)
                member = h_membership(f, phi)
                assert member == (threshold > 0)
                if not member:
                    assert sup_norm(f, phi, Fraction(1, 100)) == INF
                elif threshold.is_infinite:
                    assert sup_norm(f, phi, 5) < INF
                else:
                    assert sup_norm(f, phi, threshold.fraction / 2) < INF
                    assert sup_norm(f, phi, threshold.fraction + Fraction(1, 8)) == INF


@pytest.mark.parametrize("constant", [0, Fraction(-1, 3), -2])
def test_plus_norm_moves_against_nonpositive_shifts(random_scenes, constant):
    for generated in random_scenes(100):
        phi = generated.scene.functions['phi'].normalized()
        f = generated.scene.polys['f']
        base, moved = plus_norm(f, phi), plus_norm(f, phi.shifted(constant))
        assert base.shift == 0 and moved.shift == 0
        if base.log_norm == INF:
            assert moved.log_norm == INF
        else:
            assert moved.log_norm == base.log_norm - constant
