import json
import math
import unittest

import numpy as np
import pytest
from sympy import ImmutableMatrix, Integer, Rational, sqrt

from tests import test_data
from tests.complexes import (
    build_random_complex,
    random_b_sets,
    random_complex,
    random_invertible,
    shifted_cycles,
    twisted_sequence,
)
from torsionlab.chain_torsion import (
    ChainComplexData,
    ChainComplexError,
    HomologyBasisData,
    LogTorsion,
    ShortExactSequence,
    betti_ranks,
    change_chain_basis,
    complex_from_dict,
    complex_to_dict,
    direct_sum,
    direct_sum_homology,
    dual_bases,
    dual_complex,
    exact_scalar,
    first_violation,
    induced_homology_log_det,
    les_complex,
    mapping_cylinder,
    pair_sequence_torsion_log,
    read_complex,
    scalar,
    standard_homology_basis,
    torsion_determinants,
    torsion_log,
    validate_complex,
    zeros,
)

SEEDS = range(200)


def interval(d: int) -> ChainComplexData:
    return ChainComplexData.from_matrices((1, 1), [[[d]]])


class ValidateComplexTest(unittest.TestCase):
    def test_zero_boundaries_are_valid(self) -> None:
        c = ChainComplexData.from_matrices((2, 3, 1), [[[0] * 3] * 2, [[0]] * 3])
        self.assertTrue(validate_complex(c))
        self.assertEqual(betti_ranks(c), [2, 3, 1])

    def test_interval_is_valid(self) -> None:
        self.assertTrue(validate_complex(interval(2)))

    def test_reports_first_violation(self) -> None:
        c = ChainComplexData.from_matrices((1, 1, 1), [[[1]], [[1]]])
        with self.assertLogs("torsionlab.chain_torsion", level="WARNING"):
            self.assertFalse(validate_complex(c))
        self.assertEqual(first_violation(c), 1)
        with self.assertRaises(ChainComplexError):
            betti_ranks(c)

    def test_shape_mismatch(self) -> None:
        with self.assertRaises(ChainComplexError):
            ChainComplexData.from_matrices((2, 1), [[[1, 2]]])

    def test_rejects_floats_in_boundaries(self) -> None:
        with self.assertRaises(ChainComplexError):
            ChainComplexData.from_matrices((1, 1), [[[0.5]]])


class ScalarTest(unittest.TestCase):
    def test_exact_scalars(self) -> None:
        self.assertEqual(exact_scalar("3/4"), Rational(3, 4))
        self.assertEqual(exact_scalar(2.0), Integer(2))
        with self.assertRaises(ChainComplexError):
            exact_scalar(True)
        with self.assertRaises(ChainComplexError):
            exact_scalar("three")

    def test_sqrt_scalar(self) -> None:
        value = scalar({"rat": "1/2", "sqrt": ["3"]})
        self.assertEqual(value, Rational(1, 2) * sqrt(3))


class BettiTest(unittest.TestCase):
    def test_acyclic_interval(self) -> None:
        self.assertEqual(betti_ranks(interval(1)), [0, 0])

    def test_split_form(self) -> None:
        rng = np.random.default_rng(7)
        rc = build_random_complex(rng, [0, 1, 2, 0], [1, 0, 1])
        self.assertEqual(betti_ranks(rc.complex), [1, 0, 1])


class TorsionLogTest(unittest.TestCase):
    def test_interval(self) -> None:
        c = interval(2)
        t = torsion_log(c, HomologyBasisData.empty(c))
        self.assertEqual(t.magnitude, 2)
        self.assertAlmostEqual(t.value, math.log(2.0), places=14)

    def test_zero_complex_uses_homology_volume(self) -> None:
        c = ChainComplexData.from_matrices((1, 1), [[[0]]])
        h = HomologyBasisData.from_vectors(c, {0: [[3]], 1: [[5]]})
        self.assertEqual(torsion_log(c, h).magnitude, Rational(3, 5))

    def test_wrong_homology_rank(self) -> None:
        c = ChainComplexData.from_matrices((1, 1), [[[0]]])
        with self.assertRaises(ChainComplexError):
            torsion_log(c, HomologyBasisData.empty(c))

    def test_boundary_is_not_a_homology_generator(self) -> None:
        c = ChainComplexData.from_matrices((2, 1), [[[1], [-1]]])
        h = HomologyBasisData.from_vectors(c, {0: [[1, -1]]})
        with self.assertRaises(ChainComplexError):
            torsion_log(c, h)

    def test_standard_basis_matches_betti(self) -> None:
        rng = np.random.default_rng(11)
        rc = random_complex(rng)
        h = standard_homology_basis(rc.complex)
        self.assertEqual(list(h.ranks), betti_ranks(rc.complex))


@pytest.mark.parametrize("seed", SEEDS)
def test_independent_of_b_sets_and_lifts(seed: int) -> None:
    rng = np.random.default_rng(seed)
    rc = random_complex(rng)
    reference = torsion_log(rc.complex, rc.homology)
    b = random_b_sets(rng, rc.complex)
    moved = shifted_cycles(rng, rc.complex, rc.homology)
    assert torsion_log(rc.complex, moved, b).equals(reference)


@pytest.mark.parametrize("seed", SEEDS)
def test_volume_element_law(seed: int) -> None:
    rng = np.random.default_rng(seed)
    rc = random_complex(rng)
    factors = [random_invertible(rng, z.cols) for z in rc.homology.cycles]
    scaled = rc.homology.scaled(factors)
    expected = torsion_log(rc.complex, rc.homology)
    for q, a in enumerate(factors):
        if a.rows:
            step = LogTorsion(abs(a.det()))
            expected = expected + step if q % 2 == 0 else expected - step
    assert torsion_log(rc.complex, scaled).equals(expected)


@pytest.mark.parametrize("seed", SEEDS)
def test_direct_sum_additivity(seed: int) -> None:
    rng = np.random.default_rng(seed)
    first, second = random_complex(rng), random_complex(rng)
    total = direct_sum(first.complex, second.complex)
    h = direct_sum_homology(
        first.complex, first.homology, second.complex, second.homology
    )
    expected = torsion_log(first.complex, first.homology) + torsion_log(
        second.complex, second.homology
    )
    assert torsion_log(total, h).equals(expected)


@pytest.mark.parametrize("seed", SEEDS)
def test_unimodular_change_of_chain_basis(seed: int) -> None:
    rng = np.random.default_rng(seed)
    rc = random_complex(rng)
    change = [_unimodular(rng, n) for n in rc.complex.ranks]
    moved, h = change_chain_basis(rc.complex, change, rc.homology)
    assert h is not None
    assert torsion_log(moved, h).equals(torsion_log(rc.complex, rc.homology))


def _unimodular(rng: np.random.Generator, n: int) -> ImmutableMatrix:
    """A permuted unitriangular integer matrix, so |det| = 1."""
    if n == 0:
        return ImmutableMatrix.zeros(0, 0)
    m = ImmutableMatrix.eye(n).as_mutable()
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = int(rng.integers(-3, 4))
    order = list(rng.permutation(n))
    return ImmutableMatrix(m.extract(order, list(range(n))))


@pytest.mark.parametrize("seed", range(60))
def test_mapping_cylinder_identity(seed: int) -> None:
    rng = np.random.default_rng(seed)
    rc = random_complex(rng, max_length=3)
    cylinder = mapping_cylinder(rc.complex)
    assert validate_complex(cylinder.complex)
    image = HomologyBasisData(
        tuple(
            ImmutableMatrix(i * z)
            for i, z in zip(cylinder.inclusion, rc.homology.cycles)
        )
        + tuple(
            ImmutableMatrix.zeros(cylinder.complex.rank(q), 0)
            for q in range(rc.complex.length + 1, cylinder.complex.length + 1)
        )
    )
    factors = [ImmutableMatrix.eye(z.cols) * 2 for z in image.cycles]
    scaled = image.scaled(factors)
    induced = induced_homology_log_det(
        cylinder.inclusion, rc.complex, rc.homology, cylinder.complex, scaled
    )
    left = torsion_log(cylinder.complex, scaled) + induced
    assert left.equals(torsion_log(rc.complex, rc.homology))


def test_mapping_cylinder_of_a_point() -> None:
    c = ChainComplexData.from_matrices((1,), [])
    cylinder = mapping_cylinder(c)
    assert cylinder.complex.ranks == (2, 1)
    assert list(cylinder.complex.boundary(1)) == [1, -1]


@pytest.mark.parametrize("seed", range(100))
def test_duality_of_determinants(seed: int) -> None:
    rng = np.random.default_rng(seed)
    rc = random_complex(rng, max_length=5)
    c = rc.complex
    dual = dual_complex(c)
    assert validate_complex(dual)
    assert dual_complex(dual) == c
    h_dual, b_dual = dual_bases(c, rc.homology)
    dets = torsion_determinants(c, rc.homology)
    dual_dets = torsion_determinants(dual, h_dual, b_dual)
    m = c.length
    for q, d in enumerate(dets):
        assert abs(dual_dets[m - q] * d) == 1


@pytest.mark.parametrize("seed", range(100))
def test_acyclic_dual_torsion(seed: int) -> None:
    rng = np.random.default_rng(seed)
    rc = random_complex(rng, acyclic=True)
    c = rc.complex
    original = torsion_log(c, HomologyBasisData.empty(c))
    dual = dual_complex(c)
    flipped = torsion_log(dual, HomologyBasisData.empty(dual))
    expected = original if c.length % 2 == 1 else -original
    assert flipped.equals(expected)


@pytest.mark.parametrize("seed", range(100))
def test_pair_sequence_additivity(seed: int) -> None:
    rng = np.random.default_rng(seed)
    length = int(rng.integers(1, 4))
    layouts = []
    for _ in range(2):
        sizes = [0] + [int(rng.integers(0, 3)) for _ in range(length)] + [0]
        betti = [int(rng.integers(0, 2)) for _ in range(length + 1)]
        layouts.append(build_random_complex(rng, sizes, betti))
    seq = twisted_sequence(rng, layouts[0], layouts[1])
    les = les_complex(seq)
    assert not any(betti_ranks(les))
    total = torsion_log(seq.total, seq.total_homology)
    parts = (
        torsion_log(seq.sub, seq.sub_homology)
        + torsion_log(seq.quotient, seq.quotient_homology)
        + pair_sequence_torsion_log(seq)
    )
    assert total.equals(parts)


@pytest.mark.parametrize("seed", range(40))
def test_pair_sequence_additivity_with_connecting_map(seed: int) -> None:
    rng = np.random.default_rng(seed)
    length = int(rng.integers(1, 4))
    layouts = []
    for _ in range(2):
        sizes = [0] + [int(rng.integers(0, 3)) for _ in range(length)] + [0]
        layouts.append(build_random_complex(rng, sizes, [1] * (length + 1)))
    seq = twisted_sequence(rng, layouts[0], layouts[1], connecting=True)
    les = les_complex(seq)
    assert not any(betti_ranks(les))
    assert any(x != 0 for x in les.boundary(3))
    total = torsion_log(seq.total, seq.total_homology)
    parts = (
        torsion_log(seq.sub, seq.sub_homology)
        + torsion_log(seq.quotient, seq.quotient_homology)
        + pair_sequence_torsion_log(seq)
    )
    assert total.equals(parts)


class IntervalRelativeToEndpointsTest(unittest.TestCase):
    """X an edge, A its two endpoints, Q = X/A a single relative 1-cell."""

    def setUp(self) -> None:
        self.total = ChainComplexData.from_matrices((2, 1), [[[-1], [1]]])
        self.sub = ChainComplexData.from_matrices((2, 0), [[[], []]])
        self.quotient = ChainComplexData.from_matrices((0, 1), [[]])
        self.seq = ShortExactSequence(
            sub=self.sub,
            sub_homology=HomologyBasisData.from_vectors(
                self.sub, {0: [[2, 0], [0, 3]]}
            ),
            total=self.total,
            total_homology=HomologyBasisData.from_vectors(self.total, {0: [[5, 0]]}),
            quotient=self.quotient,
            quotient_homology=HomologyBasisData.from_vectors(
                self.quotient, {1: [[7]]}
            ),
            inclusion=(ImmutableMatrix([[1, 0], [0, 1]]), zeros(1, 0)),
            projection=(zeros(0, 2), ImmutableMatrix([[1]])),
        )

    def test_connecting_map(self) -> None:
        les = les_complex(self.seq)
        self.assertEqual(les.ranks, (0, 1, 2, 1, 0, 0))
        self.assertEqual(
            les.boundary(2), ImmutableMatrix([[Rational(2, 5), Rational(3, 5)]])
        )
        self.assertEqual(
            les.boundary(3), ImmutableMatrix([[Rational(-7, 2)], [Rational(7, 3)]])
        )

    def test_sequence_torsion(self) -> None:
        self.assertEqual(
            pair_sequence_torsion_log(self.seq).magnitude, Rational(35, 6)
        )

    def test_additivity(self) -> None:
        total = torsion_log(self.total, self.seq.total_homology)
        sub = torsion_log(self.sub, self.seq.sub_homology)
        quotient = torsion_log(self.quotient, self.seq.quotient_homology)
        self.assertEqual(total.magnitude, 5)
        self.assertEqual(sub.magnitude, 6)
        self.assertEqual(quotient.magnitude, Rational(1, 7))
        self.assertTrue(
            total.equals(sub + quotient + pair_sequence_torsion_log(self.seq))
        )


class SerialisationTest(unittest.TestCase):
    def test_reads_circle_document(self) -> None:
        c, h = read_complex(test_data.get_path("data-files/circle-product-cw.json"))
        self.assertEqual(c.ranks, (2, 3, 1))
        self.assertEqual(betti_ranks(c), [1, 1, 0])
        assert h is not None
        self.assertEqual(h.ranks, (1, 1, 0))

    def test_reads_interval_document(self) -> None:
        c, h = read_complex(test_data.get_path("data-files/acyclic-interval.json"))
        self.assertIsNone(h)
        self.assertEqual(torsion_log(c, HomologyBasisData.empty(c)).magnitude, 2)

    def test_round_trip_with_sqrt_basis(self) -> None:
        c = ChainComplexData.from_matrices((1, 1), [[[0]]])
        h = HomologyBasisData.from_vectors(c, {0: [[sqrt(2)]], 1: [[Rational(1, 3)]]})
        data = json.loads(json.dumps(complex_to_dict(c, h)))
        c2, h2 = complex_from_dict(data)
        assert h2 is not None
        self.assertEqual(c2, c)
        self.assertTrue(torsion_log(c2, h2).equals(torsion_log(c, h)))

    def test_rejects_bad_document(self) -> None:
        with self.assertRaises(ChainComplexError):
            complex_from_dict({"ranks": [1], "boundaries": [], "extra": 1})
