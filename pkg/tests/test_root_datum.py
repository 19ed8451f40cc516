"""
Test suite for root_datum.py
Tests root data construction, Weyl group actions and coset representatives
"""

import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from root_datum import (
    WeylWord, act, build_root_datum, dominant_representative, enumerate_weyl_group,
    fundamental_coweight, fundamental_group, inversion_count, is_dominant,
    is_minimal_representative, longest_element, minimal_coset_reps, opposition,
    parabolic_subgroup, same_element, weyl_orbit,
)
from utils import CapExceededError, PreconditionError, UnsupportedTypeError


class TestBuildRootDatum:
    """Test construction and validation of root data"""

    @pytest.mark.parametrize("tag,roots,order,coxeter", [
        ("A2", 3, 6, 3),
        ("B3", 9, 48, 6),
        ("C3", 9, 48, 6),
        ("D4", 12, 192, 6),
        ("G2", 6, 12, 6),
        ("F4", 24, 1152, 12),
        ("E6", 36, 51840, 12),
        ("E7", 63, 2903040, 18),
        ("E8", 120, 696729600, 30),
    ])
    def test_classical_invariants(self, tag, roots, order, coxeter):
        rd = build_root_datum(tag)
        assert len(rd.positive_roots) == roots
        assert rd.weyl_group_order == order
        assert rd.coxeter_number == coxeter

    def test_gl2(self):
        rd = build_root_datum("GL2")
        assert rd.rank == 2
        assert rd.simple_roots == ((1, -1),)
        assert rd.simple_coroots == ((1, -1),)
        assert rd.two_rho_hat == (1, -1)
        assert rd.rho == (Fraction(1, 2), Fraction(-1, 2))

    def test_gl3_two_rho_hat(self):
        assert build_root_datum("GL3").two_rho_hat == (2, 0, -2)

    def test_sl2(self):
        rd = build_root_datum("SL2")
        assert rd.simple_roots == ((2,),)
        assert rd.simple_coroots == ((1,),)

    def test_central_torus(self):
        rd = build_root_datum("B2+T1")
        assert rd.rank == 3
        assert rd.central_rank == 1
        assert all(alpha[-1] == 0 for alpha in rd.simple_roots)

    def test_torus(self):
        rd = build_root_datum("GL1")
        assert rd.semisimple_rank == 0
        assert rd.rank == 1

    @pytest.mark.parametrize("descriptor", ["H3", "E9", "D3", "Z5", "G3", "B1", ""])
    def test_unsupported(self, descriptor):
        with pytest.raises(UnsupportedTypeError):
            build_root_datum(descriptor)

    def test_adjoint_coroots_are_cartan_columns(self):
        rd = build_root_datum("B2")
        assert rd.cartan == ((2, -2), (-1, 2))
        assert rd.simple_coroots == ((2, -1), (-2, 2))

    def test_document(self):
        document = build_root_datum("G2").to_document()
        assert document['type'] == 'G2'
        assert document['presentation'] == 'adjoint'
        assert len(document['positive_coroots']) == 6


class TestFundamentalGroup:
    """pi_1 = X_*(T) / coroot lattice"""

    @pytest.mark.parametrize("tag,expected", [
        ("GL2", "Z"),
        ("SL3", "0"),
        ("B2", "Z/2"),
        ("A2", "Z/3"),
        ("G2", "0"),
        ("E8", "0"),
    ])
    def test_describe(self, tag, expected):
        assert fundamental_group(build_root_datum(tag)).describe() == expected


class TestWeylWords:
    """Test Weyl words and their action"""

    def test_str(self):
        assert str(WeylWord()) == "1"
        assert str(WeylWord((0, 1))) == "s1s2"
        assert WeylWord((0, 1)).inverse() == WeylWord((1, 0))

    def test_last_letter_acts_first(self):
        rd = build_root_datum("GL3")
        # s1 s2 e3 = s1 e2 = e1
        assert act(rd, WeylWord((0, 1)), (0, 0, 1)) == (1, 0, 0)

    def test_braid_relation(self):
        rd = build_root_datum("A2")
        assert same_element(rd, WeylWord((0, 1, 0)), WeylWord((1, 0, 1)))
        assert not same_element(rd, WeylWord((0,)), WeylWord((1,)))

    @pytest.mark.parametrize("tag,order", [("A3", 24), ("B2", 8), ("G2", 12), ("B3", 48)])
    def test_enumeration(self, tag, order):
        assert len(enumerate_weyl_group(build_root_datum(tag))) == order

    def test_words_are_reduced(self):
        rd = build_root_datum("B3")
        for w in enumerate_weyl_group(rd):
            assert inversion_count(rd, w) == w.length

    def test_longest_element(self):
        for tag in ["A2", "B3", "G2", "D4"]:
            rd = build_root_datum(tag)
            w0 = longest_element(rd)
            assert w0.length == len(rd.positive_roots)

    def test_opposition(self):
        assert opposition(build_root_datum("A3")) == {0: 2, 1: 1, 2: 0}
        assert opposition(build_root_datum("B3")) == {0: 0, 1: 1, 2: 2}

    def test_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_weyl_group(build_root_datum("E8"), cap=1000)


class TestDominance:
    """Test dominance and orbits"""

    def test_dominant_representative(self):
        rd = build_root_datum("GL3")
        v, word = dominant_representative(rd, (0, 2, 1))
        assert v == (2, 1, 0)
        assert act(rd, word, (0, 2, 1)) == (2, 1, 0)
        assert is_dominant(rd, v)

    def test_orbit(self):
        rd = build_root_datum("GL3")
        assert len(weyl_orbit(rd, (1, 0, 0))) == 3
        assert len(weyl_orbit(rd, (2, 1, 0))) == 6

    def test_coset_reps(self):
        rd = build_root_datum("A2")
        reps = minimal_coset_reps(rd, [0])
        assert len(reps) == 3
        assert all(is_minimal_representative(rd, w, [0]) for w in reps)

    def test_parabolic(self):
        assert len(parabolic_subgroup(build_root_datum("A3"), [0, 1])) == 6

    def test_bad_levi(self):
        with pytest.raises(PreconditionError):
            minimal_coset_reps(build_root_datum("A2"), [5])


class TestFundamentalCoweights:
    """Test fundamental coweights"""

    def test_adjoint_basis(self):
        rd = build_root_datum("B3")
        assert fundamental_coweight(rd, 1) == (0, 1, 0)

    def test_gl(self):
        rd = build_root_datum("GL3")
        assert fundamental_coweight(rd, 0) == (1, 0, 0)
        assert fundamental_coweight(rd, 1) == (1, 1, 0)

    def test_simply_connected_is_rational(self):
        rd = build_root_datum("SL2")
        assert fundamental_coweight(rd, 0) == (Fraction(1, 2),)

    def test_out_of_range(self):
        with pytest.raises(PreconditionError):
            fundamental_coweight(build_root_datum("A2"), 2)


if __name__ == "__main__":
    pytest.main([__file__])
