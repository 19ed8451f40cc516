"""
Test suite for kottwitz.py
Tests B(G, mu)_un enumeration, GL_n polygons and stratum bookkeeping
"""

import os
import random
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from galois import build_group
from kottwitz import (
    basic_point, bgmu_gln, component_dimension, dimension_identity, enumerate_bgmu_un,
    leq_points, modulus_decomposition, mu_ordinary_and_basic, unramified_point,
)
from root_datum import WeylWord
from utils import PreconditionError


class TestEnumeration:
    """Test the unramified part of B(G, mu)"""

    def test_gl2_minuscule(self):
        """One unramified element: the mu-ordinary one, with W_b of size 2"""
        lat = build_group("GL2")
        points = enumerate_bgmu_un(lat, (1, 0))
        assert len(points) == 1
        pt = points[0]
        assert pt.slope == (1, 0)
        assert pt.slope_degree == 1
        assert len(pt.coset_reps) == 2
        assert not pt.is_basic

    def test_gl2_weight_two(self):
        lat = build_group("GL2")
        points = enumerate_bgmu_un(lat, (2, 0))
        assert [pt.cls for pt in points] == [lat.project((2, 0)), lat.project((1, 1))]
        assert points[1].is_basic
        assert len(points[1].coset_reps) == 1
        assert points[1].slope_degree == 0

    def test_gl3_quasi_minuscule(self):
        lat = build_group("GL3")
        points = enumerate_bgmu_un(lat, (1, 0, -1))
        assert [lat.lift(pt.cls) for pt in points] == [(1, 0, -1), (0, 0, 0)]
        assert [len(pt.coset_reps) for pt in points] == [6, 1]

    def test_unitary(self):
        """The mu-ordinary element has slope (1/2, 0, -1/2), the basic one lives on the torsion class"""
        lat = build_group("U3")
        points = enumerate_bgmu_un(lat, (1, 0, 0))
        assert len(points) == 2
        ordinary, basic = points
        assert ordinary.slope == (Fraction(1, 2), 0, Fraction(-1, 2))
        assert len(ordinary.coset_reps) == 2
        assert basic.is_basic
        assert basic.cls == lat.project((0, 1, 0))

    def test_levi(self):
        lat = build_group("GL3")
        pt = enumerate_bgmu_un(lat, (1, 0, 0))[0]
        assert pt.levi == (1,)
        assert pt.hn_levi == (0,)
        assert len(pt.coset_reps) == 3
        assert len(pt.fiber()) == len(set(pt.fiber())) == 3

    def test_not_dominant(self):
        with pytest.raises(PreconditionError):
            enumerate_bgmu_un(build_group("GL2"), (0, 1))

    def test_wrong_rank(self):
        with pytest.raises(PreconditionError):
            enumerate_bgmu_un(build_group("GL2"), (1, 0, 0))

    def test_row(self):
        row = enumerate_bgmu_un(build_group("GL2"), (1, 0))[0].to_row()
        assert row == {'class': '(1,0)', 'slope': '(1,0)', 'kappa': row['kappa'],
                       'levi': '{}', 'W_b': 2, 'degree': '1'}


class TestOrdinaryAndBasic:
    """Test the extremal elements"""

    def test_mu_ordinary(self):
        lat = build_group("GL2")
        ordinary, mu_flat = mu_ordinary_and_basic(lat, (2, 0))
        assert ordinary.cls == lat.project((2, 0))
        assert mu_flat == lat.kappa((2, 0))

    def test_basic(self):
        lat = build_group("GL2")
        assert basic_point(lat, (1, 0)) is None
        assert basic_point(lat, (2, 0)).cls == lat.project((1, 1))

    def test_partial_order(self):
        lat = build_group("GL2")
        top, bottom = enumerate_bgmu_un(lat, (2, 0))
        assert leq_points(lat, bottom, top)
        assert not leq_points(lat, top, bottom)

    def test_kappa_constant(self):
        lat = build_group("GL3")
        points = enumerate_bgmu_un(lat, (2, 1, 0))
        assert len({pt.kappa for pt in points}) == 1

    def test_point_is_idempotent(self):
        lat = build_group("GL3")
        pt = enumerate_bgmu_un(lat, (2, 1, 0))[0]
        assert unramified_point(lat, pt.cls) == pt


class TestNewtonPolygons:
    """Test B(GL_n, mu)"""

    def test_gl2(self):
        assert bgmu_gln(2, (1, 0)) == [(1, 0), (Fraction(1, 2), Fraction(1, 2))]

    def test_gl3(self):
        assert len(bgmu_gln(3, (1, 0, 0))) == 3

    def test_gl3_weight_two(self):
        polygons = bgmu_gln(3, (2, 0, 0))
        assert (Fraction(2, 3),) * 3 in polygons
        assert (1, 1, 0) in polygons
        assert (2, 0, 0) in polygons

    def test_not_dominant(self):
        with pytest.raises(PreconditionError):
            bgmu_gln(2, (0, 1))


class TestDimensions:
    """Test component dimensions and the dimension identity"""

    def test_central(self):
        lat = build_group("GL2")
        for d in range(-3, 4):
            assert component_dimension(lat, lat.project((d, d))) == 0

    def test_anti_dominant(self):
        lat = build_group("GL2")
        for d, e in [(3, 1), (2, -1), (5, 0)]:
            assert component_dimension(lat, lat.project((-d, -e))) == e - d

    @pytest.mark.parametrize("descriptor,mu", [
        ("GL2", (1, 0)),
        ("GL3", (2, 1, 0)),
        ("GL3", (1, 0, -1)),
        ("B2", (1, 1)),
        ("U3", (1, 0, 0)),
        ("U3", (2, 0, -1)),
    ])
    def test_identity(self, descriptor, mu):
        lat = build_group(descriptor)
        for pt in enumerate_bgmu_un(lat, mu):
            for w in pt.coset_reps:
                lhs, rhs = dimension_identity(lat, pt, w)
                assert lhs == rhs

    @pytest.mark.slow
    @pytest.mark.parametrize("descriptor", ["GL2", "GL3", "GL4", "A2", "A3", "B2", "B3", "C3", "G2", "U3"])
    def test_identity_random(self, descriptor):
        rng = random.Random(7)
        lat = build_group(descriptor)
        for _ in range(10):
            if lat.rd.presentation == 'GL':
                mu = sorted((rng.randint(-2, 2) for _ in range(lat.rd.rank)), reverse=True)
            else:
                mu = [rng.randint(0, 1) for _ in range(lat.rd.rank)]
            for pt in enumerate_bgmu_un(lat, mu):
                for w in pt.coset_reps:
                    lhs, rhs = dimension_identity(lat, pt, w)
                    assert lhs == rhs


class TestModulusDecomposition:
    """Test delta^{>0}, delta^{=0}, delta^{<0}"""

    def test_gl2_ordinary(self):
        lat = build_group("GL2")
        pt = enumerate_bgmu_un(lat, (1, 0))[0]
        decomposition = modulus_decomposition(lat, WeylWord(), pt)
        assert decomposition.positive == (1, -1)
        assert decomposition.zero == (0, 0)

    def test_basic_is_all_zero(self):
        lat = build_group("GL3")
        pt = enumerate_bgmu_un(lat, (1, 1, 1))[0]
        decomposition = modulus_decomposition(lat, WeylWord(), pt)
        assert len(decomposition.zero_roots) == 3
        assert decomposition.positive_roots == ()

    def test_disjoint(self):
        lat = build_group("GL3")
        for pt in enumerate_bgmu_un(lat, (2, 1, 0)):
            for w in pt.coset_reps:
                d = modulus_decomposition(lat, w, pt)
                assert len(d.positive_roots) + len(d.zero_roots) + len(d.negative_roots) == 3

    def test_requires_representative(self):
        lat = build_group("GL2")
        pt = enumerate_bgmu_un(lat, (1, 1))[0]
        with pytest.raises(PreconditionError):
            modulus_decomposition(lat, WeylWord((0,)), pt)


if __name__ == "__main__":
    pytest.main([__file__])
