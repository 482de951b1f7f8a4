"""Catalog surfaces: construction, validation, reduction, axes."""

import dataclasses
import math

import pytest

from geodense.catalog import CATALOG, surface_names
from geodense.errors import InvalidSurface, NotHyperbolic, RelatorFails
from geodense.halfplane import INF, Isometry, dist
from geodense.surface import SurfaceModel, line_through_vertices, load_surface
from geodense.words import inverse_word


@pytest.fixture(scope="module")
def sphere():
    return load_surface("thrice-punctured-sphere")


@pytest.fixture(scope="module")
def torus():
    return load_surface("once-punctured-torus")


class TestCatalog:
    def test_names(self):
        assert surface_names() == ["once-punctured-torus",
                                   "thrice-punctured-sphere"]

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown surface"):
            load_surface("flat_torus")

    def test_all_load(self):
        for name in surface_names():
            m = load_surface(name)
            assert m.name == name


class TestSideLines:
    def test_vertical_down_from_infinity(self):
        ln = line_through_vertices(INF, -1 + 1j)
        assert ln.is_vertical and ln.foot == -1.0 and not ln.up

    def test_vertical_up_from_foot(self):
        ln = line_through_vertices(1.0, 1 + 1j)
        assert ln.is_vertical and ln.foot == 1.0 and ln.up

    def test_circle_from_ideal_start(self):
        ln = line_through_vertices(0.0, -1 + 1j)
        assert ln.endpoint_back == 0.0
        assert ln.endpoint_fwd == pytest.approx(-2.0)
        assert ln.dist_to(-1 + 1j) < 1e-12

    def test_circle_into_ideal_end(self):
        ln = line_through_vertices(-1 + 1j, 0.0)
        assert ln.endpoint_fwd == 0.0
        assert ln.endpoint_back == pytest.approx(-2.0)


class TestSphereGeometry:
    def test_area(self, sphere):
        assert sphere.polygon_area() == pytest.approx(2 * math.pi, abs=1e-9)

    def test_pairing_matrix(self, sphere):
        want = Isometry.from_matrix(((-3.0, 2.0), (-2.0, 1.0)))
        assert sphere.word_iso("aB").approx_equal(want, tol=1e-12)

    def test_side_windows(self, sphere):
        s4 = sphere.sides[4]
        assert math.isinf(s4.s_lo) and s4.s_lo < 0
        assert s4.s_hi == pytest.approx(0.0)
        s5 = sphere.sides[5]
        assert s5.s_lo == pytest.approx(0.0)
        assert math.isinf(s5.s_hi) and s5.s_hi > 0

    def test_cusp_strips(self, sphere):
        strips = [(c.strip_lo, c.strip_lo + c.width) for c in sphere.cusps]
        assert strips[0] == (pytest.approx(-1.0), pytest.approx(1.0))
        assert strips[1] == (pytest.approx(-1.5), pytest.approx(0.5))
        assert strips[2] == (pytest.approx(0.0), pytest.approx(2.0))

    def test_membership(self, sphere):
        assert sphere.inside(sphere.base_point)
        assert sphere.inside(0.0 + 5.0j)
        assert not sphere.inside(-1.2 + 0.5j)      # beyond the left wall
        assert not sphere.inside(-1.0 + 0.5j)      # inside a boundary disk
        assert not sphere.inside(0.75 + 0.2j)


class TestTorusGeometry:
    def test_area(self, torus):
        assert torus.polygon_area() == pytest.approx(2 * math.pi, abs=1e-9)

    def test_single_cusp_strip(self, torus):
        (c,) = torus.cusps
        assert c.strip_lo == pytest.approx(-3.0)
        assert c.width == 6.0

    def test_cusp_word_translates(self, torus):
        g = torus.word_iso("BAba")
        assert g.apply(0.25 + 1.5j) == pytest.approx(6.25 + 1.5j)

    def test_membership(self, torus):
        assert torus.inside(torus.base_point)
        assert not torus.inside(0.5 + 0.3j)        # inside a boundary disk
        assert not torus.inside(3.5 + 1.0j)


class TestAxes:
    def test_torus_generator_axis(self, torus):
        line, length = torus.axis_of("a")
        assert length == pytest.approx(2 * math.acosh(1.5), abs=1e-12)
        assert length == pytest.approx(1.9248473002384139, abs=1e-12)
        golden = (math.sqrt(5.0) - 1.0) / 2.0
        assert line.endpoint_fwd == pytest.approx(golden)
        assert line.endpoint_back == pytest.approx(-1.0 / golden)

    def test_sphere_commutator_axis(self, sphere):
        line, length = sphere.axis_of("ab")
        assert length == pytest.approx(2 * math.acosh(3.0), abs=1e-12)
        g = sphere.word_iso("ab")
        p = line.point_at(0.3)
        assert dist(g.apply(p), line.point_at(0.3 + length)) < 1e-9

    def test_parabolic_rejected(self, sphere, torus):
        with pytest.raises(NotHyperbolic):
            sphere.axis_of("a")
        with pytest.raises(NotHyperbolic):
            torus.axis_of("BAba")
        with pytest.raises(NotHyperbolic):
            torus.axis_of("")


class TestLevels:
    def test_infinity_cusp_level(self, sphere):
        assert sphere.level(0, 0.3 + 4.0j) == pytest.approx(0.5)
        assert not sphere.in_truncation(0.3 + 4.0j, 1.0)
        assert sphere.in_truncation(0.3 + 4.0j, 0.5)

    def test_finite_cusp_level(self, sphere):
        # chart of the cusp at 0 sends z to -1/z
        z = -1.0 / complex(0.3, 10.0)
        assert sphere.level(1, z) == pytest.approx(0.2)

    def test_base_point_in_thick_part(self, sphere, torus):
        assert sphere.in_truncation(sphere.base_point, 1.0)
        assert torus.in_truncation(torus.base_point, 1.0)

    def test_cusp_horocycle_coords(self, sphere):
        h0 = sphere.cusp_horocycle(0, 0.5)
        assert math.isinf(h0.base) and h0.size == pytest.approx(4.0)
        h1 = sphere.cusp_horocycle(1, 0.5)
        assert h1.base == pytest.approx(0.0)
        assert h1.size == pytest.approx(0.25)

    def test_horocycle_matches_level(self, torus):
        h = torus.cusp_horocycle(0, 0.8)
        z = complex(0.7, h.size)
        assert torus.level(0, z) == pytest.approx(0.8)


class TestNormalize:
    def test_interior_fixed(self, sphere):
        z, g, word = sphere.normalize(sphere.base_point)
        assert z == sphere.base_point
        assert g.is_identity() and word == ""

    @pytest.mark.parametrize("word", ["a", "bA", "abB", "AbaB", "bbaBA"])
    def test_round_trip(self, sphere, word):
        z0 = sphere.word_iso(word).apply(sphere.base_point)
        z, g, w = sphere.normalize(z0)
        assert abs(z - sphere.base_point) < 1e-9
        assert abs(g.apply(z0) - z) < 1e-12
        assert sphere.word_iso(w).approx_equal(g, tol=1e-9)

    @pytest.mark.parametrize("word", ["a", "Ab", "abAB", "baBAb"])
    def test_round_trip_torus(self, torus, word):
        z0 = torus.word_iso(word).apply(torus.base_point)
        z, g, w = torus.normalize(z0)
        assert abs(z - torus.base_point) < 1e-9
        assert torus.word_iso(w).approx_equal(g, tol=1e-9)

    def test_deep_cusp_shortcut(self, sphere):
        # far along the cusp at 0: the direct orbit point would need
        # hundreds of greedy steps, the parabolic shortcut a handful
        chart = sphere.cusps[1].chart
        z0 = chart.inverse().apply(complex(1000.7, 30.0))
        z, g, word = sphere.normalize(z0)
        assert sphere.inside(z)
        assert abs(g.apply(z0) - z) < 1e-9
        assert sphere.level(1, z) == pytest.approx(2.0 / 30.0)
        assert set(word) <= {"b", "B"}

    def test_deep_point_stays_deep(self, torus):
        z0 = torus.word_iso("abba").apply(complex(14.2, 40.0))
        z, g, word = torus.normalize(z0)
        assert torus.inside(z)
        assert torus.level(0, z) == pytest.approx(6.0 / 40.0)


class TestValidation:
    def test_bad_relator(self):
        spec = dataclasses.replace(CATALOG["thrice-punctured-sphere"],
                                   relator="ab")
        with pytest.raises(RelatorFails):
            SurfaceModel(spec)

    def test_bad_partner(self):
        spec = dataclasses.replace(CATALOG["thrice-punctured-sphere"],
                                   side_partners=(5, 3, 1, 4, 2, 0))
        with pytest.raises(InvalidSurface):
            SurfaceModel(spec)

    def test_non_unimodular_generator(self):
        spec = CATALOG["thrice-punctured-sphere"]
        bad = (((2.0, 4.0), (0.0, 2.0)),) + spec.gen_matrices[1:]
        spec = dataclasses.replace(spec, gen_matrices=bad)
        with pytest.raises(InvalidSurface, match="unimodular"):
            SurfaceModel(spec)

    def test_moved_vertex(self):
        spec = CATALOG["thrice-punctured-sphere"]
        verts = list(spec.vertices)
        verts[1] = complex(-1.0, 1.1)
        spec = dataclasses.replace(spec, vertices=tuple(verts))
        with pytest.raises(InvalidSurface):
            SurfaceModel(spec)

    def test_wrong_cusp_width(self):
        spec = CATALOG["thrice-punctured-sphere"]
        cusps = (dataclasses.replace(spec.cusps[0], width=3.0),) + spec.cusps[1:]
        spec = dataclasses.replace(spec, cusps=cusps)
        with pytest.raises(InvalidSurface):
            SurfaceModel(spec)

    def test_word_inverse_consistency(self, sphere):
        for s in sphere.sides:
            p = sphere.sides[s.partner]
            assert inverse_word(s.word) == p.word
