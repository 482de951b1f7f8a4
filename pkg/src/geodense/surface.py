"""Surface models: polygon, side pairings, cusp charts, point reduction.

A model is built from a raw catalog entry and validated geometrically:
side pairings must match endpoints, cusp words must be parabolic and act
as unit translations in their charts, the relator must collapse to the
identity, and the polygon area must match the Euler characteristic.

The polygon is convex with counterclockwise vertex order, so membership
is the intersection of the half-planes left of each oriented side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .catalog import CATALOG, SurfaceSpec, surface_names
from .errors import InvalidSurface, NotHyperbolic, RelatorFails, TraceError
from .halfplane import (
    INF,
    GeodesicLine,
    Horocycle,
    Isometry,
    angle_between,
)
from .tolerances import TOL_ALG, TOL_GEO, TOL_LOOSE
from .words import inverse_word


def _is_ideal(v) -> bool:
    return not isinstance(v, complex)


def line_through_vertices(v_start, v_end) -> GeodesicLine:
    """Oriented geodesic from one polygon vertex to the next; vertices
    may be ideal (floats) or finite (complex)."""
    si, ei = _is_ideal(v_start), _is_ideal(v_end)
    if si and ei:
        return GeodesicLine.from_endpoints(v_start, v_end)
    if si and not ei:
        z = v_end
        if math.isinf(v_start):
            return GeodesicLine.vertical(z.real, up=False)
        if abs(z.real - v_start) <= TOL_ALG:
            return GeodesicLine.vertical(z.real, up=True)
        c = (abs(z) ** 2 - v_start ** 2) / (2.0 * (z.real - v_start))
        return GeodesicLine.from_endpoints(v_start, 2.0 * c - v_start)
    if ei and not si:
        return line_through_vertices(v_end, v_start).reversed()
    return GeodesicLine.from_points(v_start, v_end)


@dataclass(frozen=True)
class Side:
    """One polygon side with its pairing."""

    index: int
    line: GeodesicLine          # oriented from vertex index to index+1
    s_lo: float                 # parameter window; may be -inf / +inf
    s_hi: float
    word: str
    pairing: Isometry           # maps this side onto the partner side
    partner: int


@dataclass(frozen=True)
class Cusp:
    """One cusp with its chart to infinity."""

    index: int
    vertex: float
    vertex_index: int
    chart: Isometry             # vertex -> infinity, cusp word -> z + width
    width: float
    word: str
    strip_lo: float             # chart image of the polygon corner wedge:
                                # vertical strip [strip_lo, strip_lo + width]


class SurfaceModel:
    """A punctured hyperbolic surface given by a convex polygon with
    side pairings, ready for point reduction and tracing."""

    def __init__(self, spec: SurfaceSpec):
        self.spec = spec
        self.name = spec.name
        self.genus = spec.genus
        self.n_cusps = spec.n_cusps
        self.base_point = spec.base_point
        self._gens: dict[str, Isometry] = {}
        for i, ch in enumerate(spec.gen_names):
            g = Isometry.from_matrix(spec.gen_matrices[i])
            self._gens[ch] = g
            self._gens[ch.upper()] = g.inverse()
        self._word_cache: dict[str, Isometry] = {"": Isometry.identity()}
        self.sides = self._build_sides()
        self.cusps = self._build_cusps()
        self._validate()

    # -- words ---------------------------------------------------------------

    def word_iso(self, word: str) -> Isometry:
        """Isometry of a word; "xy" acts as x after y."""
        got = self._word_cache.get(word)
        if got is not None:
            return got
        g = Isometry.identity()
        for ch in word:
            if ch not in self._gens:
                raise ValueError(f"unknown generator letter {ch!r}")
            g = g @ self._gens[ch]
        if len(self._word_cache) < 4096:
            self._word_cache[word] = g
        return g

    def generator(self, ch: str) -> Isometry:
        return self._gens[ch]

    # -- construction --------------------------------------------------------

    def _build_sides(self) -> tuple[Side, ...]:
        spec = self.spec
        k = len(spec.vertices)
        sides = []
        for i in range(k):
            v0 = spec.vertices[i]
            v1 = spec.vertices[(i + 1) % k]
            line = line_through_vertices(v0, v1)
            s_lo = -INF if _is_ideal(v0) else line.param_of(v0)
            s_hi = INF if _is_ideal(v1) else line.param_of(v1)
            sides.append(Side(i, line, s_lo, s_hi, spec.side_words[i],
                              self.word_iso(spec.side_words[i]),
                              spec.side_partners[i]))
        return tuple(sides)

    def _build_cusps(self) -> tuple[Cusp, ...]:
        spec = self.spec
        k = len(spec.vertices)
        cusps = []
        for j, cs in enumerate(spec.cusps):
            v = spec.vertices[cs.vertex_index]
            if not _is_ideal(v):
                raise InvalidSurface(f"cusp {j} vertex is not ideal")
            chart = Isometry.from_matrix(cs.chart)
            # the two sides meeting the vertex map to the walls of a
            # vertical strip of the chart width
            before = self.sides[(cs.vertex_index - 1) % k]
            after = self.sides[cs.vertex_index]
            feet = []
            for side in (before, after):
                img = chart.apply_line(side.line)
                if not img.is_vertical:
                    raise InvalidSurface(
                        f"cusp {j}: adjacent side {side.index} does not "
                        f"map to a chart wall")
                feet.append(img.foot)
            lo = min(feet)
            if abs(max(feet) - lo - cs.width) > TOL_GEO:
                raise InvalidSurface(
                    f"cusp {j}: wall separation {max(feet) - lo:.6g} does "
                    f"not match width {cs.width}")
            cusps.append(Cusp(j, v, cs.vertex_index, chart, cs.width,
                              cs.word, lo))
        return tuple(cusps)

    # -- membership and levels ----------------------------------------------

    def side_signed_dists(self, z: complex) -> list[float]:
        return [s.line.signed_sinh_dist(z) for s in self.sides]

    def inside(self, z: complex, tol: float = TOL_GEO) -> bool:
        return all(d >= -tol for d in self.side_signed_dists(z))

    def level(self, j: int, z: complex) -> float:
        """Length of the cusp-j horocycle through z, measured in the chart.

        Meaningful as a cusp excursion depth when z is the polygon
        representative of the point.
        """
        c = self.cusps[j]
        y = c.chart.apply(z).imag
        return c.width / y

    def levels(self, z: complex) -> list[float]:
        return [self.level(j, z) for j in range(len(self.cusps))]

    def min_level(self, z: complex) -> float:
        return min(self.levels(z))

    def in_truncation(self, z: complex, xi: float, tol: float = TOL_GEO) -> bool:
        """Is the polygon point z in the part bounded by the length-xi
        horocycles (outside all open xi-horoballs)."""
        return self.min_level(z) >= xi - tol

    def cusp_horocycle(self, j: int, length: float) -> Horocycle:
        """Horocycle of given length around cusp j, in polygon coordinates."""
        c = self.cusps[j]
        chart_h = Horocycle(INF, c.width / length)
        return c.chart.inverse().apply_horocycle(chart_h)

    # -- reduction -----------------------------------------------------------

    def normalize(self, z: complex, max_steps: int = 20000):
        """Reduce a point of the half-plane into the polygon.

        Returns (point, iso, word) with iso the applied deck element
        (point = iso(z)) and word its letters.
        """
        g = Isometry.identity()
        word = ""
        for _ in range(max_steps):
            if self.inside(z):
                return z, g, word
            moved = False
            for c in self.cusps:
                zc = c.chart.apply(z)
                if zc.imag > c.width:        # deeper than the unit horocycle
                    k = math.floor((zc.real - c.strip_lo) / c.width)
                    if k != 0:
                        step = (c.chart.inverse()
                                @ Isometry.translation(-k * c.width)
                                @ c.chart)
                        z = step.apply(z)
                        g = step @ g
                        w = c.word if k < 0 else inverse_word(c.word)
                        word = w * abs(k) + word
                        moved = True
                        break
            if moved:
                continue
            dists = self.side_signed_dists(z)
            i = min(range(len(dists)), key=lambda t: dists[t])
            if dists[i] >= -TOL_GEO:
                return z, g, word
            side = self.sides[i]
            z = side.pairing.apply(z)
            g = side.pairing @ g
            word = side.word + word
        raise TraceError(f"point reduction did not terminate for {z}")

    # -- axes ----------------------------------------------------------------

    def axis_of(self, word: str) -> tuple[GeodesicLine, float]:
        """Translation axis and length of a hyperbolic word."""
        g = self.word_iso(word)
        if not g.is_hyperbolic():
            raise NotHyperbolic(
                f"word {word!r} has trace {g.trace():.6g}")
        return g.axis(), g.translation_length()

    # -- validation ----------------------------------------------------------

    def _side_chart_top(self, chart: Isometry, side: Side) -> float:
        """Maximal height reached by the image of a side segment in a
        cusp chart."""
        k = len(self.spec.vertices)
        line = chart.apply_line(side.line)
        xs = []
        top = 0.0
        for v in (self.spec.vertices[side.index],
                  self.spec.vertices[(side.index + 1) % k]):
            if _is_ideal(v):
                e = chart.apply_boundary(v)
                if math.isinf(e):
                    return math.inf
                xs.append(e)
            else:
                w = chart.apply(v)
                xs.append(w.real)
                top = max(top, w.imag)
        if line.is_vertical:
            return top
        # x runs monotonically along a half-circle arc, so the apex is
        # on the segment exactly when the center sits between the ends
        if min(xs) < line.center < max(xs):
            top = max(top, line.radius)
        return top

    def _vertex_angle(self, i: int) -> float:
        """Interior angle at vertex i (0.0 at ideal vertices)."""
        if _is_ideal(self.spec.vertices[i]):
            return 0.0
        z = self.spec.vertices[i]
        k = len(self.spec.vertices)
        incoming = self.sides[(i - 1) % k]
        outgoing = self.sides[i]
        u = -incoming.line.tangent_at(incoming.line.param_of(z))
        v = outgoing.line.tangent_at(outgoing.line.param_of(z))
        return angle_between(u, v)

    def polygon_area(self) -> float:
        k = len(self.spec.vertices)
        return (k - 2) * math.pi - sum(self._vertex_angle(i) for i in range(k))

    def _match_vertex(self, image, vertex) -> bool:
        if _is_ideal(vertex):
            if math.isinf(vertex):
                return math.isinf(image) or abs(image) > 1e12
            return not math.isinf(image) and abs(image - vertex) <= TOL_LOOSE
        return abs(image - vertex) <= TOL_LOOSE

    def _validate(self) -> None:
        spec = self.spec
        k = len(spec.vertices)
        for i, ch in enumerate(spec.gen_names):
            m = spec.gen_matrices[i]
            raw_det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            if abs(raw_det - 1.0) > TOL_GEO:
                raise InvalidSurface(f"generator {ch} is not unimodular")

        for s in self.sides:
            p = self.sides[s.partner]
            if p.partner != s.index:
                raise InvalidSurface(f"side pairing not involutive at {s.index}")
            if s.index != p.index and inverse_word(s.word) != p.word:
                raise InvalidSurface(
                    f"pairing words of sides {s.index}/{p.partner} not inverse")
            # the pairing reverses boundary orientation: start -> end
            v0 = spec.vertices[s.index]
            v1 = spec.vertices[(s.index + 1) % k]
            w0 = spec.vertices[p.index]
            w1 = spec.vertices[(p.index + 1) % k]
            img0 = s.pairing.apply_boundary(v0) if _is_ideal(v0) \
                else s.pairing.apply(v0)
            img1 = s.pairing.apply_boundary(v1) if _is_ideal(v1) \
                else s.pairing.apply(v1)
            if not (self._match_vertex(img0, w1) and self._match_vertex(img1, w0)):
                raise InvalidSurface(
                    f"side {s.index} does not map onto side {s.partner}")

        for c in self.cusps:
            g = self.word_iso(c.word)
            if abs(abs(g.trace()) - 2.0) > TOL_GEO:
                raise InvalidSurface(f"cusp word {c.word!r} is not parabolic")
            conj = c.chart @ g @ c.chart.inverse()
            if not conj.approx_equal(Isometry.translation(c.width), tol=TOL_LOOSE):
                raise InvalidSurface(
                    f"cusp word {c.word!r} is not the chart translation")
            if not self._match_vertex(c.chart.apply_boundary(c.vertex), INF):
                raise InvalidSurface(f"cusp chart {c.index} misses infinity")
            # every non-adjacent side must stay below the unit horocycle
            # of the chart, so deep points reduce inside the corner wedge
            adj = {(c.vertex_index - 1) % k, c.vertex_index}
            for s in self.sides:
                if s.index in adj:
                    continue
                if self._side_chart_top(c.chart, s) >= c.width - TOL_GEO:
                    raise InvalidSurface(
                        f"side {s.index} climbs into the cusp {c.index} wedge")

        r = self.word_iso(spec.relator)
        if not r.is_identity(tol=TOL_LOOSE):
            raise RelatorFails(f"relator {spec.relator!r} is not the identity")

        want = 2.0 * math.pi * (2 * spec.genus - 2 + spec.n_cusps)
        if abs(self.polygon_area() - want) > 1e-6:
            raise InvalidSurface(
                f"polygon area {self.polygon_area():.9g} does not match "
                f"Euler characteristic value {want:.9g}")

        if not self.inside(spec.base_point):
            raise InvalidSurface("base point is outside the polygon")


def load_surface(name: str) -> SurfaceModel:
    """Build and validate a catalog surface."""
    spec = CATALOG.get(name)
    if spec is None:
        raise ValueError(
            f"unknown surface {name!r}; available: {', '.join(surface_names())}")
    return SurfaceModel(spec)
