"""Geometry of the hyperbolic upper half-plane.

Points are complex numbers with positive imaginary part.  Boundary points
are floats, with ``math.inf`` standing for the point at infinity.  Geodesics
are Euclidean semicircles centered on the real axis or vertical rays, and
carry an orientation together with a unit-speed arclength parameter.

Parameter conventions:
  * vertical through a, oriented up: point(s) = a + i e^s
  * semicircle center c radius r, oriented from c+r to c-r:
    point(s) = c + r e^{i phi} with phi = 2 atan(e^s)
so the parameter of a point splits as log|z - e_back| - log|z - e_fwd| up to
the cases at infinity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import HorocyclesIntersect, NoSharedEndpoint
from .tolerances import TOL_ALG, TOL_GEO

INF = math.inf


def clamp(x: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return lo if x < lo else hi if x > hi else x


# ---------------------------------------------------------------------------
# distances between points

def cosh_dist(z1: complex, z2: complex) -> float:
    dx = z1.real - z2.real
    dy = z1.imag - z2.imag
    return 1.0 + (dx * dx + dy * dy) / (2.0 * z1.imag * z2.imag)


def dist(z1: complex, z2: complex) -> float:
    """Hyperbolic distance between two points of the upper half-plane."""
    c = cosh_dist(z1, z2)
    if c <= 1.0:
        return 0.0
    return math.acosh(c)


def angle_between(u: complex, v: complex) -> float:
    """Angle in [0, pi] between two nonzero tangent vectors at a point."""
    d = (u.real * v.real + u.imag * v.imag) / (abs(u) * abs(v))
    return math.acos(clamp(d))


def folded_angle(u: complex, v: complex) -> float:
    """Angle in [0, pi/2] between the unoriented lines spanned by u and v."""
    a = angle_between(u, v)
    return a if a <= math.pi / 2 else math.pi - a


# ---------------------------------------------------------------------------
# geodesic lines

@dataclass(frozen=True)
class GeodesicLine:
    """Oriented complete geodesic.

    ``is_vertical`` selects the vertical case; then ``foot`` is the real
    basepoint and ``up`` the orientation.  Otherwise ``center``/``radius``
    describe the semicircle and ``pos_to_neg`` is True when the orientation
    runs from center+radius to center-radius.
    """

    is_vertical: bool
    foot: float = 0.0
    up: bool = True
    center: float = 0.0
    radius: float = 0.0
    pos_to_neg: bool = True

    # -- constructors -------------------------------------------------------

    @staticmethod
    def vertical(a: float, up: bool = True) -> "GeodesicLine":
        return GeodesicLine(is_vertical=True, foot=a, up=up)

    @staticmethod
    def circle(c: float, r: float, pos_to_neg: bool = True) -> "GeodesicLine":
        if r <= 0:
            raise ValueError("radius must be positive")
        return GeodesicLine(is_vertical=False, center=c, radius=r,
                            pos_to_neg=pos_to_neg)

    @staticmethod
    def from_endpoints(e_back: float, e_fwd: float) -> "GeodesicLine":
        """Geodesic oriented from boundary point e_back to e_fwd."""
        if math.isinf(e_back) and math.isinf(e_fwd):
            raise ValueError("coincident ideal endpoints")
        if math.isinf(e_fwd):
            return GeodesicLine.vertical(e_back, up=True)
        if math.isinf(e_back):
            return GeodesicLine.vertical(e_fwd, up=False)
        if abs(e_back - e_fwd) <= TOL_ALG * max(1.0, abs(e_back)):
            raise ValueError("coincident ideal endpoints")
        c = 0.5 * (e_back + e_fwd)
        r = 0.5 * abs(e_back - e_fwd)
        return GeodesicLine.circle(c, r, pos_to_neg=(e_back > e_fwd))

    @staticmethod
    def from_points(z1: complex, z2: complex) -> "GeodesicLine":
        """Geodesic through two distinct points, oriented z1 -> z2."""
        if abs(z1 - z2) <= TOL_GEO:
            raise ValueError("coincident points")
        dx = z2.real - z1.real
        if abs(dx) <= TOL_GEO * max(1.0, abs(z1.imag), abs(z2.imag)):
            return GeodesicLine.vertical(0.5 * (z1.real + z2.real),
                                         up=(z2.imag > z1.imag))
        # center equidistant from both points on the real axis
        c = ((abs(z2) ** 2 - abs(z1) ** 2) / (2.0 * dx))
        r = abs(z1 - c)
        # forward tangent at z1 along pos_to_neg is i(z1-c)/r
        t = 1j * (z1 - c) / r
        dot = t.real * dx + t.imag * (z2.imag - z1.imag)
        return GeodesicLine.circle(c, r, pos_to_neg=(dot > 0))

    @staticmethod
    def from_point_direction(z: complex, u: complex) -> "GeodesicLine":
        """Geodesic through z with forward unit tangent parallel to u."""
        if abs(u) <= TOL_GEO:
            raise ValueError("zero direction")
        if abs(u.real) <= TOL_GEO * abs(u):
            return GeodesicLine.vertical(z.real, up=(u.imag > 0))
        c = z.real + z.imag * (u.imag / u.real)
        r = abs(z - c)
        t = 1j * (z - c) / r
        dot = t.real * u.real + t.imag * u.imag
        return GeodesicLine.circle(c, r, pos_to_neg=(dot > 0))

    # -- endpoints ----------------------------------------------------------

    @property
    def endpoint_fwd(self) -> float:
        if self.is_vertical:
            return INF if self.up else self.foot
        return self.center - self.radius if self.pos_to_neg \
            else self.center + self.radius

    @property
    def endpoint_back(self) -> float:
        if self.is_vertical:
            return self.foot if self.up else INF
        return self.center + self.radius if self.pos_to_neg \
            else self.center - self.radius

    def reversed(self) -> "GeodesicLine":
        if self.is_vertical:
            return GeodesicLine.vertical(self.foot, up=not self.up)
        return GeodesicLine.circle(self.center, self.radius,
                                   pos_to_neg=not self.pos_to_neg)

    # -- parametrization ----------------------------------------------------

    def point_at(self, s: float) -> complex:
        if self.is_vertical:
            return complex(self.foot, math.exp(s if self.up else -s))
        phi = 2.0 * math.atan(math.exp(s if self.pos_to_neg else -s))
        return complex(self.center + self.radius * math.cos(phi),
                       self.radius * math.sin(phi))

    def tangent_at(self, s: float) -> complex:
        """Forward unit tangent (Euclidean) at the point with parameter s."""
        if self.is_vertical:
            return 1j if self.up else -1j
        phi = 2.0 * math.atan(math.exp(s if self.pos_to_neg else -s))
        t = 1j * cmath.exp(1j * phi)
        return t if self.pos_to_neg else -t

    def param_of(self, z: complex) -> float:
        """Arclength parameter of the orthogonal projection of z."""
        if self.is_vertical:
            s = math.log(abs(z - self.foot))
            return s if self.up else -s
        p = self.center + self.radius   # back end when pos_to_neg
        q = self.center - self.radius
        s = math.log(abs(z - p)) - math.log(abs(z - q))
        return s if self.pos_to_neg else -s

    def project(self, z: complex) -> complex:
        """Foot of the perpendicular from z onto the line."""
        return self.point_at(self.param_of(z))

    # -- metric queries ------------------------------------------------------

    def signed_sinh_dist(self, z: complex) -> float:
        """sinh of the distance from z, signed by the side of the line.

        Positive on the left of the oriented line (the side the rotated
        tangent i*t points into).
        """
        if self.is_vertical:
            v = (self.foot - z.real) / z.imag
            return v if self.up else -v
        v = (abs(z - self.center) ** 2 - self.radius ** 2) \
            / (2.0 * self.radius * z.imag)
        return -v if self.pos_to_neg else v

    def dist_to(self, z: complex) -> float:
        return math.asinh(abs(self.signed_sinh_dist(z)))

    def contains(self, z: complex, tol: float = TOL_GEO) -> bool:
        return abs(self.signed_sinh_dist(z)) <= tol


def same_line(l1: GeodesicLine, l2: GeodesicLine, tol: float = TOL_GEO) -> bool:
    """True when the two lines coincide as unoriented geodesics."""
    if l1.is_vertical != l2.is_vertical:
        return False
    if l1.is_vertical:
        return abs(l1.foot - l2.foot) <= tol
    return abs(l1.center - l2.center) <= tol and \
        abs(l1.radius - l2.radius) <= tol


# ---------------------------------------------------------------------------
# intersections and crossings

def _boundary_angle(xi: float) -> float:
    """Embed the boundary circle: finite xi -> 2 atan(xi), inf -> pi."""
    if math.isinf(xi):
        return math.pi
    return 2.0 * math.atan(xi)


def _in_open_arc(a: float, b: float, x: float) -> bool:
    """Is angle x strictly inside the ccw arc from a to b."""
    twopi = 2.0 * math.pi
    return (x - a) % twopi < (b - a) % twopi and abs((x - a) % twopi) > 0


def lines_cross(l1: GeodesicLine, l2: GeodesicLine) -> bool:
    """True when the complete geodesics intersect transversally.

    Decided by interleaving of ideal endpoints on the boundary circle;
    shared endpoints count as non-crossing.
    """
    a1 = _boundary_angle(l1.endpoint_back)
    a2 = _boundary_angle(l1.endpoint_fwd)
    b1 = _boundary_angle(l2.endpoint_back)
    b2 = _boundary_angle(l2.endpoint_fwd)
    for b in (b1, b2):
        if min(abs(b - a1), abs(b - a2)) <= TOL_ALG:
            return False
    return _in_open_arc(a1, a2, b1) != _in_open_arc(a1, a2, b2)


def intersect_lines(l1: GeodesicLine, l2: GeodesicLine):
    """Intersection point of two geodesics, or None if disjoint."""
    if l1.is_vertical and l2.is_vertical:
        return None
    if l1.is_vertical or l2.is_vertical:
        v, c = (l1, l2) if l1.is_vertical else (l2, l1)
        y2 = c.radius ** 2 - (v.foot - c.center) ** 2
        if y2 <= TOL_ALG ** 2:
            return None
        return complex(v.foot, math.sqrt(y2))
    dc = l2.center - l1.center
    if abs(dc) <= TOL_ALG:
        return None
    x = (l1.radius ** 2 - l2.radius ** 2
         + l2.center ** 2 - l1.center ** 2) / (2.0 * dc)
    y2 = l1.radius ** 2 - (x - l1.center) ** 2
    if y2 <= TOL_ALG ** 2:
        return None
    return complex(x, math.sqrt(y2))


def crossing_angle(l1: GeodesicLine, l2: GeodesicLine, z: complex) -> float:
    """Unoriented crossing angle in (0, pi/2] at a common point z."""
    u = l1.tangent_at(l1.param_of(z))
    v = l2.tangent_at(l2.param_of(z))
    return folded_angle(u, v)


def dist_lines(l1: GeodesicLine, l2: GeodesicLine):
    """Distance between two complete geodesics with the perpendicular feet.

    Returns (d, s1, s2) where s1, s2 are the foot parameters on each line.
    Crossing or asymptotic lines give (0.0, None, None).
    """
    if lines_cross(l1, l2):
        return 0.0, None, None
    p, q = l1.endpoint_back, l1.endpoint_fwd
    u, v = l2.endpoint_back, l2.endpoint_fwd
    ends = [p, q, u, v]
    for i in range(2):
        for j in range(2, 4):
            e1, e2 = ends[i], ends[j]
            if e1 == e2 or (not math.isinf(e1) and not math.isinf(e2)
                            and abs(e1 - e2) <= TOL_ALG):
                return 0.0, None, None
    # send l1 to the imaginary axis (p -> 0, q -> infinity, det > 0)
    if math.isinf(q):
        T = Isometry(1.0, -p, 0.0, 1.0)
    elif math.isinf(p):
        T = Isometry(0.0, -1.0, 1.0, -q)
    elif p > q:
        T = Isometry(1.0, -p, 1.0, -q)
    else:
        T = Isometry(-1.0, p, 1.0, -q)
    tu = T.apply_boundary(u)
    tv = T.apply_boundary(v)
    # image of l2 is the circle over the diameter [tu, tv]
    c = 0.5 * (tu + tv)
    r = 0.5 * abs(tu - tv)
    if abs(c) <= r + TOL_ALG:
        return 0.0, None, None
    # distance from the imaginary axis to circle(c, r): sinh d = rho/r
    # with rho^2 = c^2 - r^2; feet at i rho and ((c^2-r^2)/c, r rho/|c|)
    rho2 = c * c - r * r
    rho = math.sqrt(rho2)
    d = math.asinh(rho / r)
    foot1 = complex(0.0, rho)
    foot2 = complex(rho2 / c, r * rho / abs(c))
    inv = T.inverse()
    z1 = inv.apply(foot1)
    z2 = inv.apply(foot2)
    return d, l1.param_of(z1), l2.param_of(z2)


# ---------------------------------------------------------------------------
# segments

@dataclass(frozen=True)
class GeodesicSegment:
    """Directed compact arc of a geodesic: parameters s0 <= s <= s1."""

    line: GeodesicLine
    s0: float
    s1: float

    def __post_init__(self):
        if self.s1 < self.s0 - TOL_GEO:
            raise ValueError("segment parameters out of order")

    @staticmethod
    def between(z1: complex, z2: complex) -> "GeodesicSegment":
        line = GeodesicLine.from_points(z1, z2)
        a = line.param_of(z1)
        b = line.param_of(z2)
        return GeodesicSegment(line, min(a, b), max(a, b))

    @property
    def start(self) -> complex:
        return self.line.point_at(self.s0)

    @property
    def end(self) -> complex:
        return self.line.point_at(self.s1)

    @property
    def length(self) -> float:
        return self.s1 - self.s0

    def point_at(self, s: float) -> complex:
        return self.line.point_at(s)

    def point_at_fraction(self, t: float) -> complex:
        return self.line.point_at(self.s0 + t * (self.s1 - self.s0))

    def contains_param(self, s: float, tol: float = TOL_GEO) -> bool:
        return self.s0 - tol <= s <= self.s1 + tol

    def reversed(self) -> "GeodesicSegment":
        return GeodesicSegment(self.line.reversed(), -self.s1, -self.s0)

    def subsegment(self, a: float, b: float) -> "GeodesicSegment":
        return GeodesicSegment(self.line, a, b)

    def dist_to_point(self, z: complex) -> float:
        # clamping the projection parameter stays finite even for
        # segments with ideal ends (infinite parameter window)
        s = clamp(self.line.param_of(z), self.s0, self.s1)
        return dist(z, self.line.point_at(s))


def segments_cross(g1: GeodesicSegment, g2: GeodesicSegment,
                   tol: float = TOL_GEO):
    """Transversal interior crossing point of two segments, or None."""
    if same_line(g1.line, g2.line):
        return None
    z = intersect_lines(g1.line, g2.line)
    if z is None:
        return None
    s1 = g1.line.param_of(z)
    s2 = g2.line.param_of(z)
    if g1.s0 + tol < s1 < g1.s1 - tol and g2.s0 + tol < s2 < g2.s1 - tol:
        return z
    return None


def dist_segments(g1: GeodesicSegment, g2: GeodesicSegment) -> float:
    """Distance between two geodesic segments."""
    if segments_cross(g1, g2, tol=0.0) is not None:
        return 0.0
    best = min(g1.dist_to_point(g2.start), g1.dist_to_point(g2.end),
               g2.dist_to_point(g1.start), g2.dist_to_point(g1.end))
    if not same_line(g1.line, g2.line):
        d, f1, f2 = dist_lines(g1.line, g2.line)
        if f1 is not None and g1.contains_param(f1) and g2.contains_param(f2):
            best = min(best, d)
    return best


def angle_at(g1: GeodesicSegment, g2: GeodesicSegment,
             tol: float = TOL_GEO) -> float:
    """Angle in [0, pi] between two segments at their shared endpoint.

    Measured between the tangent directions pointing from the shared
    endpoint into each segment.
    """
    for (s1, u1) in ((g1.s0, 1.0), (g1.s1, -1.0)):
        for (s2, u2) in ((g2.s0, 1.0), (g2.s1, -1.0)):
            if abs(g1.point_at(s1) - g2.point_at(s2)) <= tol:
                t1 = u1 * g1.line.tangent_at(s1)
                t2 = u2 * g2.line.tangent_at(s2)
                return angle_between(t1, t2)
    raise NoSharedEndpoint("segments do not share an endpoint")


# ---------------------------------------------------------------------------
# horocycles

@dataclass(frozen=True)
class Horocycle:
    """Horocycle based at a boundary point.

    For a finite base this is the Euclidean circle of diameter ``size``
    tangent to the real axis; for the base at infinity it is the horizontal
    line at height ``size``.
    """

    base: float
    size: float

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("horocycle size must be positive")

    @staticmethod
    def through(base: float, z: complex) -> "Horocycle":
        if math.isinf(base):
            return Horocycle(base, z.imag)
        return Horocycle(base, abs(z - base) ** 2 / z.imag)

    def contains_in_ball(self, z: complex, tol: float = TOL_GEO) -> bool:
        """Is z inside or on the closed horoball."""
        if math.isinf(self.base):
            return z.imag >= self.size - tol
        c = complex(self.base, 0.5 * self.size)
        return abs(z - c) <= 0.5 * self.size + tol

    def on_horocycle(self, z: complex, tol: float = TOL_GEO) -> bool:
        if math.isinf(self.base):
            return abs(z.imag - self.size) <= tol
        c = complex(self.base, 0.5 * self.size)
        return abs(abs(z - c) - 0.5 * self.size) <= tol

    def tangent_at(self, z: complex) -> complex:
        """A unit Euclidean tangent direction of the horocycle at z."""
        if math.isinf(self.base):
            return 1.0 + 0.0j
        c = complex(self.base, 0.5 * self.size)
        v = z - c
        return 1j * v / abs(v)


def horoball_gap(h1: Horocycle, h2: Horocycle) -> float:
    """Signed distance between two horoballs along their common geodesic.

    Positive when the closed horoballs are disjoint.
    """
    if math.isinf(h1.base) and math.isinf(h2.base):
        raise ValueError("horoballs share the base point")
    if math.isinf(h1.base) or math.isinf(h2.base):
        top, fin = (h1, h2) if math.isinf(h1.base) else (h2, h1)
        return math.log(top.size) - math.log(fin.size)
    if abs(h1.base - h2.base) <= TOL_ALG:
        raise ValueError("horoballs share the base point")
    return 2.0 * math.log(abs(h1.base - h2.base)) \
        - math.log(h1.size) - math.log(h2.size)


def horo_chord(arc_length: float) -> float:
    """Geodesic chord length subtending a horocyclic arc of given length."""
    return 2.0 * math.asinh(arc_length / 2.0)


def horo_arc(chord_length: float) -> float:
    """Horocyclic arc length subtended by a geodesic chord of given length."""
    return 2.0 * math.sinh(chord_length / 2.0)


def angle_with_horocycle(line: GeodesicLine, h: Horocycle,
                         z: complex) -> float:
    """Angle in [0, pi/2] between a geodesic and a horocycle at a common z."""
    u = line.tangent_at(line.param_of(z))
    return folded_angle(u, h.tangent_at(z))


def line_horocycle_crossings(line: GeodesicLine,
                             h: Horocycle) -> list[tuple[float, complex]]:
    """Transverse crossings of a geodesic with a horocycle, as (param,
    point) pairs sorted by line parameter.

    A geodesic ending at the base point crosses once; one missing the
    horoball entirely crosses zero times; tangency counts as none.
    """
    if math.isinf(h.base):
        c = h.size
        if line.is_vertical:
            s = math.log(c) if line.up else -math.log(c)
            return [(s, complex(line.foot, c))]
        if line.radius <= c:
            return []
        dx = math.sqrt(line.radius ** 2 - c * c)
        out = []
        for x in (line.center - dx, line.center + dx):
            z = complex(x, c)
            out.append((line.param_of(z), z))
        out.sort(key=lambda t: t[0])
        return out
    # send the base to infinity; the horocycle becomes the height 1/size
    to_inf = Isometry(0.0, 1.0, -1.0, h.base)
    img = to_inf.apply_line(line)
    back = to_inf.inverse()
    out = []
    for _, w in line_horocycle_crossings(img, Horocycle(INF, 1.0 / h.size)):
        z = back.apply(w)
        out.append((line.param_of(z), z))
    out.sort(key=lambda t: t[0])
    return out


def horocycle_perpendicular(h1: Horocycle, h2: Horocycle) -> GeodesicSegment:
    """Common perpendicular segment between two disjoint horocycles.

    Runs along the geodesic joining the base points, from h1 to h2; its
    length equals the horoball gap.  Along this geodesic the horocycle
    size through the moving point decays exponentially, which gives the
    endpoint parameters in closed form.
    """
    gap = horoball_gap(h1, h2)
    if gap <= TOL_ALG:
        raise HorocyclesIntersect(f"horoball gap {gap:.3g} is not positive")
    line = GeodesicLine.from_endpoints(h1.base, h2.base)
    if math.isinf(h1.base):
        # vertical, oriented down toward h2.base: point(s) = base + i e^{-s}
        s1 = -math.log(h1.size)
        s2 = -math.log(h2.size)
    elif math.isinf(h2.base):
        s1 = math.log(h1.size)
        s2 = math.log(h2.size)
    else:
        # at the circle top the horocycle size through the point is 2r
        # for either base; it shrinks as e^{-|s|} toward each end
        two_r = 2.0 * line.radius
        s1 = math.log(h1.size / two_r)
        s2 = math.log(two_r / h2.size)
    return GeodesicSegment(line, s1, s2)


# ---------------------------------------------------------------------------
# isometries

@dataclass(frozen=True)
class Isometry:
    """Isometry of the upper half-plane.

    Direct maps act as z -> (az+b)/(cz+d) with ad-bc = 1; orientation
    reversing maps act on the conjugate, z -> (a zbar + b)/(c zbar + d),
    and preserve the half-plane exactly when ad-bc = -1.
    """

    a: float
    b: float
    c: float
    d: float
    reversing: bool = False

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def translation(t: float) -> "Isometry":
        return Isometry(1.0, t, 0.0, 1.0)

    @staticmethod
    def from_matrix(m, reversing: bool = False) -> "Isometry":
        return Isometry(float(m[0][0]), float(m[0][1]),
                        float(m[1][0]), float(m[1][1]),
                        reversing=reversing).normalized()

    @staticmethod
    def point_frame(z: complex, u: complex) -> "Isometry":
        """The unique direct isometry taking (i, up) to (z, direction of u).

        Composing ``point_frame(z2, u2) @ point_frame(z1, u1).inverse()``
        gives the unique direct isometry taking one pointed frame to the
        other, which is how local coordinate charts are moved around.
        """
        x, y = z.real, z.imag
        if y <= 0:
            raise ValueError("frame base point must be in the upper half-plane")
        ry = math.sqrt(y)
        shift = Isometry(ry, x / ry, 0.0, 1.0 / ry)
        phi = math.atan2(u.imag, u.real) - 0.5 * math.pi
        ch, sh = math.cos(0.5 * phi), math.sin(0.5 * phi)
        return shift @ Isometry(ch, sh, -sh, ch)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def normalized(self) -> "Isometry":
        """Scale so |det| = 1 and fix the projective sign."""
        dt = self.det()
        want = -1.0 if self.reversing else 1.0
        if dt * want <= 0:
            raise ValueError(
                f"determinant sign {dt:+.3g} inconsistent with "
                f"reversing={self.reversing}")
        s = 1.0 / math.sqrt(abs(dt))
        a, b, c, d = self.a * s, self.b * s, self.c * s, self.d * s
        if a < -TOL_ALG or (abs(a) <= TOL_ALG and b < 0) \
                or (abs(a) <= TOL_ALG and abs(b) <= TOL_ALG and c < 0):
            a, b, c, d = -a, -b, -c, -d
        return Isometry(a, b, c, d, self.reversing)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other (matrix product; reversing flags add mod 2)."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return Isometry(a, b, c, d,
                        self.reversing != other.reversing).normalized()

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return self.compose(other)

    def inverse(self) -> "Isometry":
        # for det -1 the adjugate has det -1 again, which is what we store
        return Isometry(self.d, -self.b, -self.c, self.a,
                        self.reversing).normalized()

    # -- actions ------------------------------------------------------------

    def apply(self, z: complex) -> complex:
        w = z.conjugate() if self.reversing else z
        return (self.a * w + self.b) / (self.c * w + self.d)

    def apply_boundary(self, x: float) -> float:
        if math.isinf(x):
            return self.a / self.c if abs(self.c) > TOL_ALG else INF
        den = self.c * x + self.d
        if abs(den) <= TOL_ALG * max(1.0, abs(x)):
            return INF
        return (self.a * x + self.b) / den

    def apply_tangent(self, z: complex, u: complex) -> complex:
        """Image of a tangent vector u at z, returned as a unit vector."""
        if self.reversing:
            den = self.c * z.conjugate() + self.d
            v = -u.conjugate() / (den * den)
        else:
            den = self.c * z + self.d
            v = u / (den * den)
        return v / abs(v)

    def apply_line(self, line: GeodesicLine) -> GeodesicLine:
        e1 = self.apply_boundary(line.endpoint_back)
        e2 = self.apply_boundary(line.endpoint_fwd)
        return GeodesicLine.from_endpoints(e1, e2)

    def apply_segment(self, seg: GeodesicSegment) -> GeodesicSegment:
        line = self.apply_line(seg.line)
        a = line.param_of(self.apply(seg.start))
        b = line.param_of(self.apply(seg.end))
        if b < a:
            raise ValueError("orientation lost while mapping a segment")
        return GeodesicSegment(line, a, b)

    def apply_horocycle(self, h: Horocycle) -> Horocycle:
        base = self.apply_boundary(h.base)
        probe = complex(0.0, h.size) if math.isinf(h.base) \
            else complex(h.base, h.size)          # a point on the horocycle
        return Horocycle.through(base, self.apply(probe))

    # -- classification -----------------------------------------------------

    def trace(self) -> float:
        return self.a + self.d

    def is_identity(self, tol: float = TOL_GEO) -> bool:
        if self.reversing:
            return False
        return abs(self.b) <= tol and abs(self.c) <= tol \
            and abs(self.a - self.d) <= tol and abs(abs(self.a) - 1.0) <= tol

    def is_parabolic(self, tol: float = TOL_GEO) -> bool:
        return (not self.reversing) and not self.is_identity(tol) \
            and abs(abs(self.trace()) - 2.0) <= tol

    def is_hyperbolic(self, tol: float = TOL_GEO) -> bool:
        return (not self.reversing) and abs(self.trace()) > 2.0 + tol

    def is_elliptic(self, tol: float = TOL_GEO) -> bool:
        return (not self.reversing) and abs(self.trace()) < 2.0 - tol \
            and not self.is_identity(tol)

    def translation_length(self) -> float:
        t = abs(self.trace())
        if t <= 2.0:
            return 0.0
        return 2.0 * math.acosh(t / 2.0)

    def fixed_point_parabolic(self) -> float:
        if abs(self.c) <= TOL_ALG:
            return INF
        return (self.a - self.d) / (2.0 * self.c)

    def axis(self) -> GeodesicLine:
        """Translation axis of a hyperbolic element, oriented toward the
        attracting fixed point."""
        t = self.trace()
        if abs(t) <= 2.0:
            raise ValueError("axis of a non-hyperbolic isometry")
        disc = math.sqrt(t * t - 4.0)
        if abs(self.c) <= TOL_ALG:
            other = self.b / (self.d - self.a)
            if abs(self.a) > abs(self.d):
                return GeodesicLine.from_endpoints(other, INF)
            return GeodesicLine.from_endpoints(INF, other)
        x1 = (self.a - self.d + disc) / (2.0 * self.c)
        x2 = (self.a - self.d - disc) / (2.0 * self.c)
        # attracting fixed point has |derivative| < 1, i.e. (c x + d)^2 > 1
        if (self.c * x1 + self.d) ** 2 > 1.0:
            return GeodesicLine.from_endpoints(x2, x1)
        return GeodesicLine.from_endpoints(x1, x2)

    def approx_equal(self, other: "Isometry", tol: float = TOL_GEO) -> bool:
        if self.reversing != other.reversing:
            return False
        for s in (1.0, -1.0):
            if abs(self.a - s * other.a) <= tol \
                    and abs(self.b - s * other.b) <= tol \
                    and abs(self.c - s * other.c) <= tol \
                    and abs(self.d - s * other.d) <= tol:
                return True
        return False
