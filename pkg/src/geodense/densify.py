"""Arc extension and rerouting toward dense closed geodesics.

The pipeline takes a family of geodesic arcs on a truncated surface and
turns it into one closed geodesic passing near every arc.  Each arc is
first extended on both sides until it crosses the base filling geodesic
at a steep angle; extensions that instead dive deep into a cusp are
rerouted along nearby geodesics that come back out.  The processed arcs
are then connected through the base geodesic into a single closed curve.

Every quantitative step of the construction is guarded: extension
lengths are checked against the caps the surface constants promise, and
reroute displacements against their brackets.  A violated guard raises
instead of producing a silently wrong curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from . import formulas
from .errors import (
    ArrangementDegenerate,
    CaseBoundViolated,
    HorocyclesIntersect,
    SafetyCapExceeded,
    TraceError,
)
from .halfplane import (
    INF,
    GeodesicLine,
    GeodesicSegment,
    Horocycle,
    Isometry,
    angle_with_horocycle,
    dist,
    folded_angle,
    horocycle_perpendicular,
    intersect_lines,
    line_horocycle_crossings,
    lines_cross,
    same_line,
)
from .decomp import SurfaceConstants
from .surface import SurfaceModel
from .tracing import (
    Trace,
    TraceStep,
    concat_traces,
    reverse_trace,
    segment_trace,
    tile_elements,
    trace_closed_word,
    trace_geodesic,
)

# crossings within this of an angle threshold still count as steep
ANGLE_TOL = 1e-9
# two sightings of one crossing (through a polygon side) agree to this
_DEDUP = 1e-7


@dataclass(frozen=True)
class DensityParams:
    """Target density eps on the surface truncated at length-xi horocycles."""

    eps: float
    xi: float

    def __post_init__(self):
        if not 0.0 < self.eps <= 2.0:
            raise ValueError(f"eps must be in (0, 2], got {self.eps}")
        if not 0.0 < self.xi <= 1.0:
            raise ValueError(f"xi must be in (0, 1], got {self.xi}")


def run_length(word: str) -> list[tuple[str, int]]:
    """Collapse a generator word into (letter, count) runs."""
    out: list[tuple[str, int]] = []
    for ch in word:
        if out and out[-1][0] == ch:
            out[-1] = (ch, out[-1][1] + 1)
        else:
            out.append((ch, 1))
    return out


@dataclass(frozen=True)
class _Chord:
    """One polygon passage of a closed geodesic, with its arc-length
    offset from the trace start."""

    index: int
    segment: GeodesicSegment
    offset: float


@dataclass(eq=False)
class ClosedGeodesicRep:
    """A closed geodesic carried as a word plus one traced period.

    holonomy is the deck element translating along the traced lift, in
    the frame of the trace start; it is None when the curve is too long
    for its matrix entries to be representable, in which case only the
    trace-level data is available.  axis is the lift itself.
    """

    word: str
    length: float
    trace: Trace
    holonomy: Isometry | None
    axis: GeodesicLine
    model: SurfaceModel

    def __post_init__(self):
        if self.holonomy is not None:
            t = abs(self.holonomy.trace())
            if t <= 2.0:
                raise ValueError(f"holonomy trace {t:.6g} is not hyperbolic")
            ell = 2.0 * math.acosh(0.5 * t)
            if abs(ell - self.length) > 1e-9 * max(1.0, self.length):
                raise ValueError(
                    f"length {self.length!r} disagrees with holonomy "
                    f"translation length {ell!r}")
            if not same_line(self.holonomy.axis(), self.axis, tol=1e-7):
                raise ValueError("stored axis is not the holonomy axis")

    def word_rle(self) -> list[tuple[str, int]]:
        return run_length(self.word)

    def segments(self) -> list[GeodesicSegment]:
        return self.trace.segments()

    @cached_property
    def cum(self) -> list[float]:
        out = [0.0]
        for seg in self.trace.segments():
            out.append(out[-1] + seg.length)
        return out

    @cached_property
    def chords(self) -> list[_Chord]:
        return [_Chord(k, seg, self.cum[k])
                for k, seg in enumerate(self.trace.segments())]

    @cached_property
    def devs(self) -> list[Isometry]:
        """Deck element of each passage's tile in the start frame.

        devs[k] applied to passage k gives the developed picture along
        the axis; devs[0] is the identity and devs[-1] the holonomy.
        Only meaningful for curves short enough to develop in floats.
        """
        return [Isometry.identity()] + tile_elements(self.model,
                                                     self.trace.sides)


def base_geodesic(model: SurfaceModel,
                  word: str | None = None) -> ClosedGeodesicRep:
    """The closed geodesic of a (catalog) filling word, traced once."""
    if word is None:
        word = model.spec.base_word
    tr, hol = trace_closed_word(model, word)
    axis = GeodesicLine.from_point_direction(tr.start_point, tr.start_dir)
    return ClosedGeodesicRep(word=word, length=tr.length, trace=tr,
                             holonomy=hol, axis=axis, model=model)


# ---------------------------------------------------------------------------
# extension walker

@dataclass(frozen=True)
class CrossingRecord:
    """One crossing met while extending an arc.

    kind "base" is a crossing with the base geodesic (tau the position
    along it); kind "deep" is a crossing with a deep cusp horocycle
    (index the cusp).  good means the angle clears the kind's threshold.
    """

    kind: str
    s: float
    point: complex
    tangent: complex
    angle: float
    good: bool
    index: int
    tau: float
    step: int


@dataclass(frozen=True)
class ExtensionOutcome:
    """How one direction of an arc extension terminated.

    extension is the length walked beyond the mandatory clearance
    prefix; total includes the prefix.  Class A stopped on a steep
    base-geodesic crossing (cases 1 to 4), class B on a steep deep
    horocycle crossing (case 5).
    """

    direction: int
    case_id: int
    cls: str
    extension: float
    total: float
    stop: CrossingRecord
    bad_angles: tuple[float, ...]
    shallow_dips: int
    trace: Trace


def _ray_events(model: SurfaceModel, gamma0: ClosedGeodesicRep, trace: Trace,
                deep: list[Horocycle], theta0: float,
                psi: float) -> list[CrossingRecord]:
    """All base and deep crossings along a traced ray, by arc length.

    A crossing sitting exactly on a polygon side is seen from both
    adjacent passages at equal arc length; the duplicate is dropped.
    """
    events: list[CrossingRecord] = []
    walked = 0.0
    for k, st in enumerate(trace.steps):
        seg = st.segment
        for ch in gamma0.chords:
            if not lines_cross(seg.line, ch.segment.line):
                continue
            z = intersect_lines(seg.line, ch.segment.line)
            sw = seg.line.param_of(z)
            if not seg.contains_param(sw):
                continue
            tc = ch.segment.line.param_of(z)
            if not ch.segment.contains_param(tc):
                continue
            u = seg.line.tangent_at(sw)
            ang = folded_angle(u, ch.segment.line.tangent_at(tc))
            tau = (ch.offset + (tc - ch.segment.s0)) % gamma0.length
            events.append(CrossingRecord(
                "base", walked + (sw - seg.s0), z, u, ang,
                ang >= theta0 - ANGLE_TOL, ch.index, tau, k))
        for j, h in enumerate(deep):
            for sp, z in line_horocycle_crossings(seg.line, h):
                if not seg.contains_param(sp):
                    continue
                u = seg.line.tangent_at(sp)
                ang = angle_with_horocycle(seg.line, h, z)
                events.append(CrossingRecord(
                    "deep", walked + (sp - seg.s0), z, u, ang,
                    ang >= psi - ANGLE_TOL, j, math.nan, k))
        walked += seg.length
    events.sort(key=lambda e: e.s)
    out: list[CrossingRecord] = []
    for e in events:
        if out and e.kind == out[-1].kind and e.s - out[-1].s < _DEDUP:
            continue
        out.append(e)
    return out


def _cut_trace(trace: Trace, event: CrossingRecord) -> Trace:
    """The initial piece of a trace, ending exactly at a crossing."""
    steps = list(trace.steps[:event.step])
    seg = trace.steps[event.step].segment
    sw = seg.line.param_of(event.point)
    steps.append(TraceStep(seg.subsegment(seg.s0, sw), None))
    length = sum(s.segment.length for s in steps)
    return Trace(trace.start_point, trace.start_dir, steps,
                 event.point, seg.line.tangent_at(sw), length)


def deep_horocycles(model: SurfaceModel, params: DensityParams,
                    theta0: float) -> list[Horocycle]:
    """Per cusp, the deep horocycle bounding the reroute region, in
    polygon coordinates.

    Each catalog cusp owns exactly one ideal polygon vertex, so its deep
    horoball meets the polygon in the single piece at that vertex.
    """
    s = formulas.deep_horocycle_length(params.eps, params.xi, theta0)
    return [model.cusp_horocycle(j, s) for j in range(len(model.cusps))]


# marker asking _hunt to cap class-A extensions by the standard bound
_CLASS_A_CAP = object()

# hunt chunk length; overshoot past a stop stays within this much walk
_CHUNK = 4.0


def _hunt(model: SurfaceModel, gamma0: ClosedGeodesicRep,
          point: complex, tangent: complex, direction: int,
          params: DensityParams, K: SurfaceConstants,
          deep: list[Horocycle], allowed=_CLASS_A_CAP,
          cap: float | None = None, deep_stop: bool = True) -> ExtensionOutcome:
    """Walk one ray to its stopping crossing.

    allowed caps the extension past the clearance prefix for base stops
    (None skips the check); cap bounds the traced length.  With
    deep_stop off, steep deep crossings are passed through and counted
    with the shallow ones; this is how reroutes re-enter a cusp.
    """
    r_eps = formulas.clearance(params.eps, K.theta0)
    psi = formulas.deep_entry_angle(params.eps, params.xi, K.theta0)
    if allowed is _CLASS_A_CAP:
        allowed = formulas.class_a_extension_bound(
            K.diam, K.cusp_reach, params.eps, params.xi, K.theta0)
    if cap is None:
        cap = r_eps + allowed + 1.0

    # walk in chunks and stop extending once a stop lies in the traced
    # window; tracing the whole cap up front can climb a cusp lobe
    # through a fundamental domain per strip width
    legs: list[Trace] = []
    traced = 0.0
    p, u = point, tangent
    stop = None
    cls = ""
    bads: list[float] = []
    shallow = 0
    while True:
        step_len = min(_CHUNK, cap - traced)
        leg = trace_geodesic(model, p, u, step_len)
        legs.append(leg)
        traced += step_len
        p, u = leg.end_point, leg.end_dir
        ray = legs[0] if len(legs) == 1 else concat_traces(model, legs)
        events = _ray_events(model, gamma0, ray, deep, K.theta0, psi)
        stop = None
        bads = []
        shallow = 0
        for e in events:
            if e.s < r_eps - ANGLE_TOL:
                continue
            if e.kind == "base":
                if e.good:
                    stop, cls = e, "A"
                    break
                bads.append(e.angle)
            else:
                if e.good and deep_stop:
                    stop, cls = e, "B"
                    break
                shallow += 1
        if stop is not None or traced >= cap - 1e-12:
            break
    if stop is None:
        raise SafetyCapExceeded(
            f"no admissible stop within extension cap {cap:.6g} "
            f"(clearance {r_eps:.6g})")

    extension = max(0.0, stop.s - r_eps)
    if cls == "A" and allowed is not None and extension > allowed + 1e-6:
        raise CaseBoundViolated(
            f"class-A extension {extension:.9g} exceeds its cap {allowed:.9g}")

    if cls == "B":
        case_id = 5
    elif shallow:
        case_id = 4
    elif extension <= 1e-6:
        case_id = 1
    elif bads:
        case_id = 2
    else:
        case_id = 3
    return ExtensionOutcome(
        direction=direction, case_id=case_id, cls=cls, extension=extension,
        total=stop.s, stop=stop, bad_angles=tuple(bads),
        shallow_dips=shallow, trace=_cut_trace(ray, stop))


def classify_and_extend(c: GeodesicSegment, params: DensityParams,
                        K: SurfaceConstants, X: SurfaceModel,
                        faces=None, gamma0: ClosedGeodesicRep | None = None,
                        ) -> tuple[ExtensionOutcome, ExtensionOutcome]:
    """Extend an arc on both sides to its stopping crossings.

    Returns the (backward, forward) outcomes, backward walking out of
    the arc's start and forward out of its end.  The arc is given in
    polygon coordinates and must lie in the truncated part.
    """
    if gamma0 is None:
        gamma0 = base_geodesic(X)
    if faces is not None:
        floor = min(f.angle_floor for f in faces)
        if abs(floor - K.theta0) > 1e-9:
            raise ValueError(
                f"constants theta0 {K.theta0!r} do not match faces {floor!r}")
    for z in (c.start, c.end):
        if not X.in_truncation(z, params.xi, tol=1e-6):
            raise ValueError(
                f"arc endpoint {z} is below the length-{params.xi} horocycles")
    deep = deep_horocycles(X, params, K.theta0)
    fwd = _hunt(X, gamma0, c.end, c.line.tangent_at(c.s1), +1,
                params, K, deep)
    back = _hunt(X, gamma0, c.start, -c.line.tangent_at(c.s0), -1,
                 params, K, deep)
    return back, fwd


# ---------------------------------------------------------------------------
# rerouting deep dives

@dataclass(eq=False)
class ProcessedArc:
    """One arc after extension and, if needed, rerouting.

    trace runs the whole extension from the stop on the original start
    side to the stop on the end side.  zeta_span brackets the
    replacement arc inside it, so both extensions past the replacement
    are at least the clearance.  displacement bounds how far the
    replacement endpoints moved from the original ones.
    """

    original: GeodesicSegment
    case: str                        # "A" | "BA" | "BB"
    end_back: CrossingRecord
    end_fwd: CrossingRecord
    trace: Trace
    length: float
    zeta_span: tuple[float, float]
    displacement: float
    bound: float
    clearance: float
    theta0: float
    detail: dict

    @property
    def zeta_length(self) -> float:
        return self.zeta_span[1] - self.zeta_span[0]

    @property
    def ext_back(self) -> float:
        return self.zeta_span[0]

    @property
    def ext_fwd(self) -> float:
        return self.length - self.zeta_span[1]

    def validate(self) -> None:
        a, b = self.zeta_span
        if not 0.0 <= a <= b <= self.length + 1e-9:
            raise CaseBoundViolated(
                "replacement arc does not sit inside its extension")
        for rec, ext in ((self.end_back, self.ext_back),
                         (self.end_fwd, self.ext_fwd)):
            if rec.kind != "base" or not rec.good:
                raise CaseBoundViolated(
                    "extension does not end on a steep base crossing")
            if rec.angle < self.theta0 - ANGLE_TOL:
                raise CaseBoundViolated(
                    f"end angle {rec.angle:.9g} under theta0 {self.theta0:.9g}")
            if ext < self.clearance - 1e-9:
                raise CaseBoundViolated(
                    f"extension {ext:.9g} under the clearance "
                    f"{self.clearance:.9g}")
        if self.length > self.bound + 1e-6:
            raise CaseBoundViolated(
                f"processed length {self.length:.9g} exceeds the per-arc "
                f"bound {self.bound:.9g}")
        if abs(self.trace.length - self.length) > 1e-9 * max(1.0, self.length):
            raise ArrangementDegenerate("trace length drifted from the total")


@dataclass(frozen=True)
class _DiveFrame:
    """Coordinates normalized around one deep dive.

    In the normalized chart the dived cusp sits at infinity with its
    deep horocycle at the stated height and parabolic z -> z + 1, and
    the carrying line of the dive runs from 0 to x_far.  One map takes
    the dive walk's final polygon frame there, the other the frame of
    the original arc.
    """

    to_norm_step: Isometry
    to_norm_arc: Isometry
    height: float
    sigma: float
    x_far: float


def _walk_dev(model: SurfaceModel, outcome: ExtensionOutcome) -> Isometry:
    """Deck element taking the stop step's polygon frame to the frame
    the walk started in."""
    k = outcome.stop.step
    if k == 0:
        return Isometry.identity()
    sides = [st.side for st in outcome.trace.steps[:k]]
    return tile_elements(model, sides)[k - 1]


def _dive_frame(model: SurfaceModel, outcome: ExtensionOutcome,
                s_deep: float) -> _DiveFrame:
    stop = outcome.stop
    cusp = model.cusps[stop.index]
    rw = math.sqrt(cusp.width)
    unit = Isometry(1.0 / rw, 0.0, 0.0, rw) @ cusp.chart
    line = outcome.trace.steps[stop.step].segment.line
    e_tail = unit.apply_line(line).endpoint_back
    if math.isinf(e_tail):
        raise ArrangementDegenerate(
            "dive tail runs straight out of the cusp point")
    to_norm_step = Isometry.translation(-e_tail) @ unit
    height = 1.0 / s_deep
    x_far = to_norm_step.apply_boundary(line.endpoint_fwd)
    zc = to_norm_step.apply(stop.point)
    if abs(zc.imag - height) > 1e-6 * height:
        raise ArrangementDegenerate(
            f"normalized dive crossing at height {zc.imag:.9g}, "
            f"expected {height:.9g}")
    # a radial dive heads straight into the cusp point; either side of
    # the carrying line works then, and the positive one is the tie rule
    if math.isinf(x_far):
        sigma = 1.0
    else:
        if abs(x_far) < (1.0 + height * height) * (1.0 - 1e-4):
            raise ArrangementDegenerate(
                "normalized dive enters shallower than the deep threshold")
        sigma = math.copysign(1.0, x_far)
    to_norm_arc = to_norm_step @ _walk_dev(model, outcome).inverse()
    return _DiveFrame(to_norm_step, to_norm_arc, height, sigma, x_far)


def _centered_meet(line: GeodesicLine, radius: float) -> complex:
    """Crossing of a geodesic circle with the geodesic |z| = radius.

    The centered circles are exactly the geodesics orthogonal to the
    vertical through 0, which makes them the projection family of the
    reroute constructions.
    """
    if line.is_vertical:
        raise ArrangementDegenerate("projection target is vertical")
    m, r = line.center, line.radius
    x = (radius * radius + m * m - r * r) / (2.0 * m)
    y2 = radius * radius - x * x
    if y2 <= 0.0:
        raise CaseBoundViolated(
            "projection along centered circles misses the reroute line")
    return complex(x, math.sqrt(y2))


def _to_surface(model: SurfaceModel, back_iso: Isometry, z: complex,
                u: complex) -> tuple[complex, complex, Isometry]:
    """Carry a point and direction from a working frame onto the
    polygon; returns the normalizing deck element as well."""
    z_raw = back_iso.apply(z)
    u_raw = back_iso.apply_tangent(z, u)
    z_f, g, _ = model.normalize(z_raw)
    return z_f, g.apply_tangent(z_raw, u_raw), g


def _finish(model: SurfaceModel, c: GeodesicSegment, case: str,
            start_rec: CrossingRecord, end_rec: CrossingRecord, pre: float,
            zeta_len: float, post: float, displacement: float, bound: float,
            r_eps: float, theta0: float, detail: dict,
            legs: list[Trace]) -> ProcessedArc:
    total = pre + zeta_len + post
    tr = concat_traces(model, legs)
    if dist(tr.start_point, start_rec.point) > 1e-9 \
            or dist(tr.end_point, end_rec.point) > 1e-6:
        raise TraceError("joined arc does not run between its stops")
    arc = ProcessedArc(
        original=c, case=case, end_back=start_rec, end_fwd=end_rec,
        trace=tr, length=total, zeta_span=(pre, pre + zeta_len),
        displacement=displacement, bound=bound, clearance=r_eps,
        theta0=theta0, detail=detail)
    arc.validate()
    return arc


def replace_arc(c: GeodesicSegment,
                outcomes: tuple[ExtensionOutcome, ExtensionOutcome],
                params: DensityParams, K: SurfaceConstants, X: SurfaceModel,
                gamma0: ClosedGeodesicRep | None = None) -> ProcessedArc:
    """Turn an extended arc into its processed form.

    Arcs whose both extensions stopped on the base geodesic keep their
    position; a deep dive on either side replaces the arc by a nearby
    geodesic whose continuations come back out of the cusp.
    """
    back, fwd = outcomes
    if gamma0 is None:
        gamma0 = base_geodesic(X)
    r_eps = formulas.clearance(params.eps, K.theta0)
    bound = formulas.replaced_arc_length_bound(
        c.length, params.eps, params.xi, K.arc_overhead)
    if back.cls == "A" and fwd.cls == "A":
        return _finish(
            X, c, "A", back.stop, fwd.stop, back.total, c.length, fwd.total,
            0.0, bound, r_eps, K.theta0,
            {"cases": (back.case_id, fwd.case_id)},
            [reverse_trace(X, back.trace), segment_trace(c), fwd.trace])
    deep = deep_horocycles(X, params, K.theta0)
    dive_out, dive_dir = (fwd, +1) if fwd.cls == "B" else (back, -1)
    return _reroute(X, gamma0, c, params, K, deep, dive_out, dive_dir,
                    bound, r_eps)


def _reroute(model: SurfaceModel, gamma0: ClosedGeodesicRep,
             c: GeodesicSegment, params: DensityParams, K: SurfaceConstants,
             deep: list[Horocycle], dive_out: ExtensionOutcome, dive_dir: int,
             bound: float, r_eps: float) -> ProcessedArc:
    s_deep = formulas.deep_horocycle_length(params.eps, params.xi, K.theta0)
    m_a = formulas.class_a_extension_bound(
        K.diam, K.cusp_reach, params.eps, params.xi, K.theta0)
    frame = _dive_frame(model, dive_out, s_deep)
    H = frame.height
    if dive_dir > 0:
        p_c, q_c = c.end, c.start
    else:
        p_c, q_c = c.start, c.end
    p_n = frame.to_norm_arc.apply(p_c)
    q_n = frame.to_norm_arc.apply(q_c)

    first_tail: tuple[ExtensionOutcome, Isometry] | None = None
    tail_points: list[complex] = []
    for cand in (1, 2):
        side_sign = frame.sigma if cand == 1 else -frame.sigma
        far = side_sign * (1.0 + H * H)
        eta = GeodesicLine.from_endpoints(0.0, far)
        zp = _centered_meet(eta, abs(p_n))
        zq = _centered_meet(eta, abs(q_n))
        dp, dq = dist(p_n, zp), dist(q_n, zq)
        if max(dp, dq) > 2.0 * s_deep + 1e-9:
            raise CaseBoundViolated(
                f"reroute endpoint displaced by {max(dp, dq):.9g}, over the "
                f"deep-length bound {2.0 * s_deep:.9g}")
        tail_points.append(zq)
        t_q = eta.tangent_at(eta.param_of(zq))
        zf, uf, g = _to_surface(model, frame.to_norm_arc.inverse(), zq, -t_q)
        t_out = _hunt(model, gamma0, zf, uf, -dive_dir, params, K, deep)
        if cand == 1:
            first_tail = (t_out, g)
        if t_out.cls == "A":
            return _ba_assemble(
                model, gamma0, c, params, K, deep, frame, eta, cand,
                zp, zq, dp, dq, t_out, (zf, uf), dive_dir, bound, r_eps,
                m_a)
    # both candidate tails dive as well
    assert first_tail is not None
    if dist(tail_points[0], tail_points[1]) > 0.5 * params.eps:
        raise CaseBoundViolated(
            "candidate tail endpoints farther apart than eps/2")
    return _bb_assemble(model, gamma0, c, params, K, deep, dive_out,
                        first_tail, p_c, q_c, dive_dir, bound, r_eps, s_deep)


def _ba_assemble(model, gamma0, c, params, K, deep, frame, eta, cand,
                 zp, zq, dp, dq, t_out, tail_anchor, dive_dir, bound,
                 r_eps, m_a) -> ProcessedArc:
    s_p = eta.param_of(zp)
    s_q = eta.param_of(zq)
    zeta_len = s_p - s_q
    if zeta_len <= 0.0:
        raise ArrangementDegenerate("reroute inverted the arc's endpoints")
    t_p = eta.tangent_at(s_p)
    zf, uf, _ = _to_surface(model, frame.to_norm_arc.inverse(), zp, t_p)
    allowed = m_a + formulas.ba_extra_extension(
        params.eps, params.xi, K.theta0, K.base_len)
    d_out = _hunt(model, gamma0, zf, uf, dive_dir, params, K, deep,
                  allowed=allowed, deep_stop=False)
    zf_q, uf_q = tail_anchor
    mid = trace_geodesic(model, zf_q, -uf_q, zeta_len)
    detail = {"candidate": cand, "tail_case": t_out.case_id,
              "dive_case": d_out.case_id,
              "displacement_dive": dp, "displacement_tail": dq}
    if dive_dir > 0:
        return _finish(model, c, "BA", t_out.stop, d_out.stop, t_out.total,
                       zeta_len, d_out.total, max(dp, dq), bound, r_eps,
                       K.theta0, detail,
                       [reverse_trace(model, t_out.trace), mid, d_out.trace])
    return _finish(model, c, "BA", d_out.stop, t_out.stop, d_out.total,
                   zeta_len, t_out.total, max(dp, dq), bound, r_eps,
                   K.theta0, detail,
                   [reverse_trace(model, d_out.trace),
                    reverse_trace(model, mid), t_out.trace])


def _bb_assemble(model, gamma0, c, params, K, deep, dive_out, first_tail,
                 p_c, q_c, dive_dir, bound, r_eps, s_deep) -> ProcessedArc:
    t_out, g_tail = first_tail
    h_dive = _walk_dev(model, dive_out).apply_horocycle(
        model.cusp_horocycle(dive_out.stop.index, s_deep))
    h_tail = (g_tail.inverse() @ _walk_dev(model, t_out)).apply_horocycle(
        model.cusp_horocycle(t_out.stop.index, s_deep))
    try:
        perp = horocycle_perpendicular(h_tail, h_dive)
    except (HorocyclesIntersect, ValueError) as exc:
        raise CaseBoundViolated(
            f"reroute horoballs are not separated: {exc}") from exc
    u = perp.length
    lo_u, hi_u = formulas.bb_u_bracket(
        params.eps, params.xi, K.theta0, c.length, K.base_len, K.cusp_reach)
    if not lo_u - 1e-6 <= u <= hi_u + 1e-6:
        raise CaseBoundViolated(
            f"horoball gap {u:.9g} outside [{lo_u:.9g}, {hi_u:.9g}]")
    psi = formulas.deep_entry_angle(params.eps, params.xi, K.theta0)
    hw = formulas.quad_half_width(psi, u)
    if not hw < 2.0 / math.e:
        raise CaseBoundViolated(
            f"quad half-width {hw:.9g} not under 2/e")

    # standard position: tail ball of unit diameter at 0, dived ball the
    # line at height e^u
    to_std = Isometry.point_frame(
        perp.start, perp.line.tangent_at(perp.s0)).inverse()
    eu = math.exp(u)
    if abs(to_std.apply(perp.start) - 1j) > 1e-7 \
            or abs(to_std.apply(perp.end) - 1j * eu) > 1e-6 * eu:
        raise ArrangementDegenerate("standard position frame drifted")
    wp = to_std.apply(p_c)
    wq = to_std.apply(q_c)
    sgn = 1.0 if wp.real + wq.real >= 0.0 else -1.0
    c_top = complex(sgn * hw * eu, eu)
    c_bot = complex(sgn * hw, 1.0) / (hw * hw + 1.0)
    side = GeodesicLine.from_points(c_bot, c_top)
    if abs(angle_with_horocycle(side, Horocycle(0.0, 1.0), c_bot) - psi) \
            > 1e-6 or \
       abs(angle_with_horocycle(side, Horocycle(INF, eu), c_top) - psi) \
            > 1e-6:
        raise ArrangementDegenerate("quad side misses its corner angles")
    s_bot = side.param_of(c_bot)
    s_top = side.param_of(c_top)
    gap_len = s_top - s_bot
    if not 0.0 < gap_len <= u + 2.0 * hw + 1e-6:
        raise CaseBoundViolated(
            f"quad side length {gap_len:.9g} over its bound "
            f"{u + 2.0 * hw:.9g}")

    z_p0 = _centered_meet(side, abs(wp))
    z_q0 = _centered_meet(side, abs(wq))
    dp, dq = dist(wp, z_p0), dist(wq, z_q0)
    if max(dp, dq) > 2.0 * hw + 1e-6:
        raise CaseBoundViolated(
            f"reroute endpoint displaced by {max(dp, dq):.9g}, over twice "
            f"the half-width {2.0 * hw:.9g}")
    s_p0 = side.param_of(z_p0)
    s_q0 = side.param_of(z_q0)
    if not s_bot - 1e-6 <= s_q0 <= s_p0 <= s_top + 1e-6:
        raise CaseBoundViolated(
            "replacement endpoints leave the bridging segment")

    v_lo, v_hi = formulas.bb_v_bracket(
        params.eps, params.xi, K.theta0, K.cusp_reach)
    to_arc = to_std.inverse()
    z1, u1, _ = _to_surface(model, to_arc, c_top, side.tangent_at(s_top))
    out_top = _hunt(model, gamma0, z1, u1, dive_dir, params, K, deep,
                    allowed=None, cap=v_hi + 1.0, deep_stop=False)
    z2, u2, _ = _to_surface(model, to_arc, c_bot, -side.tangent_at(s_bot))
    out_bot = _hunt(model, gamma0, z2, u2, -dive_dir, params, K, deep,
                    allowed=None, cap=v_hi + 1.0, deep_stop=False)
    for out in (out_top, out_bot):
        if not v_lo - 1e-6 <= out.total <= v_hi + 1e-6:
            raise CaseBoundViolated(
                f"reroute extension {out.total:.9g} outside "
                f"[{v_lo:.9g}, {v_hi:.9g}]")
    mid = trace_geodesic(model, z2, -u2, gap_len)

    detail = {"u": u, "half_width": hw, "v_dive": out_top.total,
              "v_tail": out_bot.total, "side_length": gap_len,
              "displacement_dive": dp, "displacement_tail": dq,
              "tail_case": t_out.case_id}
    zeta_len = s_p0 - s_q0
    pre_tail = out_bot.total + (s_q0 - s_bot)
    post_dive = (s_top - s_p0) + out_top.total
    displacement = max(dp, dq)
    if dive_dir > 0:
        return _finish(model, c, "BB", out_bot.stop, out_top.stop, pre_tail,
                       zeta_len, post_dive, displacement, bound, r_eps,
                       K.theta0, detail,
                       [reverse_trace(model, out_bot.trace), mid,
                        out_top.trace])
    return _finish(model, c, "BB", out_top.stop, out_bot.stop, post_dive,
                   zeta_len, pre_tail, displacement, bound, r_eps,
                   K.theta0, detail,
                   [reverse_trace(model, out_top.trace),
                    reverse_trace(model, mid), out_bot.trace])
