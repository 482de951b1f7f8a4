"""Deck group enumeration and certified distances.

The deck groups of the catalog surfaces are free, so freely reduced
words identify group elements exactly and breadth-first search over the
side pairings enumerates tiles without numerical dedup.
"""

from __future__ import annotations

import math
from collections import deque

from .errors import RadiusTooSmall
from .halfplane import GeodesicSegment, Isometry
from .surface import SurfaceModel
from .words import free_reduce


def dist_to_domain(model: SurfaceModel, z: complex) -> float:
    """Distance from z to the closed fundamental polygon.

    Zero inside; outside, the nearest boundary point lies on one of the
    side segments because the polygon is convex.
    """
    if model.inside(z):
        return 0.0
    best = math.inf
    for side in model.sides:
        seg = GeodesicSegment(side.line, side.s_lo, side.s_hi)
        best = min(best, seg.dist_to_point(z))
    return best


def ball(model: SurfaceModel, center: complex, radius: float,
         max_tiles: int = 20000) -> list[tuple[str, Isometry]]:
    """All deck elements whose tile meets the disk around center.

    Returned as (word, isometry) pairs in breadth-first order starting
    with the identity.  Deep centers make the tile count explode along
    the cusp, which trips the budget.
    """
    seen = {""}
    out = []
    queue = deque([("", Isometry.identity())])
    while queue:
        word, g = queue.popleft()
        if dist_to_domain(model, g.inverse().apply(center)) > radius + 1e-9:
            continue
        out.append((word, g))
        if len(out) > max_tiles:
            raise RadiusTooSmall(
                f"radius {radius:.3g} ball around {center:.6g} exceeds "
                f"{max_tiles} tiles")
        for side in model.sides:
            partner = model.sides[side.partner]
            nw = free_reduce(word + partner.word)
            if nw in seen:
                continue
            seen.add(nw)
            queue.append((nw, g @ side.pairing.inverse()))
    return out


def dist_to_closed_geodesic(model: SurfaceModel, z: complex,
                            segments: list[GeodesicSegment], radius: float,
                            max_tiles: int = 20000) -> float:
    """Certified distance from a polygon point to a closed geodesic.

    The geodesic is given by its polygon passages.  Every lift passing
    within the radius runs through some tile of the ball, so the minimum
    over ball tiles is exact whenever it is at most the radius; a larger
    minimum only certifies a lower bound, which is reported by raising
    RadiusTooSmall.
    """
    best = math.inf
    for _, g in ball(model, z, radius, max_tiles=max_tiles):
        w = g.inverse().apply(z)
        for seg in segments:
            best = min(best, seg.dist_to_point(w))
            if best == 0.0:
                return 0.0
    if best > radius:
        raise RadiusTooSmall(
            f"geodesic stays farther than {radius:.6g} from {z:.6g} "
            f"(best lift at {best:.6g})")
    return best
