"""Built-in punctured hyperbolic surfaces.

Each entry describes a finite-area surface as an ideal-vertex polygon in
the upper half-plane with side pairings from a discrete group.  The data
is raw: matrices, vertices in order, pairing words, cusp charts.  All
geometric consistency (side matching, parabolicity, angle sums, area) is
checked when the model is built.

Vertex lists run counterclockwise, so the interior lies on the left of
every side traversed in list order.  Ideal vertices are stored as floats
(``math.inf`` allowed); finite vertices as complex numbers.

Words are strings over the generator letters; lowercase is the
generator, uppercase its inverse, and "xy" acts as x after y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf

Matrix = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class CuspSpec:
    """One cusp: its polygon vertex, a chart matrix sending the vertex
    to infinity, the chart width, and the word acting as z -> z + width
    in the chart."""

    vertex_index: int
    chart: Matrix
    width: float
    word: str


@dataclass(frozen=True)
class SurfaceSpec:
    name: str
    genus: int
    n_cusps: int
    gen_names: str
    gen_matrices: tuple[Matrix, ...]
    vertices: tuple
    side_words: tuple[str, ...]
    side_partners: tuple[int, ...]
    cusps: tuple[CuspSpec, ...]
    relator: str
    base_word: str          # filling closed geodesic used by the decomposition
    base_point: complex


THRICE_PUNCTURED_SPHERE = SurfaceSpec(
    name="thrice-punctured-sphere",
    genus=0,
    n_cusps=3,
    gen_names="ab",
    gen_matrices=(((1.0, 2.0), (0.0, 1.0)),
                  ((1.0, 0.0), (2.0, 1.0))),
    # hexagon: infinity, P, 0, Q, 1, R with two right angles (P, Q),
    # one straight corner (R) and three ideal vertices
    vertices=(INF,
              complex(-1.0, 1.0),
              0.0,
              complex(0.6, 0.2),
              1.0,
              complex(1.0, 1.0)),
    side_words=("a", "b", "B", "aB", "bA", "A"),
    side_partners=(5, 2, 1, 4, 3, 0),
    cusps=(CuspSpec(0, ((1.0, 0.0), (0.0, 1.0)), 2.0, "a"),
           CuspSpec(2, ((0.0, 1.0), (-1.0, 0.0)), 2.0, "B"),
           CuspSpec(4, ((0.0, 1.0), (-1.0, 1.0)), 2.0, "bA")),
    relator="aBbA",
    base_word="ab",
    base_point=complex(0.05, 0.6),
)


ONCE_PUNCTURED_TORUS = SurfaceSpec(
    name="once-punctured-torus",
    genus=1,
    n_cusps=1,
    gen_names="ab",
    gen_matrices=(((1.0, 1.0), (1.0, 2.0)),
                  ((1.0, -1.0), (-1.0, 2.0))),
    vertices=(INF,
              complex(-3.0, 1.0),
              complex(-1.5, 0.5),
              complex(0.0, 1.0),
              complex(1.5, 0.5),
              complex(3.0, 1.0)),
    side_words=("BAba", "a", "B", "A", "b", "ABab"),
    side_partners=(5, 3, 4, 1, 2, 0),
    cusps=(CuspSpec(0, ((1.0, 0.0), (0.0, 1.0)), 6.0, "BAba"),),
    relator="abABbaBA",
    base_word="aabAb",
    base_point=complex(0.05, 1.9),
)


CATALOG: dict[str, SurfaceSpec] = {
    s.name: s for s in (THRICE_PUNCTURED_SPHERE, ONCE_PUNCTURED_TORUS)
}


def surface_names() -> list[str]:
    return sorted(CATALOG)
