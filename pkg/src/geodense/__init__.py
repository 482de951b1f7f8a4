"""Dense closed geodesics and orthogeodesics on cusped hyperbolic surfaces.

The package constructs, on a finite-area hyperbolic surface with cusps, a
single closed geodesic (or doubly truncated orthogeodesic) whose epsilon
neighborhood covers the thick part of the surface, with an explicit and
certified length bound.
"""

__version__ = "0.1.0"
