"""Levi-flat hypersurfaces in P^n swept by curves of complex hyperplanes."""
from .bipoly import BiForm, GaussianRational, format_form, parse_form
from .cones import (Hypersurface, delta_form, grassmann_cone_from_plane_curve,
                    parse_curve, pencil_cone, umbrella)
from .errors import LeviFlatError

__all__ = [
    "BiForm", "GaussianRational", "format_form", "parse_form", "Hypersurface",
    "delta_form", "grassmann_cone_from_plane_curve", "parse_curve", "pencil_cone",
    "umbrella", "LeviFlatError",
]
