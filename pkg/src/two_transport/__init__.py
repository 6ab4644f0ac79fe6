"""Numerical engine for non-abelian 2-dimensional parallel transport.

Connections on gerbes are represented as degree-two differential cocycles
over crossed modules; paths and bigons are transported through them, global
transport is reconstructed from patch data, and surface holonomy comes with
its well-definedness laws checked numerically.
"""

from . import lie_core
from .cocycle import (CocycleMorphism, CocycleTwoMorphism, DifferentialCocycle,
                      apply_morphism, curvature_two_form, validate_cocycle,
                      validate_morphism, validate_two_morphism)
from .cover import Box, BoxCover
from .crossed_module import (CrossedModule, crossed_module,
                             gh_commutator_projection, validate_axioms)
from .fields import (BoxChart, Cube, Form, MapField, action_wedge,
                     bracket_wedge, exterior_derivative, integrate, pullback,
                     pushforward)
from .holonomy import (abelian_oracle, base_point_dependence,
                       build_fundamental_bigon, change_loop,
                       contraction_independence, move_base_point,
                       quotient_invariant, standard_torus_map, surface_holonomy)
from .reconstruct import (lift_path, transport_bigon_global,
                          transport_bigon_global_full, transport_path_global,
                          wilson_line_overlap)
from .transport import (Bigon, Path, reparameterize_check, transport_bigon_lattice,
                        transport_bigon_ode, transport_path)
from .two_group import (TwoMorphism, check_interchange, horizontal_compose,
                        horizontal_inverse, vertical_compose, vertical_inverse)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
