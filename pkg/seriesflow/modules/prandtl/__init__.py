"""Series solution of the unsteady Prandtl boundary-layer equations."""

from . import boundary_layer, commands, matching
