"""Discrete and continuous knot energies of closed curves.

The centerpiece is a Moebius-invariant discretization of the inverse-square
knot energy of closed polygons, built from cross ratios and the meeting
angles of vertex-triple circles, next to the two classical discretizations
(arc-length weighted pair sums and minimal-distance edge sums) and tensor
quadrature of the continuous energies for reference values.
"""

from .continuous import (
    QuadratureSpec,
    cos_alpha_continuous,
    energy_E,
    energy_E_cos,
    ohara_integrand,
)
from .curves import (
    ParametricCurve,
    SampledCurve,
    circle,
    ellipse,
    make_curve,
    modulus_D,
    mollify,
    torus_knot,
)
from .discrete import (
    EnergyReport,
    PairTerm,
    cos_alpha,
    cos_alpha_tilde,
    e_cos_m,
    e_cos_m_density,
    e_cos_m_value,
    kim_kusner,
    segment_min_distance,
    simon_md,
)
from .experiments import (
    ConvergenceTable,
    MinimizeOptions,
    MinimizeTrace,
    gamma_limsup_sweep,
    invariance_sweep,
    liminf_probe,
    minimize,
)
from .kernels import backend_name
from .moebius import (
    MoebiusTransform,
    Orthogonal,
    Scaling,
    SphereInversion,
    Translation,
    chord_identity_check,
    cross_ratio,
    random_transform,
    unit_sphere_inversion,
)
from .polygon import (
    ClosedPolygon,
    cyclic_index_distance,
    inscribe,
    load_polygon,
    regular_ngon,
    save_polygon_csv,
    save_polygon_json,
)
from .vecgeom import (
    Circumcircle,
    circumcenter,
    circumcircle,
    circumradius,
    menger_curvature,
    three_point_tangent,
    wedge_norm,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
