"""Star bodies, dual mixed volumes and finite polymeasures on sphere grids."""

from .dual_volume import LutwakReport, dual_mixed_volume, lutwak_check, polarize, polynomial_value
from .functional import (
    BodyFunctional,
    check_poly_orthogonal_additivity,
    check_symmetry,
    check_vanishing_on_disjoint,
    characterize,
    dual_volume_functional,
    find_violation_witness,
    from_blackbox,
    from_measure,
    from_polymeasure,
    recover_measure_from_polynomial,
    reduce_rotation_invariant,
    tf_extend,
)
from .polymeasure import (
    FinitePartition,
    PolyMeasure,
    diagonal_measure,
    evaluate,
    integrate_simple,
    is_diagonal,
    jordan_decomposition,
    product_measure,
    semivariation,
    variation,
)
from .sphere_grid import (
    Rotation,
    SphereGrid,
    cyclic_rotations,
    grid_permutation,
    integrate,
    make_grid,
    rotation_2d,
    rotation_3d,
)
from .star_body import (
    Ball,
    CapBump,
    Ellipsoid,
    GridFunction,
    HPolytope,
    RadialFunction,
    RadialSumOf,
    essentially_disjoint,
    radial_eval,
    radial_sum,
    sample,
    scale,
    volume,
)

__version__ = "0.1.0"

__all__ = [
    "LutwakReport",
    "dual_mixed_volume",
    "lutwak_check",
    "polarize",
    "polynomial_value",
    "BodyFunctional",
    "check_poly_orthogonal_additivity",
    "check_symmetry",
    "check_vanishing_on_disjoint",
    "characterize",
    "dual_volume_functional",
    "find_violation_witness",
    "from_blackbox",
    "from_measure",
    "from_polymeasure",
    "recover_measure_from_polynomial",
    "reduce_rotation_invariant",
    "tf_extend",
    "FinitePartition",
    "PolyMeasure",
    "diagonal_measure",
    "evaluate",
    "integrate_simple",
    "is_diagonal",
    "jordan_decomposition",
    "product_measure",
    "semivariation",
    "variation",
    "Rotation",
    "SphereGrid",
    "cyclic_rotations",
    "grid_permutation",
    "integrate",
    "make_grid",
    "rotation_2d",
    "rotation_3d",
    "Ball",
    "CapBump",
    "Ellipsoid",
    "GridFunction",
    "HPolytope",
    "RadialFunction",
    "RadialSumOf",
    "essentially_disjoint",
    "radial_eval",
    "radial_sum",
    "sample",
    "scale",
    "volume",
    "__version__",
]

