"""phtkit: persistent homology transforms of embedded simplicial complexes.

Compute direction-indexed barcodes of polyhedral shapes, glue the transform
of a shape from a closed cover by exact F2 linear algebra over the cover's
nerve, and approximate a manifold's transform from point samples.
"""

__version__ = "0.1.0"

from .complexes import (
    ComplexError,
    Cover,
    Direction,
    EmbeddedComplex,
    Subcomplex,
    components,
    height,
    intersect,
    sublevel,
    validate,
)
from .glue import (
    CechH0Complex,
    ConvexityReport,
    DescentReport,
    DoubleComplex,
    GluedCurves,
    Nerve,
    StalkReport,
    build_nerve,
    cech_h0_stalk,
    convexity_check,
    critical_t_grid,
    e1_page,
    glued_betti_curves,
    stalk_report,
    total_cohomology_stalk,
    verify_descent,
)
from .homology import betti_numbers, euler_characteristic
from .io import load_complex, load_cover, save_complex, save_cover
from .persistence import (
    Barcode,
    Filtration,
    Interval,
    betti_curve,
    bottleneck,
    compute_barcode,
    lower_star_filtration,
)
from .sampling import (
    CechParams,
    ManifoldSpec,
    PointCloud,
    approximation_report,
    cech_complex,
    density_check,
    reference_complex,
    sample_points,
)
from .transform import (
    DirectionGrid,
    PHTSample,
    barcode_to_csv,
    compute_pht,
    make_grid,
    pht_distance,
    render_heatmap,
    sample_from_json,
    sample_to_json,
    sphere_volume,
)

__all__ = [name for name in dir() if not name.startswith("_")]
