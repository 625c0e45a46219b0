"""dilatlab: numerics for Sobolev mappings with integrable dilatation.

Submodules:

* `tensorgrid`  - uniform grids, finite differences, quadrature, cutoffs
* `mappings`    - mapping catalog, differential/dilatation analysis
* `exact`       - exact arithmetic in Q[log 2, log(1/a)]
* `bump`        - certified n-superharmonic bump profiles
* `identities`  - weak divergence identity and energy estimates
* `singular`    - zero sets, box-counting dimension, Sobolev diagnostics
* `cli`         - verification suites as a command-line tool
"""

from .bump import (
    BumpProfile,
    CertificationError,
    OUTER_RADIUS,
    SignCertificate,
    certify_superharmonic,
    construct_bump,
    eval_bump,
    radial_n_laplacian,
    solve_inner_coefficients,
    verify_properties,
)
from .exact import Exact, LOG2, LOG_INV_A
from .identities import (
    EstimateReport,
    IdentityReport,
    admissible_epsilon,
    bump_vector_field,
    caccioppoli_check,
    constant_field,
    hausdorff_bound,
    linear_field,
    log_log_energy,
    weak_identity_residual,
    weak_identity_sweep,
)
from .mappings import (
    DilatationFlag,
    Mapping,
    adjugate,
    differential,
    differential_batch,
    dilatation,
    ellipticity_form,
    example_mapping,
    parse_mapping_spec,
    polyconvex_energy,
    young_admissible,
)
from .singular import PointCloud, box_counting_dimension, sobolev_log_norm, zero_set
from .tensorgrid import (
    Cutoff,
    GridDomain,
    ScalarField,
    VectorField,
    fd_gradient,
    field_from_function,
    integrate,
    make_grid,
    smooth_cutoff,
)

__version__ = "0.1.0"
