"""Method of characteristics for set-valued Hamilton-Jacobi equations.

Values live in the lattice of closed convex sets invariant under an
ordering cone ``C``; every computation is reduced to scalarizations along
sampled directions of the dual cone.
"""

from .cone_lattice import (
    BaseSampling,
    Cone,
    HalfSpace,
    SupportedSet,
    dual_halfspace,
    make_base,
    s_function,
    support_of_intersection,
    zeta_difference,
)
from .problems import ProblemInstance, ScalarizedProblem, as_lagrangian, builtin, scalarize
from .characteristics import (
    CharTriple,
    HorizonReport,
    char_closed_form,
    char_integrate,
    horizon_bound,
    invert_flow,
    tstar_estimate,
    u_scalar,
)
from .assembler import (
    HypUReport,
    assemble_U,
    check_hyp_u,
    check_hyp_u2,
    hj_residual,
    set_derivative_space,
    set_derivative_time,
    solution_point,
    u_zeta_halfspace,
)
from .fenchel import (
    biconjugate_check,
    check_conjugate_identities,
    conjugate_derivatives,
    conjugate_halfspace,
    conjugate_scalar,
    legendre_dual,
)
from .hopflax import (
    Arc,
    cost_functional,
    hopflax_value,
    scalarization_solution,
    verify_characteristic_link,
    zeta_minimizer,
)
from .exceptions import ConfigError, ConvergenceError, HorizonExceededError, SVHJError

__version__ = "0.1.0"
