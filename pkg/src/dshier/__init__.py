"""Exact computations for Drinfeld-Sokolov type hierarchies attached to cyclic elements.

Everything is done over the rationals with :class:`fractions.Fraction`.
The submodules are

``exact``      rational matrices, kernels, minimal polynomials
``liealg``     structure constants, gl/sl/so/sp/G2, Jordan decomposition
``grading``    sl2-triples, Dynkin gradings, quasi-cyclic elements, integrable triples
``table1``     the bundled table of exceptional quasi-cyclic data
``diffpoly``   differential polynomials and their text syntax
``pva``        lambda-brackets, local functionals, Lenard-Magri recursion
``hierarchy``  the Drinfeld-Sokolov recursion and conserved densities
"""

__version__ = "0.1.0"

from .exact import Q, RatMatrix, Poly1, fmt_q, kernel_basis, minimal_polynomial, chevalley_decomposition
from .liealg import (
    LieAlgebraError,
    LieAlgebraSpec,
    LieElement,
    bracket,
    build_g2,
    build_gl,
    build_sl,
    build_so_from_partition,
    build_sp,
    centralizer,
    jordan_decomposition_elem,
)
from .grading import (
    DynkinGrading,
    IntegrableTriple,
    Sl2Triple,
    TripleError,
    classify_perturbation,
    find_integrable_element,
    grading_from,
    integrable_triple_check,
    make_integrable_triple,
    nilpotent_type_probe,
    nilpotent_type_test,
    omega_form,
    sl2_from_partition,
    sl2_from_root,
    so_integrable_triple,
)
from .table1 import table1_lookup, table1_rows
from .diffpoly import DiffPoly, LambdaPoly, parse_diffpoly, parse_lambdapoly
from .pva import (
    GenBracketTable,
    LocalFunctional,
    affine_bracket,
    check_axioms,
    functional_bracket,
    functional_eq,
    gardner_table,
    ham_flow,
    lambda_bracket,
    lenard_run,
    poisson_structure_matrix,
    variational_derivative,
    virasoro_table,
)
from .hierarchy import (
    HierarchyResult,
    densities,
    flatness_check,
    gauge_invariant,
    gauge_perturb,
    residual,
    slice_evaluate,
    solve_recursion,
)
