"""Quasi-Sturmian potentials: words, trace maps, and spectra of discrete
one-dimensional Schrodinger operators."""

__version__ = "0.1.0"

from .contfrac import ContinuedFraction, approximants, density_score, expand, value
from .words import (
    ModelSpec,
    Substitution,
    Word,
    characteristic_prefix,
    complexity,
    find_squares,
    level_words_prime,
    palindrome_split,
    qs_prefix,
    reflect,
    reflect_subst,
    sturmian_levels,
    substitute,
)
from .decompose import (
    Decomposition,
    RauzyGraph,
    cassaigne_decompose,
    detect_qs,
    rauzy_graph,
    rotation_number,
    special_factors,
)
from .tracemap import (
    OrbitVerdict,
    TraceTriple,
    chebyshev,
    classify_orbit,
    generators,
    in_escape,
    invariant,
    orbit_trace,
    step,
)
from .transfer import (
    GrowthExponents,
    SolutionSegment,
    gordon_residual,
    growth_exponents,
    initial_triple,
    level_matrices,
    local_matrix,
    local_norm,
    lyapunov,
    solve,
    word_matrix,
)
from .spectrum import (
    BandList,
    finite_eigenvalues,
    measure_report,
    periodic_bands,
    stable_set,
)
