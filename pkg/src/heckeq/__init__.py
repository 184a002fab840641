"""Right-angled Coxeter groups, multi-parameter Hecke algebras, and
truncated operator experiments on their group von Neumann algebras."""

__version__ = "0.1.0"

from .coxeter import (
    BallBasis,
    CoxeterGraph,
    GraphAnalysis,
    NormalWord,
    ResourceGuardExceeded,
    ball,
    builtin_graph,
    cliques,
    comm_pairs,
    four_point_delta,
    graph_analysis,
    graph_hash,
    inverse,
    load_graph,
    mul_word,
    normalize,
    reduced_expressions,
    starts_with,
    weak_prefixes,
)
from .gns import (
    TruncatedOperator,
    commutator_l2,
    dirac_commutator_matrix,
    lip_lower_bound,
    matrix_of,
    operator_norm,
)
from .haagerup import (
    CounterexampleResult,
    HaagerupReport,
    count_tuples,
    haagerup_ratio,
    haagerup_scan,
    tail_band_check,
    tuple_scan,
    verify_counterexample,
)
from .hecke import (
    HeckeElement,
    MultiParameter,
    l2_norm,
    multiply,
    parse_element,
    random_homogeneous,
    trace,
)
from .ladders import SigmaWitness, decompose, find_sigma, ladder, sigma_census, sigma_witnesses
from .schur import (
    banded_difference_check,
    c_qq,
    commutator_intertwine_check,
    convergence_experiment,
    default_k_emp,
    gram_check,
    magnitude_check,
    schur_map,
)

__all__ = [
    "__version__",
    "BallBasis",
    "CounterexampleResult",
    "CoxeterGraph",
    "GraphAnalysis",
    "HaagerupReport",
    "HeckeElement",
    "MultiParameter",
    "NormalWord",
    "ResourceGuardExceeded",
    "SigmaWitness",
    "TruncatedOperator",
    "ball",
    "banded_difference_check",
    "builtin_graph",
    "c_qq",
    "cliques",
    "comm_pairs",
    "commutator_intertwine_check",
    "commutator_l2",
    "convergence_experiment",
    "count_tuples",
    "decompose",
    "default_k_emp",
    "dirac_commutator_matrix",
    "find_sigma",
    "four_point_delta",
    "gram_check",
    "graph_analysis",
    "graph_hash",
    "haagerup_ratio",
    "haagerup_scan",
    "inverse",
    "l2_norm",
    "ladder",
    "lip_lower_bound",
    "load_graph",
    "magnitude_check",
    "matrix_of",
    "mul_word",
    "multiply",
    "normalize",
    "operator_norm",
    "parse_element",
    "random_homogeneous",
    "reduced_expressions",
    "schur_map",
    "sigma_census",
    "sigma_witnesses",
    "starts_with",
    "tail_band_check",
    "trace",
    "tuple_scan",
    "verify_counterexample",
    "weak_prefixes",
]
