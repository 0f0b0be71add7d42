"""Unique expansions in non-integer bases over the alphabet {0, ..., M}.

The package computes greedy and quasi-greedy expansions, decides uniqueness
lexicographically, inverts expansions to bases, brackets Hausdorff dimensions
of univoque sets, classifies U(x) into its regimes and builds certified
isolated bases of U(x) for M = 1.
"""
from .bases import (
    CriticalConstants,
    critical_constants,
    golden_ratio_base,
    invert_base,
    komornik_loreti_base,
    q_of_x,
)
from .dimension import (
    DimensionEstimate,
    Strictness,
    build_automaton,
    count_words,
    dim_real_Uq,
    dim_Uq,
    dim_Ux,
    staircase_samples,
)
from .expansions import (
    ExpansionKind,
    ExpansionResult,
    Verdict,
    alpha,
    greedy_expand,
    is_unique_expansion,
    pi_q,
    quasi_greedy_expand,
)
from .isolated import (
    IsolationCertificate,
    bifurcation_base,
    c_family,
    d_family,
    isolate,
    iso_intervals,
    tau,
    verify_member_star,
    z_n,
)
from .precision import PrecisionExhausted, PrecisionReal
from .slices import (
    MemberWitness,
    Regime,
    classify,
    dense_family,
    enumerate_Ux,
    golden_tail_family,
    holder_check,
    local_dim_experiment,
)
from .words import (
    DigitStream,
    EventuallyPeriodicWord,
    Order,
    Word,
    lex_compare,
    metric_rho,
    parse_sequence,
    reflect,
    shift,
)

__version__ = "0.1.0"
