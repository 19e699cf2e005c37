"""Out-of-time-order correlators of coupled quantum cat maps on the torus."""

from .bases import (
    Center,
    Chord,
    KirkwoodIdx,
    OperatorBasis,
    PauliString,
    completeness_check,
    kirkwood_basis,
    make_basis,
    orthonormality_residual,
    pauli_basis,
    reflection_basis,
    translation_basis,
)
from .maps import (
    CatMapSpec,
    CoupledMapSpec,
    quantum_propagator_1d,
    quantum_propagator_2d,
    unstable_direction,
)
from .otoc import (
    PRESETS,
    Scenario,
    make_scenario,
    otoc_direct,
    otoc_fast_pure,
    otoc_re_series,
)
from .relevance import counts_vs_t0, footprint, rank_and_cut, relevance_report
from .torus import (
    coherent_state,
    make_bipartite,
    make_space,
    product_state,
    purity_and_entropies,
    reduce,
)

__version__ = "0.1.0"
