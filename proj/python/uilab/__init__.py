"""Sparse recovery with classical ISTA solvers and unfolded LISTA networks.

Thin wrapper around the C++ core; matrices are numpy arrays (column per
sample for batched calls).
"""

from ._uilab import (  # noqa: F401
    CoherenceReport,
    IterateTrace,
    LayerParams,
    LayerTrace,
    NetworkParams,
    ProblemConfig,
    SignalSample,
    TheoryCertificate,
    TrainConfig,
    adaptive_ista,
    annotate,
    apply_noise,
    apply_support_schedule,
    backward,
    column_minimax_lp,
    coupling_residual,
    empirical_rate,
    fista,
    forward_lista,
    forward_lista_cp,
    forward_lista_cpss,
    forward_lista_ss,
    gen_dictionary,
    gen_ill_conditioned,
    generalized_coherence,
    init_params,
    ista,
    lipschitz_L,
    load_matrix,
    load_params,
    loss_mse,
    make_theory_params,
    matrix_hash_hex,
    mutual_coherence,
    nmse_db,
    pk_count,
    sample_signal,
    save_matrix,
    save_params,
    select_support,
    soft_threshold,
    spectral_norm,
    ss_threshold,
    stagewise_train,
    to_full,
    verify_optimality,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
