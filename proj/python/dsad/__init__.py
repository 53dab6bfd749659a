"""Decentralized smoothing ADMM for sparse quantile regression."""

from ._dsad import (
    BaselineConfig,
    ConfigReport,
    DsadSolver,
    ExperimentConfig,
    Graph,
    GroundTruth,
    MetricReport,
    NodeData,
    PenaltyKind,
    PenaltySpec,
    Schedule,
    SolverConfig,
    StepDecay,
    centralized_objective,
    check_loss,
    complete_graph,
    compute_omega,
    evaluate,
    gen_design,
    gen_node_data,
    load_config,
    make_trial,
    path_graph,
    penalty_value,
    prox_penalty,
    prox_smooth_abs,
    random_geometric_graph,
    run_baseline,
    smooth_abs,
    solver_config,
    sparse_truth,
    true_augmented_w,
    validate_config,
    with_intercept,
    with_quantile_offset,
)

__all__ = [name for name in dir() if not name.startswith("_")]
