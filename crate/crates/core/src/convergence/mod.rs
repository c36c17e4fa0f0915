//! Finite-horizon diagnostics for the Wijsman convergence modes.

mod bounds;
mod classify;
mod exceptional;
mod scan;

pub use bounds::{
    admissible_delta, beta_bound, cesaro_gap, count_scaling, modulus_split, multiplicative_chain,
    multiplicative_constant, BetaBound, ChainCheck, InequalityCheck,
};
pub use classify::{
    classify, uniqueness_consistency, Boundedness, ClassifyParams, ConvergenceVerdict, LemmaProbe,
    Mode, ModeReport, ModeTrace, Refutation, Status, UniquenessCheck,
};
pub use exceptional::{exceptional_set, ExceptionalSetResult, DEFAULT_LEVELS};
pub use scan::{
    bounded_probe, cesaro_mean, deviation_count, f_stat_ratio, stat_ratio, strong_cesaro_block_mean,
    strong_cesaro_f_block_mean, strong_cesaro_f_mean, strong_cesaro_mean, BoundProbe, DeviationSpec,
    GROWTH_FACTOR,
};
