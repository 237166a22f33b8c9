//! Revised (p,q)-Bernstein-Schurer operators.
//!
//! For `0 < q < p <= 1`, a fixed shift `ell` and degree `m`, the operator
//!
//! ```text
//! B(f; x) = p^{-n(n-1)/2} * sum_{k=0}^{n} [n k]_{p,q} p^{k(k-1)/2} x^k
//!           * prod_{s=0}^{n-k-1} (p^s - q^s x) * f([k]_{p,q} p^{n-k} / [m]_{p,q}),   n = m + ell
//! ```
//!
//! maps `C[0, ell + 1]` into `C[0, 1]`. This crate provides
//!
//! * [`calculus`]: (p,q)-integers, factorials, binomials and the product/expansion pair,
//! * [`operator`]: the normalized operator, its unnormalized predecessors and the
//!   q- and classical Schurer reductions,
//! * [`moments`], [`modulus`] and [`bounds`]: closed-form moments, error radii,
//!   grid moduli of continuity and pointwise error-bound checks,
//! * [`lab`]: parameter schedules and the convergence, asymptotic and
//!   second-modulus experiments,
//! * [`oracle`]: an exact rational reference implementation.
//!
//! The crate is `no_std` and only needs `alloc`. All floating point math goes
//! through `libm`, so results are identical with and without `std`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod calculus;
mod error;
pub mod function;
pub mod lab;
pub mod modulus;
pub mod moments;
pub mod operator;
pub mod oracle;

pub use bounds::{lipschitz_bound_check, modulus_bound_check, BoundReport, BoundRow, BoundTolerance, OmegaMode};
pub use calculus::{expand_product, falling_product, pq_binomial, pq_factorial, pq_integer, PQParams, MAX_DEGREE};
pub use error::{Error, Result};
pub use function::{uniform_grid, FunctionHandle, Holder, Interval, PiecewiseLinear};
pub use lab::{
    korovkin_experiment, make_schedule, omega2_ratio_experiment, voronovskaja_experiment, ConvergenceReport,
    ConvergenceRow, Omega2Report, Omega2Row, ParamSchedule, ScheduleKind, VoronovskajaReport, VoronovskajaRow,
};
pub use modulus::{modulus_of_continuity, second_modulus, SampledGrid, SecondModulusTable};
pub use moments::{delta_m, delta_m_squared_direct, moments_closed_form, MomentSet};
pub use operator::{
    classical_schurer_evaluate, evaluate, evaluate_grid, evaluate_unnormalized, q_schurer_evaluate, weight_table,
    OperatorSpec, UnnormalizedVariant, WeightTable,
};
