//! Orthonormal matrix polynomials for measures on `[-2, 2]` with point
//! masses outside, their Szegő limit function, and the `C_0` sum rule.
//!
//! The pipeline runs [`MatrixMeasure`] → [`stieltjes`] (block Jacobi data)
//! → [`spectral_factorize`] (outer factor `G`) → [`construct_product`]
//! (Blaschke–Potapov product `B`) → [`LimitFunction`]
//! `L(z) = 2^{-1/2} G(z)^{-1} B(z) V`. [`check_sum_rule`] balances the
//! weight against the bound states and the Jacobi coefficients.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod blaschke;
pub mod catalog;
pub mod error;
pub mod limit;
pub mod linalg;
pub mod measure;
pub mod moprl;
pub mod sampling;
pub mod sumrule;
pub mod szego;

pub use blaschke::{
    construct_product, residue_kernel, BlaschkePotapovProduct, ElementaryFactor, PoleState,
    ResidueKernel,
};
pub use error::{Error, Result};
pub use limit::{
    asymptotics_report, build_pipeline, h_diagnostic, verify_l2, verify_masses, verify_pointwise,
    AsymptoticsReport, LimitFunction, Pipeline,
};
pub use linalg::{CMatrix, MatField, Tolerances, C64};
pub use measure::{BoundState, Density, Edge, Mass, MatrixMeasure, Normalization, ScalarDensity};
pub use moprl::{stieltjes, BlockJacobi, EquivalenceTransform, NormType, PolySequence};
pub use sampling::{BoundarySampling, FourierCoefficients};
pub use sumrule::{a0_quantity, check_sum_rule, e0_quantity, z_quantity, SumRuleLedger};
pub use szego::{spectral_factorize, FactorConfig, OuterFunction};
