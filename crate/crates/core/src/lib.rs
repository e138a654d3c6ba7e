//! Gentzen, Kolmogorov and Kuroda translations of System T parametrised by
//! nuclei, with extraction of majorants, moduli of continuity and bar
//! recursion data, and randomized oracles checking the extracted witnesses.

pub mod build;
pub mod corpus;
pub mod eval;
pub mod extract;
pub mod gen;
pub mod nuclei;
pub mod oracle;
pub mod prelude;
pub mod sample;
pub mod surface;
pub mod syntax;
pub mod translate;

pub use eval::{EvalError, Evaluator, Foreign, Value};
pub use sample::{HostFinSeq, HostSeq, SampleParams, Sampler};
pub use syntax::{typecheck, Ctx, Decl, Tm, Ty, TypeError};
