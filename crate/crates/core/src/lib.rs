//! Scheduling models compiled to predicate/transition nets.
//!
//! The pipeline reads a declarative domain description (`.asn.sexp`), lowers
//! it to a PDDL subset with elapsed-time fluents, then to a Pr/T net
//! (`.lprod.sexp`). The net is explored exhaustively; goal-reaching paths are
//! filtered by total elapsed time and exported as DOT or MSC text.
//!
//! Models are generic over [`Scalar`]; the aliases below fix it to `i64`,
//! the type every integral model uses.

pub mod export;
pub mod expr;
pub mod metamodel;
pub mod pddl;
pub mod prtnet;
pub mod reach;
pub mod scalar;
pub mod sexpr;
mod syntax;
pub mod timefilter;
pub mod transform;

use thiserror::Error;

pub use scalar::{Milli, Scalar};

/// Line width used by every canonical printer.
pub const TEXT_WIDTH: usize = 78;

pub type Domain = metamodel::DomainSpec<i64>;
pub type Pddl = pddl::PddlModel<i64>;
pub type Net = prtnet::PrTNet<i64>;
pub type DecimalNet = prtnet::PrTNet<Milli>;
pub type Graph = reach::ReachGraph<i64>;
pub type Path = reach::SolutionPath<i64>;
pub type Firing = reach::Firing<i64>;

/// Any failure of the parsing and lowering stages.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Sexpr(#[from] sexpr::SexprError),
    #[error(transparent)]
    Model(#[from] metamodel::ModelError),
    #[error(transparent)]
    Pddl(#[from] pddl::PddlError),
    #[error(transparent)]
    Net(#[from] prtnet::NetError),
    #[error(transparent)]
    Transform(#[from] transform::TransformError),
    #[error(transparent)]
    Export(#[from] export::ExportError),
}
