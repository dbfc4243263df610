//! Diagrams of specifications and their pushouts, as a modeling language for
//! object-oriented designs.
//!
//! A [`Diagram`] holds specifications (classes, objects, type parameters...)
//! and morphisms between them. Inheritance, template parameter passing and
//! object instantiation are all described as pushouts of spans, which
//! [`compute_pushout`] builds and [`is_pushout`] checks.

pub mod category;
pub mod codegen;
pub mod constructs;
pub mod corpus;
pub mod dsl;
pub mod graph;
pub mod paths;
pub mod pushout;
pub mod quotient;

pub use category::{
    compose_morphisms, identity_morphism, validate_diagram, CategoryError, Diagram, Equation,
    Member, MemberExpr, MemberKind, Morphism, MorphismKind, Path, Rule, SpecKind, Specification,
    Violation,
};
pub use paths::{paths_equal, PathVerdict, DEFAULT_DEPTH};
pub use pushout::{
    compute_pushout, compute_pushout_with, is_pushout, mediating_morphism, recognize_pushout,
    verify_cone_commutes, Certificate, Cone, Leg, NamingPolicy, PushoutDecl, PushoutError,
    PushoutResult, PushoutVerdict, Span,
};
