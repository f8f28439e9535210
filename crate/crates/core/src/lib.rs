pub mod error;
pub mod expr;
pub mod innerprod;
pub mod linalg;
pub mod morphism;
pub mod riemann;
pub mod scalar;
pub mod weil;
