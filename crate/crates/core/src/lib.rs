pub mod cli;
pub mod error;
pub mod expr;
pub mod haar;
pub mod linsolve;
pub mod ncalg;
pub mod qdet;
pub mod scalar;
pub mod shilov;
pub mod szego;
