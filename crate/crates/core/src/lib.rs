pub mod domain;
pub mod error;
pub mod extreal;
pub mod field;
pub mod phi;
pub mod quadrature;
pub mod mollifier;
pub mod conditions;
pub mod bv;
pub mod optim;
pub mod duality;
pub mod gamma;
pub mod io;
pub mod cli;
