pub mod arrangement;
pub mod builtins;
pub mod chambers;
pub mod consistency;
pub mod error;
pub mod feasibility;
pub mod lattice;
pub mod linalg;
pub mod obstruction;
