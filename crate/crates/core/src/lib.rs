pub mod scalar;
pub mod linalg;
pub mod report;
pub mod lattice;
pub mod cocycle;
pub mod fock;
pub mod vertex;
pub mod net2d;
pub mod braidcat;
