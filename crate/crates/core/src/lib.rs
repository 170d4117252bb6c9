//! Flat torsion-free logarithmic connections on hyperplane-arrangement
//! complements.

pub mod arrangement;
pub mod connection;
pub mod holonomy;
pub mod io;
pub mod lauricella;
pub mod numkernel;
pub mod pkcriteria;
