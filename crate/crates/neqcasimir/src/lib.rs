pub mod asymptotics;
pub mod cli;
pub mod dilute;
pub mod engine;
pub mod kernels;
pub mod materials;
pub mod quadrature;
pub mod reference;
pub mod specfun;
pub mod tmatrix;
pub mod units;
