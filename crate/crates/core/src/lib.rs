pub mod exec;
pub mod geometry;
pub mod interior;
pub mod linalg;
pub mod nearfield;
pub mod polescan;
pub mod specfun;
pub mod wavefield;
