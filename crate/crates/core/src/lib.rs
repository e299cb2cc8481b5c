pub mod galois;
pub mod sexp;
pub mod curves;
pub mod mersenne;
pub mod modgen;
pub mod zsum;
pub mod forms;
pub mod logic;
pub mod selftest;
