pub mod coding;
pub mod graph;
pub mod par;
pub mod polytope;
pub mod rational;
pub mod scheduler;
pub mod sim;
pub mod traffic;
pub mod verify;

pub use rational::Rational;
