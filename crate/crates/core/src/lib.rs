//! Compile formal-language specifications (finite automata, counter systems,
//! bounded-depth Dyck parameters) into explicit finite-precision state space
//! models, simulate them bit-exactly, and verify them against brute-force
//! oracles.

pub mod compiler;
pub mod languages;
pub mod numerics;
pub mod ssm;
pub mod verify;
