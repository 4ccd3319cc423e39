//! Third-order characteristic sequences modulo n^2, the L-map trapdoor
//! public-key scheme built on them, and the brute-force oracles that verify
//! the identities the scheme relies on.

pub mod cli;
pub mod modmath;
pub mod oracle;
pub mod scheme;
pub mod selftest;
pub mod sequence;
