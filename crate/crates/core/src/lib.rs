//! Digital net construction and discrepancy analysis over prime fields.
//!
//! The pipeline: [`field`] supplies exact F_b linear algebra; [`net`]
//! builds point sets from generating matrices and ships the classical
//! constructions; [`quality`] certifies order-sigma (v, n, d) quality
//! three independent ways; [`walsh`] and [`haar`] carry the b-adic
//! character and wavelet machinery with closed-form coefficients;
//! [`norms`] evaluates L2 and Besov quasi-norms through two independent
//! routes; [`verify`] wraps every property into named, reportable checks.
//!
//! Everything numeric is deterministic: coordinates are exact integers
//! over b^s, reductions run over fixed blocks in index order, and the
//! `parallel` feature (rayon) never changes a single bit of output.

pub mod exec;
pub mod field;
pub mod haar;
pub mod net;
pub mod norms;
pub mod quality;
pub mod verify;
pub mod walsh;
