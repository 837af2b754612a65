//! Multi-controlled unitaries built from QFT increment/decrement blocks.
//!
//! Pipeline: [`synthesis`] builds an annotated abstract circuit, [`optimizer`]
//! rewrites it, [`transpile`] routes and lowers it to `{CX, Rz, SX, X}`, and
//! [`verify`] checks any stage against the exact multi-controlled-U matrix.
//! [`formulas`] holds the closed-form counts the measurements are compared to.

pub mod algebra;
pub mod circuit;
pub mod cli;
pub mod formulas;
pub mod linalg;
pub mod optimizer;
pub mod sample;
pub mod synthesis;
pub mod transpile;
pub mod verify;
