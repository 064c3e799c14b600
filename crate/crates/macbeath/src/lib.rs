//! Exact symbolic reconstruction and verification of the chain of explicit
//! models of the Fricke-Macbeath curve: the Q(rho) model, the model over
//! Q(sqrt(-7)) obtained by Galois descent through the degree-3 subfield
//! step, the setup of the final descent to Q, and the homology-cover model
//! — with every identity checked exactly over the cyclotomic field and
//! cross-checked numerically.

pub mod cyclotomic;
pub mod error;
pub mod expr;
pub mod poly;
pub mod multipoly;
pub mod curve;
pub mod numeric;
pub mod semimap;

pub use error::{Error, Result};
