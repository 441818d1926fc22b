//! Local-global arithmetic: exact p-adic computation, congruence and
//! lattice methods for Diophantine systems, quadratic forms over Q and Q_p,
//! and elliptic curves over Q up to a numerical rank estimate from the
//! L-series.

pub mod elliptic;
pub mod modular;
pub mod lindioph;
pub mod padic;
pub mod quadforms;
