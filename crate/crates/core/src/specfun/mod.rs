//! Real-argument special functions used by the kernel catalog.

mod erf;
mod jacobi;
mod weierstrass;

pub use erf::{erf, erf_inv, erfc, erfc_inv};
pub use jacobi::{elliptic_k, jacobi, jacobi_am, jacobi_cn, jacobi_dn, jacobi_sn, EllipticArg, Jacobi};
pub use weierstrass::{weierstrass_p, Weierstrass, WeierstrassInvariants, DEFAULT_POLE_EPSILON};
