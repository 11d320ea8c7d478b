//! Numerical engine for noncoherent-capacity lower bounds of highly
//! underspread WSSUS fading channels.
//!
//! The pipeline: a power delay profile gives the frequency correlation of
//! neighbouring OFDM subcarriers ([`channel`]); block length, bandwidth
//! and cyclic prefix set the grid and the adjusted SNR ([`block`]); a
//! Kalman-style variance recursion with Monte Carlo averaging turns those
//! into achievable-rate lower bounds and a coherent-capacity reference
//! ([`bound`]). An independent channel simulator, Bayesian tracker and
//! exact quadrature mutual information ([`oracle`]) certify the engine,
//! with the cross-checks packaged in [`checks`].

// fixed-size matrix kernels use index loops throughout
#![allow(clippy::needless_range_loop)]

pub mod block;
pub mod bound;
pub mod channel;
pub mod checks;
pub mod error;
pub mod expint;
pub mod gaussian;
pub mod mat;
pub mod oracle;

pub use error::{Error, Result};
