//! Finite tree quotients of p-adic unit balls.
//!
//! A point of a basin is only ever represented through its first `n` base-p
//! digits (a leaf of the tree `G_n`), most significant first. A leaf at depth
//! `n` stands for a ball of Haar volume `p^-n`; the unit ball has volume 1.

mod address;
mod radial;
mod wavelet;

pub use address::{ball_volume, padic_distance, BallSpec, Prime, TreeAddress};
pub use radial::{radial_tail_integral, RadialProfile, TailRule};
pub use wavelet::{eval_wavelet, wavelets_in_basin, WaveletIndex};
