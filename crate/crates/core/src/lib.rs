//! Two-dimensional tonal coherence analysis for symbolic music.
//!
//! *Tonal focus* is the share of duration-weighted pitch content within a
//! small line-of-fifths window around the tonic. *Tonal connection* is the
//! mean walk length λ of a Poisson random-walk model fitted to the piece's
//! line-of-fifths distribution by maximum likelihood.
//!
//! ```
//! use tonal_coherence::key_estimation::{Mode, TonalCenter};
//! use tonal_coherence::pitch_space::{LofDistribution, LofIndex};
//! use tonal_coherence::{metrics, tdm};
//!
//! let center = TonalCenter::annotated(LofIndex::C, Mode::Major);
//! let d = LofDistribution::point_mass(LofIndex::C);
//! assert_eq!(metrics::tonal_focus(&d, &center, 3)?, 1.0);
//! let fit = tdm::fit(&d, &center)?;
//! assert!(fit.params.lambda < 1e-3);
//! # Ok::<(), tonal_coherence::TonalError>(())
//! ```

pub mod cli;
pub mod corpus;
pub mod error;
pub mod key_estimation;
pub mod metrics;
pub mod par;
pub mod pitch_space;
pub mod tdm;

pub use error::{Result, TonalError};
