//! Reed-Muller sequence based grant-free random access.
//!
//! Every user ID maps to a second-order Reed-Muller (RM) sequence of length
//! `2^m`. The receiver recovers the generating matrix-vector pair one layer at
//! a time by exploiting the nested structure of the sequences, which yields
//! the user ID and a channel estimate in a single pass. Multiple users are
//! separated by iterating per-user detection with least-squares channel
//! re-estimation.
//!
//! Modules:
//! - [`rm`]: ID mapping, sequence generation and the nested structure.
//! - [`transform`]: the flipped fast Walsh-Hadamard transform.
//! - [`detect`]: layer-by-layer and list detection of a single sequence.
//! - [`multi`]: iterative multi-user detection and the SIC baseline.
//! - [`channel`]: received signal synthesis (Rayleigh channels, AWGN).
//! - [`analysis`]: closed-form success bounds, SINR and complexity counts.
//! - [`harness`]: Monte-Carlo sweeps and CSV output.

pub mod analysis;
pub mod channel;
pub mod detect;
mod error;
pub mod harness;
pub mod multi;
pub mod rm;
pub mod transform;

pub use channel::{snr_to_n0, synthesize, ChannelModel, Scenario};
pub use detect::{detect_list, detect_single, ComplexSignal, DetectionResult, ListParams};
pub use error::{Error, Result};
pub use multi::{detect_iterative, detect_sic, ActiveSetReport, MultiUserConfig};
pub use rm::{generate_sequence, id_to_pair, pair_to_id, Layer, RmPair, RmSequence, UserId};

pub use num_complex::Complex64;
