//! Limit order book feature extraction, feature ranking and classification
//! of mid-price movements.
//!
//! The crate is `no_std` with `alloc`; the `std` feature adds `std::error`
//! interop and the `parallel` feature fans the evaluation grid out over rayon.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod classify;
pub mod config;
pub mod error;
pub mod features;
pub mod linalg;
pub mod lob;
pub mod math;
pub mod par;
pub mod pipeline;
pub mod selection;

pub use config::Config;
pub use error::{Error, Result};
