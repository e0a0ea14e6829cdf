//! Real-Win-Worth crowdfunding toolkit.
//!
//! Campaigns are encoded as 26 None/Partial/Full factor ratings plus page-level
//! control variables; models predicting `ln(funding raised)` are trained by
//! stepwise selection under K-fold cross-validation with the controls forced in.

pub mod domain;
pub mod error;
pub mod interface;
pub mod pipeline;
pub mod selection;
pub mod stats;

pub use error::{Error, ErrorClass, Result};
