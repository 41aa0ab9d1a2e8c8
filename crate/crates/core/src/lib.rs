pub mod checks;
pub mod cli;
pub mod cxcore;
pub mod homcx;
pub mod models;
pub mod mtt;
pub mod ratlin;
pub mod suite;
pub mod transport;
mod serde_util;
