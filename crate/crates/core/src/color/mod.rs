//! Color-space and camera ISP math.

pub mod bayer;
pub mod config;
pub mod crf;
pub mod isp;

pub use bayer::{demosaic_bilinear, mosaic, BayerPattern};
pub use config::CrfRepr;
pub use crf::{linear_to_srgb, srgb_to_linear, Crf, CrfLut};
pub use isp::{
    apply_wb, apply_wb_bayer, color_correct, forward_isp, inverse_color_correct, inverse_isp, Ccm,
    IspConfig, WbGains,
};
