//! Distortion coefficients and the Jensen-type curvature certificates.

mod bcd;
mod certify;
pub mod distortion;

pub use bcd::{bcd_certify, best_k, sample_mixture, BcdReport, BestK, SamplerConfig, SupportShape};
pub use certify::{
    cd_twopoint_certify, dimensional_jensen_certify, dimensional_report, jensen_witnesses, report_for, wji_certify,
    wji_report, CertifyOptions, JensenWitness, EXACT_TOL,
};
pub use distortion::{c_kappa, s_c_t, s_kappa, sigma, tau, theta_over_s, theta_over_t};
