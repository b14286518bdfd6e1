use crate::error::{Error, Result};

/// `Σ_{k>=0} k^(α-1) e^(-1) / k!`, truncated once the geometric bound on the
/// remaining terms drops below `tolerance`.
pub fn generalized_bell(alpha: f64, tolerance: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 1, got {alpha}")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let e_inv = (-1.0f64).exp();
    let mut sum = 0.0;
    // term_k = k^(α-1) / k!, kept in log space to avoid overflow.
    let mut log_fact = 0.0;
    let mut k = 1u64;
    loop {
        let kf = k as f64;
        log_fact += kf.ln();
        let term = ((alpha - 1.0) * kf.ln() - log_fact).exp() * e_inv;
        sum += term;
        // term_{i+1} / term_i = ((i+1)/i)^(α-1) / (i+1), decreasing in i.
        let ratio = ((kf + 1.0) / kf).powf(alpha - 1.0) / (kf + 1.0);
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < tolerance {
            return Ok(sum);
        }
        k += 1;
    }
}
