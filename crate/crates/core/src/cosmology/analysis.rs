use serde::Serialize;

use super::model::CosmologyState;
use super::CosmologyError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSample {
    pub t: f64,
    pub lambda: f64,
    pub lambda_over_h2: f64,
}

/// `λ = R̈/R` by three-point second differences (non-uniform spacing
/// allowed); endpoints are excluded.
pub fn lambda_estimate(states: &[CosmologyState]) -> Result<Vec<LambdaSample>, CosmologyError> {
    if states.len() < 3 {
        return Err(CosmologyError::TooFewSamples {
            needed: 3,
            got: states.len(),
        });
    }
    Ok(states
        .windows(3)
        .map(|w| {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            let (h1, h2) = (b.t - a.t, c.t - b.t);
            let rdd = 2.0 * ((c.r - b.r) / h2 - (b.r - a.r) / h1) / (h1 + h2);
            let lambda = rdd / b.r;
            LambdaSample {
                t: b.t,
                lambda,
                lambda_over_h2: lambda / (b.h * b.h),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub samples_used: usize,
    pub slope_g: f64,
    pub slope_rho: f64,
    /// max |Ṙ − HR| / HR with Ṙ from central differences.
    pub rdot_vs_hr_residual: f64,
    /// max |G Ṅ m/c² − HR| / HR: Ṙ with only the term from particle growth.
    pub leading_term_residual: f64,
    /// max |R − c t/2| / (c t/2).
    pub r_vs_half_ct_residual: f64,
    /// max |R − l √N| / R over every sample.
    pub r_identity_residual: f64,
    pub max_abs_lambda_over_h2: f64,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Log-log slopes of G and ρ against t over the final decade of samples,
/// plus the residuals of the expansion-rate identities. `l`, `m`, `c` are
/// the scales the series was built from.
pub fn trend_checks(
    states: &[CosmologyState],
    l: f64,
    m: f64,
    c: f64,
) -> Result<TrendReport, CosmologyError> {
    if states.len() < 10 {
        return Err(CosmologyError::TooFewSamples {
            needed: 10,
            got: states.len(),
        });
    }
    let t_last = states.last().expect("non-empty").t;
    let t_first = states
        .iter()
        .map(|s| s.t)
        .find(|&t| t > 0.0)
        .unwrap_or(t_last);
    if (t_last / t_first).is_nan() || t_last / t_first < 100.0 {
        return Err(CosmologyError::InsufficientSpan);
    }
    let tail: Vec<&CosmologyState> = states.iter().filter(|s| s.t >= t_last / 10.0).collect();
    if tail.len() < 3 {
        return Err(CosmologyError::TooFewSamples {
            needed: 3,
            got: tail.len(),
        });
    }
    let log_t: Vec<f64> = tail.iter().map(|s| s.t.log10()).collect();
    let log_g: Vec<f64> = tail.iter().map(|s| s.g.log10()).collect();
    let log_rho: Vec<f64> = tail.iter().map(|s| s.rho.log10()).collect();

    let mut rdot_res: f64 = 0.0;
    let mut lead_res: f64 = 0.0;
    for w in tail.windows(3) {
        let (a, b, cc) = (w[0], w[1], w[2]);
        let span = cc.t - a.t;
        let rdot = (cc.r - a.r) / span;
        let ndot = (cc.n - a.n) / span;
        let hr = b.h * b.r;
        rdot_res = rdot_res.max(((rdot - hr) / hr).abs());
        lead_res = lead_res.max(((b.g * ndot * m / (c * c) - hr) / hr).abs());
    }
    let half_ct = tail
        .iter()
        .map(|s| ((s.r - c * s.t / 2.0) / (c * s.t / 2.0)).abs())
        .fold(0.0, f64::max);
    let identity = states
        .iter()
        .map(|s| ((s.r - l * s.n.sqrt()) / s.r).abs())
        .fold(0.0, f64::max);
    let max_lambda = lambda_estimate(states)?
        .iter()
        .map(|x| x.lambda_over_h2.abs())
        .fold(0.0, f64::max);
    Ok(TrendReport {
        samples_used: tail.len(),
        slope_g: slope(&log_t, &log_g),
        slope_rho: slope(&log_t, &log_rho),
        rdot_vs_hr_residual: rdot_res,
        leading_term_residual: lead_res,
        r_vs_half_ct_residual: half_ct,
        r_identity_residual: identity,
        max_abs_lambda_over_h2: max_lambda,
    })
}
