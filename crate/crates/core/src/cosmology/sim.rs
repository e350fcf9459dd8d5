use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use super::model::{creation_rate, CosmologyState, Scales};
use super::CosmologyError;
use crate::quantities::{sha256_hex, ConstantsTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Deterministic,
    Stochastic,
}

/// Which Compton time drives the creation law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clock {
    Pion,
    Planck,
}

impl Clock {
    pub fn tau(&self, table: &ConstantsTable) -> Result<f64, CosmologyError> {
        Ok(table.magnitude(match self {
            Clock::Pion => "tau_pi",
            Clock::Planck => "tau_planck",
        })?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub n0: f64,
    /// s
    pub t_end: f64,
    /// s
    pub dt: f64,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub ensemble_size: usize,
    pub output_stride: usize,
    pub clock: Clock,
}

impl SimulationConfig {
    /// Deterministic run from N0 = 1 at dt = τ/10.
    pub fn deterministic(t_end: f64, tau: f64) -> Self {
        Self {
            n0: 1.0,
            t_end,
            dt: tau / 10.0,
            mode: Mode::Deterministic,
            seed: None,
            ensemble_size: 1,
            output_stride: 1,
            clock: Clock::Pion,
        }
    }

    pub fn stochastic(t_end: f64, tau: f64, seed: u64, ensemble_size: usize) -> Self {
        Self {
            mode: Mode::Stochastic,
            seed: Some(seed),
            ensemble_size,
            ..Self::deterministic(t_end, tau)
        }
    }

    pub fn validate(&self, tau: f64) -> Result<(), CosmologyError> {
        let bad = |m: &str| Err(CosmologyError::InvalidConfig(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive");
        }
        if self.dt > tau {
            return Err(CosmologyError::StepExceedsComptonTime);
        }
        if !(self.n0 >= 1.0 && self.n0.is_finite()) {
            return bad("N0 must be at least 1");
        }
        if self.ensemble_size < 1 {
            return bad("ensemble size must be at least 1");
        }
        if self.output_stride < 1 {
            return bad("output stride must be at least 1");
        }
        match self.mode {
            Mode::Stochastic if self.seed.is_none() => bad("stochastic mode requires a seed"),
            Mode::Stochastic if self.n0.fract() != 0.0 => {
                bad("stochastic mode needs an integer N0")
            }
            Mode::Deterministic if self.ensemble_size > 1 => bad("ensembles need stochastic mode"),
            _ => Ok(()),
        }
    }

    /// Number of integration steps; tolerant of `t_end/dt` landing just
    /// below an integer.
    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt * (1.0 + 1e-12)).floor() as u64
    }

    pub fn sample_count(&self) -> usize {
        (self.steps() / self.output_stride as u64) as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleStat {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub config: SimulationConfig,
    pub config_fingerprint: String,
    pub constants_fingerprint: String,
    pub tau: f64,
    pub scales: Scales,
    pub states: Vec<CosmologyState>,
    /// Per-sample ensemble mean and sample standard deviation of N.
    pub ensemble: Option<Vec<EnsembleStat>>,
}

fn rk4_step(n: f64, dt: f64, tau: f64) -> f64 {
    let k1 = creation_rate(n, tau);
    let k2 = creation_rate(n + 0.5 * dt * k1, tau);
    let k3 = creation_rate(n + 0.5 * dt * k2, tau);
    let k4 = creation_rate(n + dt * k3, tau);
    n + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Above this mean the Poisson draw is replaced by its normal limit.
const POISSON_LIMIT: f64 = 1e12;

fn poisson_jump(mean: f64, rng: &mut ChaCha8Rng) -> f64 {
    if mean <= POISSON_LIMIT {
        Poisson::new(mean)
            .expect("positive finite mean")
            .sample(rng)
            .floor()
    } else {
        let x: f64 = Normal::new(mean, mean.sqrt()).expect("finite").sample(rng);
        x.round().max(0.0)
    }
}

/// N at every recorded sample of one trajectory.
fn trajectory(cfg: &SimulationConfig, tau: f64, rng: Option<&mut ChaCha8Rng>) -> Vec<f64> {
    let steps = cfg.steps();
    let stride = cfg.output_stride as u64;
    let mut out = Vec::with_capacity(cfg.sample_count());
    let mut n = cfg.n0;
    out.push(n);
    match rng {
        None => {
            for k in 1..=steps {
                n = rk4_step(n, cfg.dt, tau);
                if k % stride == 0 {
                    out.push(n);
                }
            }
        }
        Some(rng) => {
            for k in 1..=steps {
                n += poisson_jump(creation_rate(n, tau) * cfg.dt, rng);
                if k % stride == 0 {
                    out.push(n);
                }
            }
        }
    }
    out
}

fn config_fingerprint(cfg: &SimulationConfig, constants: &str) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    sha256_hex(format!("{text}\n{constants}").as_bytes())
}

/// Integrates the creation law. Deterministic mode uses fixed-step RK4;
/// stochastic mode adds Poisson(√N dt/τ) particles per step, trajectory `i`
/// seeded with `seed + i`. State rows of an ensemble follow trajectory 0.
pub fn run_simulation(
    cfg: &SimulationConfig,
    table: &ConstantsTable,
) -> Result<TimeSeries, CosmologyError> {
    let tau = cfg.clock.tau(table)?;
    cfg.validate(tau)?;
    let scales = Scales::from_table(table)?;

    let (first, ensemble) = match cfg.mode {
        Mode::Deterministic => (trajectory(cfg, tau, None), None),
        Mode::Stochastic => {
            let seed = cfg.seed.expect("validated");
            let runs: Vec<Vec<f64>> = (0..cfg.ensemble_size as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
                    trajectory(cfg, tau, Some(&mut rng))
                })
                .collect();
            let stats = (0..runs[0].len())
                .map(|k| column_stats(runs.iter().map(|r| r[k])))
                .collect();
            (runs.into_iter().next().expect("at least one"), Some(stats))
        }
    };

    let states = first
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let t = (k as u64 * cfg.output_stride as u64) as f64 * cfg.dt;
            CosmologyState::at(t, n, &scales)
        })
        .collect();
    Ok(TimeSeries {
        config: cfg.clone(),
        config_fingerprint: config_fingerprint(cfg, table.fingerprint()),
        constants_fingerprint: table.fingerprint().to_string(),
        tau,
        scales,
        states,
        ensemble,
    })
}

/// Mean and sample standard deviation, summed in iteration order.
fn column_stats(values: impl Iterator<Item = f64> + Clone) -> EnsembleStat {
    let count = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / count;
    let var = if count > 1.0 {
        values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    EnsembleStat {
        mean,
        std: var.sqrt(),
    }
}

impl TimeSeries {
    pub fn final_state(&self) -> &CosmologyState {
        self.states.last().expect("at least one sample")
    }

    /// Standard error of the ensemble mean at the final sample.
    pub fn final_mean_and_standard_error(&self) -> Option<(f64, f64)> {
        let stats = self.ensemble.as_ref()?;
        let last = stats.last()?;
        Some((
            last.mean,
            last.std / (self.config.ensemble_size as f64).sqrt(),
        ))
    }

    pub fn csv_header(&self) -> &'static str {
        if self.ensemble.is_some() {
            "t,N,G,R,H,rho,N_mean,N_std"
        } else {
            "t,N,G,R,H,rho"
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(self.csv_header());
        out.push('\n');
        for (k, s) in self.states.iter().enumerate() {
            let _ = write!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                s.t, s.n, s.g, s.r, s.h, s.rho
            );
            if let Some(stats) = &self.ensemble {
                let _ = write!(out, ",{:e},{:e}", stats[k].mean, stats[k].std);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let mut v = serde_json::to_value(s).expect("state serializes");
                if let Some(stats) = &self.ensemble {
                    v["N_mean"] = stats[k].mean.into();
                    v["N_std"] = stats[k].std.into();
                }
                v
            })
            .collect();
        serde_json::json!({
            "config": {
                "N0": self.config.n0,
                "t_end": self.config.t_end,
                "dt": self.config.dt,
                "tau": self.tau,
                "mode": self.config.mode,
                "clock": self.config.clock,
                "seed": self.config.seed,
                "ensemble_size": self.config.ensemble_size,
                "output_stride": self.config.output_stride,
                "config_fingerprint": self.config_fingerprint,
                "constants_fingerprint": self.constants_fingerprint,
            },
            "samples": rows,
        })
    }
}
