//! Comparison methods: optimized diagonal RIS, low-complexity
//! symmetric-unitary projection, random phases, and the no-RIS reference.

use num_complex::Complex64;
use rand::Rng;

use crate::bdris_opt::OptimizerConfig;
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::matkit::{self, CMat};
use crate::rate::{self, BdRis, TxCovariance};

/// Diagonal (single-connected) RIS state: per-element phase shifts.
#[derive(Debug, Clone)]
pub struct DiagRis {
    pub phases: Vec<f64>,
}

impl DiagRis {
    /// `Θ = diag(e^{iφ})`, trivially unitary and symmetric.
    pub fn theta(&self) -> CMat {
        let m = self.phases.len();
        let mut t = CMat::zeros(m, m);
        for (i, &p) in self.phases.iter().enumerate() {
            t[(i, i)] = Complex64::from_polar(1.0, p);
        }
        t
    }
}

/// Golden-section maximization on `[a, b]`, returning the best evaluated
/// point. `iters` interval-shrink steps, one new evaluation each.
fn golden_section_max(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - (hi - lo) * inv_phi;
    let mut x2 = lo + (hi - lo) * inv_phi;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * inv_phi;
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * inv_phi;
            f2 = f(x2);
        }
        if f1 > best_f {
            best_x = x1;
            best_f = f1;
        }
        if f2 > best_f {
            best_x = x2;
            best_f = f2;
        }
    }
    (best_x, best_f)
}

const PHASE_GRID: usize = 64;

/// Best phase for one coordinate: 64-point uniform grid, then two
/// golden-section refinement passes around the best point seen.
fn best_phase(f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let step = 2.0 * std::f64::consts::PI / PHASE_GRID as f64;
    let mut best_x = 0.0;
    let mut best_f = f(0.0);
    for k in 1..PHASE_GRID {
        let x = k as f64 * step;
        let v = f(x);
        if v > best_f {
            best_x = x;
            best_f = v;
        }
    }
    let mut bracket = step;
    for _ in 0..2 {
        let (x, v) = golden_section_max(f, best_x - bracket, best_x + bracket, 12);
        if v > best_f {
            best_x = x;
            best_f = v;
        }
        bracket *= 0.618_033_988_749_894_9_f64.powi(12);
    }
    (best_x, best_f)
}

/// Capacity-maximizing diagonal RIS by alternating water-filling with cyclic
/// per-element 1-D phase searches. The returned trace holds the capacity
/// after every accepted update (coordinate or covariance); it is
/// nondecreasing by construction.
pub fn optimize_diag_ris(
    channels: &ChannelSet,
    noise_mw: f64,
    total_power: f64,
    cfg: &OptimizerConfig,
) -> Result<(DiagRis, TxCovariance, Vec<f64>)> {
    cfg.validate()?;
    if noise_mw <= 0.0 || total_power <= 0.0 {
        return Err(Error::contract(
            "optimize_diag_ris: noise and power must be positive",
        ));
    }
    let m = channels.scenario.m;
    let (h, g, f) = (&channels.h, &channels.g, &channels.f);

    // Per-element rank-one contributions: H_eq = H + Σ_j e^{iφ_j}·f_j·g_jᴴ.
    let outer: Vec<CMat> = (0..m)
        .map(|j| {
            let fj = f.column(j).into_owned();
            let gj = g.column(j).into_owned();
            fj * gj.adjoint()
        })
        .collect();
    let h_eq_for = |phases: &[f64]| -> CMat {
        let mut acc = h.clone();
        for (j, o) in outer.iter().enumerate() {
            acc += o.map(|z| z * Complex64::from_polar(1.0, phases[j]));
        }
        acc
    };

    let mut phases = vec![0.0; m];
    let mut cov = rate::optimize_covariance(&h_eq_for(&phases), total_power, noise_mw)?;
    let mut c_cur = rate::capacity_nats(&h_eq_for(&phases), &cov, noise_mw)?;
    let mut trace = vec![c_cur];

    for _ in 0..cfg.max_outer {
        let c_round_start = c_cur;

        for j in 0..m {
            let mut base = h_eq_for(&phases);
            base -= outer[j].map(|z| z * Complex64::from_polar(1.0, phases[j]));
            let sqrt = cov.sqrt_factor();
            let mut eval = |phi: f64| -> f64 {
                let h_eq = &base + outer[j].map(|z| z * Complex64::from_polar(1.0, phi));
                let b = &h_eq * &sqrt;
                let gram = &b * b.adjoint();
                match matkit::eigh(&gram) {
                    Ok((_, lam)) => lam.iter().map(|&l| (l.max(0.0) / noise_mw).ln_1p()).sum(),
                    Err(_) => f64::NEG_INFINITY,
                }
            };
            let (phi_best, c_best) = best_phase(&mut eval);
            if c_best > c_cur {
                phases[j] = phi_best.rem_euclid(2.0 * std::f64::consts::PI);
                c_cur = c_best;
                trace.push(c_cur);
            }
        }

        let h_eq = h_eq_for(&phases);
        cov = rate::optimize_covariance(&h_eq, total_power, noise_mw)?;
        let c_new = rate::capacity_nats(&h_eq, &cov, noise_mw)?;
        c_cur = c_new.max(c_cur);
        trace.push(c_cur);

        if c_cur - c_round_start <= cfg.eps_capacity * c_round_start.abs().max(1e-12) {
            break;
        }
    }
    Ok((DiagRis { phases }, cov, trace))
}

/// Closed-form BD-RIS baseline: maximize the linear term of `‖H_eq‖_F²` over
/// unrestricted unitary `Θ` (polar factor of `T = GᴴHᴴF`), then project onto
/// the symmetric-unitary set (symmetrize, Takagi, `Q_sQ_sᵀ`), then one
/// water-filling pass.
pub fn low_complexity_bdris(
    channels: &ChannelSet,
    noise_mw: f64,
    total_power: f64,
) -> Result<(BdRis, TxCovariance)> {
    if noise_mw <= 0.0 || total_power <= 0.0 {
        return Err(Error::contract(
            "low_complexity_bdris: noise and power must be positive",
        ));
    }
    let m = channels.scenario.m;
    let t = channels.g.adjoint() * channels.h.adjoint() * &channels.f;

    let q_s = if matkit::frob(&t) == 0.0 {
        CMat::identity(m, m)
    } else {
        let (u_t, _, v_t) = matkit::svd(&t)?;
        let theta_relaxed = &v_t * u_t.adjoint();
        let theta_sym = (&theta_relaxed + theta_relaxed.transpose()).scale(0.5);
        let (q, _) = matkit::takagi(&theta_sym)?;
        q
    };
    let ris = BdRis { q: q_s };
    let h_eq = rate::equivalent_channel(&channels.h, &channels.f, &channels.g, &ris.theta())?;
    let cov = rate::optimize_covariance(&h_eq, total_power, noise_mw)?;
    Ok((ris, cov))
}

/// Diagonal RIS with i.i.d. uniform phases on `[0, 2π)`.
pub fn random_diag<R: Rng + ?Sized>(rng: &mut R, m: usize) -> DiagRis {
    let phases = (0..m)
        .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
        .collect();
    DiagRis { phases }
}

/// Water-filling capacity of the direct link alone.
pub fn no_ris_capacity(channels: &ChannelSet, noise_mw: f64, total_power: f64) -> Result<f64> {
    let cov = rate::optimize_covariance(&channels.h, total_power, noise_mw)?;
    rate::capacity_nats(&channels.h, &cov, noise_mw)
}
