//! Equivalent-channel assembly, capacity evaluation, and the convex
//! covariance update.
//!
//! For a fixed scattering matrix the optimal transmit covariance is
//! `R_xx = V diag(p) Vᴴ` with `V` the transmit-side singular basis of the
//! equivalent channel and `p` the water-filling allocation over the squared
//! singular values. The water level is found by exact active-set enumeration
//! (sort gains descending, test k = d..1), so there is no iterative
//! tolerance anywhere in this module.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matkit::{self, CMat};

/// Transmit covariance in factored form: `R_xx = V diag(p) Vᴴ` with
/// orthonormal `V` (n_t × d) and per-stream powers `p` in mW.
#[derive(Debug, Clone)]
pub struct TxCovariance {
    pub v: CMat,
    pub p: Vec<f64>,
}

impl TxCovariance {
    /// Number of streams.
    pub fn d(&self) -> usize {
        self.p.len()
    }

    /// Dense `n_t × n_t` covariance matrix.
    pub fn matrix(&self) -> CMat {
        let mut pm = CMat::zeros(self.d(), self.d());
        for (i, &pi) in self.p.iter().enumerate() {
            pm[(i, i)] = Complex64::new(pi, 0.0);
        }
        &self.v * pm * self.v.adjoint()
    }

    /// `V diag(√p)`, the square-root factor used in capacity evaluations.
    pub fn sqrt_factor(&self) -> CMat {
        let mut out = self.v.clone();
        for (j, &pj) in self.p.iter().enumerate() {
            let s = pj.max(0.0).sqrt();
            for i in 0..out.nrows() {
                out[(i, j)] *= s;
            }
        }
        out
    }
}

/// Scattering state of a BD-RIS held as its unitary Takagi factor;
/// `Θ = QQᵀ` is symmetric by construction and unitary because `Q` is.
#[derive(Debug, Clone)]
pub struct BdRis {
    pub q: CMat,
}

impl BdRis {
    pub fn identity(m: usize) -> Self {
        BdRis {
            q: CMat::identity(m, m),
        }
    }

    /// The scattering matrix `Θ = QQᵀ`, symmetrized entrywise so that
    /// `Θ = Θᵀ` holds exactly in floating point.
    pub fn theta(&self) -> CMat {
        let t = &self.q * self.q.transpose();
        let mut out = t.clone();
        for i in 0..t.nrows() {
            for j in 0..t.ncols() {
                out[(i, j)] = (t[(i, j)] + t[(j, i)]).scale(0.5);
            }
        }
        out
    }

    /// `‖QᴴQ − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        matkit::unitary_residual(&self.q)
    }
}

/// Equivalent MIMO channel `H + F·Θ·Gᴴ`.
pub fn equivalent_channel(h: &CMat, f: &CMat, g: &CMat, theta: &CMat) -> Result<CMat> {
    let (n_r, n_t) = (h.nrows(), h.ncols());
    let m = theta.nrows();
    if theta.ncols() != m {
        return Err(Error::contract("equivalent_channel: theta must be square"));
    }
    if f.nrows() != n_r || f.ncols() != m || g.nrows() != n_t || g.ncols() != m {
        return Err(Error::contract(format!(
            "equivalent_channel: dims H {}x{}, F {}x{}, G {}x{}, theta {}x{}",
            n_r,
            n_t,
            f.nrows(),
            f.ncols(),
            g.nrows(),
            g.ncols(),
            m,
            m
        )));
    }
    Ok(h + f * theta * g.adjoint())
}

/// Capacity `log det(I + (1/σ²)·H_eq R_xx H_eqᴴ)` in nats, computed from the
/// Hermitian PSD form `B Bᴴ` with `B = H_eq·V·diag(√p)`.
pub fn capacity_nats(h_eq: &CMat, cov: &TxCovariance, noise_mw: f64) -> Result<f64> {
    if noise_mw <= 0.0 {
        return Err(Error::contract("capacity_nats: noise power must be positive"));
    }
    let b = h_eq * cov.sqrt_factor();
    let gram = &b * b.adjoint();
    let (_, lam) = matkit::eigh(&gram)?;
    let mut c = 0.0;
    for &l in &lam {
        c += (l.max(0.0) / noise_mw).ln_1p();
    }
    if !c.is_finite() {
        return Err(Error::numeric(format!("capacity_nats: non-finite capacity {c}")));
    }
    Ok(c)
}

/// Nats to b/s/Hz.
pub fn nats_to_bps_hz(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Water-filling allocation: `p_i = max(0, μ − σ²/g_i)` with the level `μ`
/// chosen so the powers sum to `total_power`. Exact active-set solution:
/// gains are sorted descending and k = d..1 active streams are tested until
/// the weakest active stream receives nonnegative power.
pub fn water_fill(gains: &[f64], total_power: f64, noise_mw: f64) -> Result<Vec<f64>> {
    if gains.is_empty() {
        return Err(Error::contract("water_fill: empty gain vector"));
    }
    if total_power <= 0.0 || noise_mw <= 0.0 {
        return Err(Error::contract(
            "water_fill: total power and noise must be positive",
        ));
    }
    if gains.iter().any(|&g| g < 0.0 || !g.is_finite()) {
        return Err(Error::contract("water_fill: gains must be finite and >= 0"));
    }
    if gains.iter().all(|&g| g <= 0.0) {
        return Err(Error::contract("water_fill: at least one gain must be positive"));
    }

    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&i, &j| gains[j].total_cmp(&gains[i]));

    let inv_g: Vec<f64> = order
        .iter()
        .map(|&i| if gains[i] > 0.0 { noise_mw / gains[i] } else { f64::INFINITY })
        .collect();
    let d_pos = inv_g.iter().filter(|v| v.is_finite()).count();

    let mut p = vec![0.0; gains.len()];
    for k in (1..=d_pos).rev() {
        let sum_inv: f64 = inv_g[..k].iter().sum();
        let mu = (total_power + sum_inv) / k as f64;
        if mu - inv_g[k - 1] >= 0.0 {
            for (rank, &idx) in order.iter().enumerate().take(k) {
                p[idx] = mu - inv_g[rank];
            }
            return Ok(p);
        }
    }
    // Unreachable for positive power: k = 1 always yields μ − σ²/g_max = P > 0.
    Err(Error::numeric("water_fill: active-set search failed"))
}

/// Optimal covariance for a fixed equivalent channel: transmit-side singular
/// basis plus water-filling over the squared singular values. An all-zero
/// channel degenerates to a uniform allocation on the leading coordinate
/// basis (capacity 0).
pub fn optimize_covariance(h_eq: &CMat, total_power: f64, noise_mw: f64) -> Result<TxCovariance> {
    let n_t = h_eq.ncols();
    let d = h_eq.nrows().min(n_t);
    if matkit::frob(h_eq) == 0.0 {
        let mut v = CMat::zeros(n_t, d);
        for i in 0..d {
            v[(i, i)] = Complex64::new(1.0, 0.0);
        }
        return Ok(TxCovariance {
            v,
            p: vec![total_power / d as f64; d],
        });
    }
    let (_, s, v) = matkit::svd(h_eq)?;
    let gains: Vec<f64> = s.iter().take(d).map(|si| si * si).collect();
    let p = water_fill(&gains, total_power, noise_mw)?;
    let v = v.columns(0, d).into_owned();
    Ok(TxCovariance { v, p })
}

/// Number of streams carrying more than `1e-6·total_power`.
pub fn active_streams(p: &[f64], total_power: f64) -> usize {
    p.iter().filter(|&&pi| pi > 1e-6 * total_power).count()
}
