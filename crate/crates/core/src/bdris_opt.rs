//! MM surrogate and Riemannian gradient ascent on the unitary group.
//!
//! For a fixed transmit covariance the capacity is a non-concave function of
//! the scattering matrix `Θ`. Each MM round freezes a concave quadratic
//! minorizer `A_t + J(Θ)` that touches the capacity at the expansion point
//! and lower-bounds it everywhere, then maximizes `J(QQᵀ)` over unitary `Q`
//! by projected-gradient geodesic steps `Q ← Q·exp(μS)`. Maximizing a tangent
//! minorizer can never decrease the true objective, so the capacity trace is
//! nondecreasing at every level of the loop nest.
//!
//! Conventions that matter (all verified by the finite-difference and
//! line-evaluation oracles in the tests):
//!
//! * `Z_t = (1/σ²)·H_tᴴ − H̄ᴴR_t` — the linear term of the expanded bound
//!   carries `1/σ²`.
//! * The Wirtinger gradient of `J(QQᵀ)` is `∇_{Q*}J = (X + Xᵀ)·Q*` with
//!   `X = Aᴴ − (F_tᴴF_t)(QQᵀ)(ḠᴴḠ)`; the transpose part cannot be dropped
//!   unless `X` is symmetric.
//! * The ascent direction in the tangent space is
//!   `S = (Qᴴ∇J − ∇JᴴQ)/2`, which is skew-Hermitian by construction.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::baselines;
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::matkit::{self, CMat};
use crate::rate::{self, BdRis, TxCovariance};

/// Frozen quantities of one MM surrogate around the expansion point `Θ_t`.
///
/// `constant + J(Θ)` is tangent to the capacity at `Θ_t` and lower-bounds it
/// on the whole feasible set.
#[derive(Debug, Clone)]
pub struct MinorizerState {
    /// Equivalent channel at the expansion point, `n_r × d`.
    pub h_t: CMat,
    /// `(1/σ²)I − (σ²I + H_tH_tᴴ)⁻¹`, Hermitian PSD, `n_r × n_r`.
    pub r_t: CMat,
    /// `R_t^{1/2}·F`, `n_r × m`.
    pub f_t: CMat,
    /// `(1/σ²)·H_tᴴ − H̄ᴴR_t`, `d × n_r`.
    pub z_t: CMat,
    /// `Ḡᴴ·Z_t·F`, the linear-term matrix of `J`, `m × m`.
    pub a: CMat,
    /// Tangency constant `C(Θ_t) − J(Θ_t)`.
    pub constant: f64,
    /// Cached `F_tᴴF_t`.
    pub quad_left: CMat,
    /// Cached `ḠᴴḠ`.
    pub quad_right: CMat,
    pub noise_mw: f64,
}

/// Knobs of the manifold optimizer. Defaults follow the shipped experiment
/// profiles; `step_*` control the accept-first backtracking line search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub step_init: f64,
    pub step_grow: f64,
    pub step_shrink: f64,
    pub max_backtracks: usize,
    /// Relative capacity-improvement threshold of the MM and outer loops.
    pub eps_capacity: f64,
    /// Relative surrogate-improvement threshold of the inner loop.
    pub eps_surrogate: f64,
    pub max_outer: usize,
    pub max_mm: usize,
    pub max_inner: usize,
    /// Accepted geodesic steps between unitarity polishes.
    pub reunitarize_every: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            step_init: 1.0,
            step_grow: 2.0,
            step_shrink: 0.5,
            max_backtracks: 30,
            eps_capacity: 1e-4,
            eps_surrogate: 1e-6,
            max_outer: 100,
            max_mm: 200,
            max_inner: 500,
            reunitarize_every: 50,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.step_init > 0.0
            && self.step_grow > 0.0
            && self.step_shrink > 0.0
            && self.eps_capacity > 0.0
            && self.eps_surrogate > 0.0
            && self.max_backtracks > 0
            && self.max_outer > 0
            && self.max_mm > 0
            && self.max_inner > 0
            && self.reunitarize_every > 0;
        if !positive {
            return Err(Error::contract("optimizer config: all knobs must be positive"));
        }
        if !(self.step_shrink < 1.0 && self.step_grow > 1.0) {
            return Err(Error::contract(
                "optimizer config: need step_shrink < 1 < step_grow",
            ));
        }
        Ok(())
    }
}

/// Scattering-matrix initialization for [`maximize_capacity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// `Q = I`.
    Identity,
    /// Haar-random unitary from the given seed.
    RandomUnitary { seed: u64 },
    /// Takagi factor of the optimized diagonal-RIS scattering matrix.
    DiagRisTakagi,
    /// Takagi factor of the low-complexity symmetric-unitary projection.
    LowComplexity,
    /// Better of {DiagRisTakagi, LowComplexity} by initial water-filled
    /// capacity; ties go to the first. Guarantees the final BD-RIS rate is
    /// at least the optimized diagonal-RIS rate on the same realization.
    #[default]
    BestOf,
}

/// One inner (surrogate-maximization) run.
#[derive(Debug, Clone, Default)]
pub struct InnerTrace {
    /// `J` after the initial point and after every accepted step.
    pub j_values: Vec<f64>,
    /// Geodesic arclength of each accepted step.
    pub step_sizes: Vec<f64>,
    /// No ascent step was found at the first iterate.
    pub stalled: bool,
    /// Loop exited because the marginal gain dropped below `eps_surrogate`
    /// (as opposed to hitting `max_inner`).
    pub converged_by_eps: bool,
    /// Largest ambient gradient norm seen during the run.
    pub peak_grad_norm: f64,
}

/// One MM loop (fixed covariance).
#[derive(Debug, Clone, Default)]
pub struct MmTrace {
    /// Capacity after the initial point and after every MM round.
    pub capacity_nats: Vec<f64>,
    pub inner: Vec<InnerTrace>,
}

/// Full record of one [`maximize_capacity`] run.
#[derive(Debug, Clone, Default)]
pub struct IterationTrace {
    /// Capacity after each outer alternation (index 0 = after the initial
    /// covariance update).
    pub outer_capacity_nats: Vec<f64>,
    /// Capacity after every single block update (covariance or scattering),
    /// interleaved in execution order.
    pub block_capacity_nats: Vec<f64>,
    /// MM traces, one per outer iteration.
    pub mm_rounds: Vec<MmTrace>,
    pub wall_ms_covariance: f64,
    pub wall_ms_scattering: f64,
    pub converged: bool,
}

impl IterationTrace {
    pub fn outer_iterations(&self) -> usize {
        self.mm_rounds.len()
    }

    pub fn final_capacity_nats(&self) -> f64 {
        self.outer_capacity_nats.last().copied().unwrap_or(0.0)
    }
}

/// Absorb the transmit covariance into the channel: `H̄ = H·V·P^{1/2}` and
/// `Ḡ = P^{1/2}·Vᴴ·G`. Capacity computed from `H̄ + FΘḠᴴ` with identity
/// covariance equals the original capacity for every feasible `Θ`.
pub fn absorb_covariance(h: &CMat, g: &CMat, cov: &TxCovariance) -> Result<(CMat, CMat)> {
    if h.ncols() != cov.v.nrows() || g.nrows() != cov.v.nrows() {
        return Err(Error::contract(format!(
            "absorb_covariance: H is {}x{}, G is {}x{}, V is {}x{}",
            h.nrows(),
            h.ncols(),
            g.nrows(),
            g.ncols(),
            cov.v.nrows(),
            cov.v.ncols()
        )));
    }
    let sqrt = cov.sqrt_factor();
    Ok((h * &sqrt, sqrt.adjoint() * g))
}

/// Capacity of the absorbed channel `H̄ + FΘḠᴴ` (identity covariance).
pub fn absorbed_capacity(
    h_bar: &CMat,
    f: &CMat,
    g_bar: &CMat,
    theta: &CMat,
    noise_mw: f64,
) -> Result<f64> {
    if noise_mw <= 0.0 {
        return Err(Error::contract("absorbed_capacity: noise must be positive"));
    }
    let h_eq = h_bar + f * theta * g_bar.adjoint();
    let gram = &h_eq * h_eq.adjoint();
    let (_, lam) = matkit::eigh(&gram)?;
    let c: f64 = lam.iter().map(|&l| (l.max(0.0) / noise_mw).ln_1p()).sum();
    if !c.is_finite() {
        return Err(Error::numeric("absorbed_capacity: non-finite result"));
    }
    Ok(c)
}

/// Freeze the MM surrogate around `theta_t`.
pub fn build_minorizer(
    h_bar: &CMat,
    f: &CMat,
    g_bar: &CMat,
    theta_t: &CMat,
    noise_mw: f64,
) -> Result<MinorizerState> {
    if noise_mw <= 0.0 {
        return Err(Error::contract("build_minorizer: noise must be positive"));
    }
    let n_r = h_bar.nrows();
    let h_t = h_bar + f * theta_t * g_bar.adjoint();

    // R_t = (1/σ²)I − (σ²I + H_tH_tᴴ)⁻¹ through the eigenbasis of H_tH_tᴴ,
    // which also yields the PSD square root needed for F_t.
    let gram = &h_t * h_t.adjoint();
    let (w, lam) = matkit::eigh(&gram)?;
    let mut r_diag = CMat::zeros(n_r, n_r);
    let mut r_sqrt_diag = CMat::zeros(n_r, n_r);
    for (i, &l) in lam.iter().enumerate() {
        let l = l.max(0.0);
        let r = l / (noise_mw * (noise_mw + l));
        r_diag[(i, i)] = Complex64::new(r, 0.0);
        r_sqrt_diag[(i, i)] = Complex64::new(r.sqrt(), 0.0);
    }
    let r_t = &w * r_diag * w.adjoint();
    let r_sqrt = &w * r_sqrt_diag * w.adjoint();

    let f_t = &r_sqrt * f;
    let z_t = h_t.adjoint().map(|z| z / noise_mw) - h_bar.adjoint() * &r_t;
    let a = g_bar.adjoint() * &z_t * f;
    let quad_left = f_t.adjoint() * &f_t;
    let quad_right = g_bar.adjoint() * g_bar;

    let mut state = MinorizerState {
        h_t,
        r_t,
        f_t,
        z_t,
        a,
        constant: 0.0,
        quad_left,
        quad_right,
        noise_mw,
    };
    let c_t = absorbed_capacity(h_bar, f, g_bar, theta_t, noise_mw)?;
    let j_t = state.surrogate_value_theta(theta_t);
    if !j_t.is_finite() {
        return Err(Error::numeric("build_minorizer: non-finite surrogate"));
    }
    state.constant = c_t - j_t;
    Ok(state)
}

impl MinorizerState {
    /// `J(Θ) = 2 Re tr(AΘ) − tr((F_tᴴF_t) Θ (ḠᴴḠ) Θᴴ)`.
    pub fn surrogate_value_theta(&self, theta: &CMat) -> f64 {
        let linear = (&self.a * theta).trace();
        let quad = (&self.quad_left * theta * &self.quad_right * theta.adjoint()).trace();
        2.0 * linear.re - quad.re
    }

    /// `J(QQᵀ)`.
    pub fn surrogate_value(&self, q: &CMat) -> f64 {
        self.surrogate_value_theta(&(q * q.transpose()))
    }

    /// Wirtinger gradient `∇_{Q*} J = (X + Xᵀ)·Q*` with
    /// `X = Aᴴ − (F_tᴴF_t)(QQᵀ)(ḠᴴḠ)`.
    pub fn surrogate_gradient(&self, q: &CMat) -> CMat {
        let theta = q * q.transpose();
        let x = self.a.adjoint() - &self.quad_left * theta * &self.quad_right;
        let xs = &x + x.transpose();
        xs * q.map(|z| z.conj())
    }
}

/// Project the ambient gradient onto the tangent space at `Q`:
/// `S = (Qᴴ∇J − ∇JᴴQ)/2`. The result is skew-Hermitian exactly (entrywise
/// construction), and moving along `Q·exp(μS)` for small `μ > 0` ascends `J`.
pub fn tangent_project(q: &CMat, euclid_grad: &CMat) -> CMat {
    let w = q.adjoint() * euclid_grad;
    let n = w.nrows();
    let mut s = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = (w[(i, j)] - w[(j, i)].conj()).scale(0.5);
        }
    }
    s
}

/// Geodesic update `Q·exp(μ·S)`; returns `Q` unchanged for `μ = 0`.
pub fn geodesic_step(q: &CMat, s_skew: &CMat, mu: f64) -> Result<CMat> {
    if mu == 0.0 {
        return Ok(q.clone());
    }
    let e = matkit::expm_skew(&s_skew.map(|z| z.scale(mu)))?;
    Ok(q * e)
}

/// Maximize `J(QQᵀ)` over unitary `Q` from `q0` by projected-gradient
/// geodesic steps with an accept-first backtracking line search (grow the
/// step on success, halve on failure). Returns the final point, its
/// surrogate value, and the trace; `stalled` is set when no ascent step
/// exists at the first iterate, in which case `q0` comes back unchanged.
///
/// The convergence test compares each step's gain against the gain
/// accumulated over the whole run: the absolute value of `J` carries a large
/// `1/σ²`-scaled offset, so normalizing by it would end the loop long before
/// the capacity-relevant part of `J` stops moving.
pub fn maximize_surrogate(
    state: &MinorizerState,
    q0: &CMat,
    cfg: &OptimizerConfig,
) -> Result<(CMat, f64, InnerTrace)> {
    cfg.validate()?;
    let mut q = q0.clone();
    let mut j_cur = state.surrogate_value(&q);
    let j_start = j_cur;
    let mut trace = InnerTrace {
        j_values: vec![j_cur],
        ..InnerTrace::default()
    };
    let mut mu = cfg.step_init;
    let mut accepted_steps = 0usize;

    for iter in 0..cfg.max_inner {
        let grad = state.surrogate_gradient(&q);
        trace.peak_grad_norm = trace.peak_grad_norm.max(matkit::frob(&grad));
        let s = tangent_project(&q, &grad);
        let s_norm = matkit::frob(&s);
        if s_norm == 0.0 {
            trace.converged_by_eps = true;
            break;
        }

        // μ is a geodesic arclength: the trial step normalizes the direction
        // so the search behaves identically across channel power scales.
        let mut accepted = false;
        for _ in 0..cfg.max_backtracks {
            let q_try = geodesic_step(&q, &s, mu / s_norm)?;
            let j_try = state.surrogate_value(&q_try);
            if j_try > j_cur {
                q = q_try;
                j_cur = j_try;
                trace.step_sizes.push(mu);
                mu *= cfg.step_grow;
                accepted = true;
                break;
            }
            mu *= cfg.step_shrink;
        }
        if !accepted {
            if iter == 0 {
                trace.stalled = true;
                return Ok((q0.clone(), trace.j_values[0], trace));
            }
            trace.converged_by_eps = true;
            break;
        }

        accepted_steps += 1;
        if accepted_steps % cfg.reunitarize_every == 0 {
            q = matkit::nearest_unitary(&q)?;
            j_cur = state.surrogate_value(&q);
            // A fresh long trial arc lets the search hop out of narrow
            // zigzag valleys where the adapted step has collapsed.
            mu = mu.max(cfg.step_init);
        }

        let j_prev = *trace.j_values.last().expect("trace never empty");
        trace.j_values.push(j_cur);
        let accumulated = j_cur - j_start;
        if j_cur - j_prev <= cfg.eps_surrogate * accumulated.abs() {
            trace.converged_by_eps = true;
            break;
        }
    }
    Ok((q, j_cur, trace))
}

/// MM loop for a fixed covariance: rebuild the minorizer at the current `Θ`,
/// maximize it, repeat until the relative capacity improvement drops below
/// `eps_capacity`. The capacity sequence is nondecreasing by the MM
/// guarantee.
pub fn optimize_scattering(
    h_bar: &CMat,
    f: &CMat,
    g_bar: &CMat,
    q0: &CMat,
    noise_mw: f64,
    cfg: &OptimizerConfig,
) -> Result<(BdRis, MmTrace)> {
    cfg.validate()?;
    let mut ris = BdRis { q: q0.clone() };
    let mut c_cur = absorbed_capacity(h_bar, f, g_bar, &ris.theta(), noise_mw)?;
    let mut trace = MmTrace {
        capacity_nats: vec![c_cur],
        inner: Vec::new(),
    };

    for _ in 0..cfg.max_mm {
        let theta = ris.theta();
        let state = build_minorizer(h_bar, f, g_bar, &theta, noise_mw)?;
        let (q_new, _, inner) = maximize_surrogate(&state, &ris.q, cfg)?;
        ris = BdRis { q: q_new };
        let c_new = absorbed_capacity(h_bar, f, g_bar, &ris.theta(), noise_mw)?;
        trace.capacity_nats.push(c_new);
        trace.inner.push(inner);
        let done = c_new - c_cur <= cfg.eps_capacity * c_cur.abs().max(1e-12);
        c_cur = c_new;
        if done {
            break;
        }
    }
    Ok((ris, trace))
}

fn initial_factor(
    channels: &ChannelSet,
    noise_mw: f64,
    total_power: f64,
    init: InitStrategy,
    cfg: &OptimizerConfig,
) -> Result<CMat> {
    let m = channels.scenario.m;
    match init {
        InitStrategy::Identity => Ok(CMat::identity(m, m)),
        InitStrategy::RandomUnitary { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(matkit::random_unitary(&mut rng, m))
        }
        InitStrategy::DiagRisTakagi => {
            let (diag, _, _) = baselines::optimize_diag_ris(channels, noise_mw, total_power, cfg)?;
            let (q, _) = matkit::takagi(&diag.theta())?;
            Ok(q)
        }
        InitStrategy::LowComplexity => {
            let (ris, _) = baselines::low_complexity_bdris(channels, noise_mw, total_power)?;
            Ok(ris.q)
        }
        InitStrategy::BestOf => {
            let wf_cap = |q: &CMat| -> Result<f64> {
                let theta = BdRis { q: q.clone() }.theta();
                let h_eq = rate::equivalent_channel(&channels.h, &channels.f, &channels.g, &theta)?;
                let cov = rate::optimize_covariance(&h_eq, total_power, noise_mw)?;
                rate::capacity_nats(&h_eq, &cov, noise_mw)
            };
            let q_diag =
                initial_factor(channels, noise_mw, total_power, InitStrategy::DiagRisTakagi, cfg)?;
            let q_lc =
                initial_factor(channels, noise_mw, total_power, InitStrategy::LowComplexity, cfg)?;
            let c_diag = wf_cap(&q_diag)?;
            let c_lc = wf_cap(&q_lc)?;
            // First maximizer wins ties.
            Ok(if c_diag >= c_lc { q_diag } else { q_lc })
        }
    }
}

/// Alternating maximization of the capacity over the transmit covariance
/// (water-filling) and the BD-RIS scattering matrix (MM + geodesic ascent),
/// until the relative capacity improvement per outer round drops below
/// `eps_capacity`.
pub fn maximize_capacity(
    channels: &ChannelSet,
    noise_mw: f64,
    total_power: f64,
    init: InitStrategy,
    cfg: &OptimizerConfig,
) -> Result<(BdRis, TxCovariance, IterationTrace)> {
    cfg.validate()?;
    if noise_mw <= 0.0 || total_power <= 0.0 {
        return Err(Error::contract(
            "maximize_capacity: noise and power must be positive",
        ));
    }
    let (h, g, f) = (&channels.h, &channels.g, &channels.f);

    let mut ris = BdRis {
        q: initial_factor(channels, noise_mw, total_power, init, cfg)?,
    };
    let mut trace = IterationTrace::default();

    let t0 = Instant::now();
    let h_eq = rate::equivalent_channel(h, f, g, &ris.theta())?;
    let mut cov = rate::optimize_covariance(&h_eq, total_power, noise_mw)?;
    let mut c_cur = rate::capacity_nats(&h_eq, &cov, noise_mw)?;
    trace.wall_ms_covariance += t0.elapsed().as_secs_f64() * 1e3;
    trace.outer_capacity_nats.push(c_cur);
    trace.block_capacity_nats.push(c_cur);

    for _ in 0..cfg.max_outer {
        // Scattering update for the fixed covariance.
        let t0 = Instant::now();
        let (h_bar, g_bar) = absorb_covariance(h, g, &cov)?;
        let (ris_new, mm) = optimize_scattering(&h_bar, f, &g_bar, &ris.q, noise_mw, cfg)?;
        ris = ris_new;
        trace.wall_ms_scattering += t0.elapsed().as_secs_f64() * 1e3;
        let h_eq = rate::equivalent_channel(h, f, g, &ris.theta())?;
        trace
            .block_capacity_nats
            .push(rate::capacity_nats(&h_eq, &cov, noise_mw)?);
        trace.mm_rounds.push(mm);

        // Covariance update for the fixed scattering matrix.
        let t0 = Instant::now();
        cov = rate::optimize_covariance(&h_eq, total_power, noise_mw)?;
        let c_new = rate::capacity_nats(&h_eq, &cov, noise_mw)?;
        trace.wall_ms_covariance += t0.elapsed().as_secs_f64() * 1e3;
        trace.block_capacity_nats.push(c_new);
        trace.outer_capacity_nats.push(c_new);

        let done = c_new - c_cur <= cfg.eps_capacity * c_cur.abs().max(1e-12);
        c_cur = c_new;
        if done {
            trace.converged = true;
            break;
        }
    }
    Ok((ris, cov, trace))
}
