//! Scenario geometry, path losses, and small-scale fading realizations.
//!
//! A [`Scenario`] fixes the deployment: transmitter, receiver, and RIS
//! positions, antenna/element counts, carrier, bandwidth, path-loss law,
//! Rice factor, transmit power, and noise density. [`build_channels`] turns a
//! `(Scenario, seed)` pair into one realization of the channel triple
//! `(H, G, F)` — a pure function, so Monte Carlo trials are reproducible
//! individually and may run in parallel with independent seeds.
//!
//! The direct link `H` fades Rayleigh; the two RIS legs `G` and `F` fade
//! Rician around a rank-one line-of-sight term built from uniform linear
//! arrays with half-wavelength spacing oriented along the x-axis. Path loss
//! multiplies amplitudes as `10^(PL_dB/20)`; noise is handled separately in
//! linear mW.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matkit::{all_finite, CMat};

/// Deployment scenario and radio parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Transmitter position in meters.
    pub tx_pos: [f64; 3],
    /// Receiver position in meters.
    pub rx_pos: [f64; 3],
    /// RIS position in meters.
    pub ris_pos: [f64; 3],
    /// Transmit antennas.
    pub n_t: usize,
    /// Receive antennas.
    pub n_r: usize,
    /// RIS elements.
    pub m: usize,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// Path loss at the 1 m reference distance, in dB.
    pub pl0_db: f64,
    /// Path-loss exponent of the direct link.
    pub alpha_direct: f64,
    /// Path-loss exponent of the two RIS legs.
    pub alpha_ris: f64,
    /// Rice factor (linear) of the RIS legs.
    pub rice_factor: f64,
    pub tx_power_mw: f64,
    pub noise_psd_dbm_per_hz: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            tx_pos: [0.0, 0.0, 1.5],
            rx_pos: [50.0, 0.0, 1.5],
            ris_pos: [50.0, 5.0, 5.0],
            n_t: 4,
            n_r: 4,
            m: 100,
            carrier_hz: 2.4e9,
            bandwidth_hz: 20e6,
            pl0_db: -28.0,
            alpha_direct: 3.75,
            alpha_ris: 2.0,
            rice_factor: 3.0,
            tx_power_mw: 100.0,
            noise_psd_dbm_per_hz: -174.0,
        }
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_t < 1 || self.n_r < 1 || self.m < 1 {
            return Err(Error::contract("scenario: all counts must be >= 1"));
        }
        if self.bandwidth_hz <= 0.0 || self.carrier_hz <= 0.0 || self.tx_power_mw <= 0.0 {
            return Err(Error::contract(
                "scenario: bandwidth, carrier, and power must be positive",
            ));
        }
        if self.rice_factor < 0.0 {
            return Err(Error::contract("scenario: rice_factor must be >= 0"));
        }
        for (a, b, name) in [
            (self.tx_pos, self.rx_pos, "tx-rx"),
            (self.tx_pos, self.ris_pos, "tx-ris"),
            (self.rx_pos, self.ris_pos, "rx-ris"),
        ] {
            if dist(a, b) <= 0.0 {
                return Err(Error::contract(format!(
                    "scenario: {name} distance must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn d_tx_rx(&self) -> f64 {
        dist(self.tx_pos, self.rx_pos)
    }

    pub fn d_tx_ris(&self) -> f64 {
        dist(self.tx_pos, self.ris_pos)
    }

    pub fn d_ris_rx(&self) -> f64 {
        dist(self.ris_pos, self.rx_pos)
    }

    /// Noise power over the scenario bandwidth, in linear mW.
    pub fn noise_mw(&self) -> f64 {
        dbm_to_mw(noise_power_dbm(self.bandwidth_hz, self.noise_psd_dbm_per_hz).expect("bandwidth > 0"))
    }
}

/// One realization of the channel triple.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// Direct link, `n_r × n_t`.
    pub h: CMat,
    /// Transmitter-to-RIS link, `n_t × m`.
    pub g: CMat,
    /// RIS-to-receiver link, `n_r × m`.
    pub f: CMat,
    pub scenario: Scenario,
    pub seed: u64,
}

/// Log-distance path loss in dB: `PL0 − α·10·log10(d)`.
pub fn path_loss_db(distance_m: f64, alpha: f64, pl0_db: f64) -> Result<f64> {
    if distance_m <= 0.0 {
        return Err(Error::contract(format!(
            "path_loss_db: distance {distance_m} must be positive"
        )));
    }
    Ok(pl0_db - alpha * 10.0 * distance_m.log10())
}

/// dB value applied to amplitudes: `10^(db/20)`.
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Noise power in dBm over a bandwidth: `psd + 10·log10(B)`.
pub fn noise_power_dbm(bandwidth_hz: f64, psd_dbm_per_hz: f64) -> Result<f64> {
    if bandwidth_hz <= 0.0 {
        return Err(Error::contract(format!(
            "noise_power_dbm: bandwidth {bandwidth_hz} must be positive"
        )));
    }
    Ok(psd_dbm_per_hz + 10.0 * bandwidth_hz.log10())
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Steering vector of an `n`-element half-wavelength ULA: entries
/// `e^{iπ·k·sin_angle}`, `k = 0..n−1`.
pub fn steering_vector(n: usize, sin_angle: f64) -> CMat {
    let mut v = CMat::zeros(n, 1);
    for k in 0..n {
        v[(k, 0)] = Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 * sin_angle);
    }
    v
}

/// Matrix of i.i.d. circularly-symmetric complex Gaussian entries with
/// standard deviation `amplitude_scale` per complex entry. Entries are drawn
/// row by row, real part before imaginary part.
pub fn draw_rayleigh<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    amplitude_scale: f64,
) -> CMat {
    let mut a = CMat::zeros(rows, cols);
    let s = amplitude_scale * std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            a[(i, j)] = Complex64::new(re * s, im * s);
        }
    }
    a
}

/// Rician fading around a unit-modulus LOS matrix:
/// `scale·(√(γ/(1+γ))·los + √(1/(1+γ))·rayleigh)`. Expected per-entry power
/// equals `scale²`.
pub fn draw_rician<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    rice_factor: f64,
    los: &CMat,
    amplitude_scale: f64,
) -> Result<CMat> {
    if rice_factor < 0.0 {
        return Err(Error::contract("draw_rician: rice factor must be >= 0"));
    }
    if los.nrows() != rows || los.ncols() != cols {
        return Err(Error::contract(format!(
            "draw_rician: LOS is {}x{}, expected {}x{}",
            los.nrows(),
            los.ncols(),
            rows,
            cols
        )));
    }
    let w_los = (rice_factor / (1.0 + rice_factor)).sqrt();
    let w_nlos = (1.0 / (1.0 + rice_factor)).sqrt();
    let scatter = draw_rayleigh(rng, rows, cols, 1.0);
    Ok((los.scale(w_los) + scatter.scale(w_nlos)).scale(amplitude_scale))
}

/// LOS matrix for a link: outer product of the receive- and transmit-side
/// steering vectors, `a_rx · a_txᴴ`. Direction cosines are taken along the
/// x-axis (the array orientation).
fn los_outer(
    rows: usize,
    cols: usize,
    row_end: [f64; 3],
    col_end: [f64; 3],
) -> CMat {
    let d = dist(row_end, col_end);
    let u_row = (col_end[0] - row_end[0]) / d;
    let u_col = (row_end[0] - col_end[0]) / d;
    let a_row = steering_vector(rows, u_row);
    let a_col = steering_vector(cols, u_col);
    a_row * a_col.adjoint()
}

/// One deterministic channel realization for `(scenario, seed)`.
///
/// Draw order is fixed: `H` first, then `G`, then `F`, each filled row by
/// row, so two calls with the same arguments are bit-identical.
pub fn build_channels(scenario: &Scenario, seed: u64) -> Result<ChannelSet> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let amp_h = db_to_amplitude(path_loss_db(
        scenario.d_tx_rx(),
        scenario.alpha_direct,
        scenario.pl0_db,
    )?);
    let amp_g = db_to_amplitude(path_loss_db(
        scenario.d_tx_ris(),
        scenario.alpha_ris,
        scenario.pl0_db,
    )?);
    let amp_f = db_to_amplitude(path_loss_db(
        scenario.d_ris_rx(),
        scenario.alpha_ris,
        scenario.pl0_db,
    )?);

    let h = draw_rayleigh(&mut rng, scenario.n_r, scenario.n_t, amp_h);

    // G is n_t × m ("channel from the transmitter to the RIS"): rows at the
    // transmit array, columns at the RIS array.
    let los_g = los_outer(scenario.n_t, scenario.m, scenario.tx_pos, scenario.ris_pos);
    let g = draw_rician(
        &mut rng,
        scenario.n_t,
        scenario.m,
        scenario.rice_factor,
        &los_g,
        amp_g,
    )?;

    let los_f = los_outer(scenario.n_r, scenario.m, scenario.rx_pos, scenario.ris_pos);
    let f = draw_rician(
        &mut rng,
        scenario.n_r,
        scenario.m,
        scenario.rice_factor,
        &los_f,
        amp_f,
    )?;

    for (mat, name) in [(&h, "H"), (&g, "G"), (&f, "F")] {
        if !all_finite(mat) {
            return Err(Error::numeric(format!("build_channels: {name} not finite")));
        }
    }

    Ok(ChannelSet {
        h,
        g,
        f,
        scenario: scenario.clone(),
        seed,
    })
}
