//! Dephasing physics: switching function, filter function, attenuation χ,
//! ensemble fidelity, and the free-induction-decay timescale.
//!
//! A sequence of N ideal π pulses at times 0 < t₁ < … < t_N < T defines a
//! ±1-valued switching function on [0, T]. Its Fourier transform squared,
//! the filter function F(ω), weights how strongly noise at frequency ω
//! dephases the qubit: χ = (1/2π) ∫₀^ωmax Re[S(ω)] F(ω) dω and
//! p_avg = (1 + e^(−χ))/2.

use crate::error::{Error, Result};
use crate::integrate;
use crate::spectra::NoiseSpectrum;

/// An ordered list of pulse instants inside (0, T).
///
/// [`PulseSequence::new`] enforces strictly increasing interior times;
/// boundary pulses at exactly 0 or T are rejected because they act
/// trivially on the measured fidelity and degenerate the action algebra.
/// Sequences produced by map application may transiently hold coincident
/// times after floating-point rounding; the evaluation formulas cancel
/// such pairs exactly (two coincident π pulses undo each other).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    times: Vec<f64>,
    total_time: f64,
}

impl PulseSequence {
    pub fn new(times: Vec<f64>, total_time: f64) -> Result<Self> {
        if !total_time.is_finite() || total_time <= 0.0 {
            return Err(Error::InvalidSequence(format!(
                "total_time must be positive and finite, got {total_time}"
            )));
        }
        for &t in &times {
            if !t.is_finite() {
                return Err(Error::InvalidSequence(format!("non-finite pulse time {t}")));
            }
            if t <= 0.0 || t >= total_time {
                return Err(Error::InvalidSequence(format!(
                    "pulse time {t} outside the open interval (0, {total_time})"
                )));
            }
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSequence(
                "pulse times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, total_time })
    }

    /// Internal constructor for times produced by a monotone map of a valid
    /// sequence: ordering is non-strict (rounding may collapse neighbours)
    /// and interior placement is guaranteed by the caller.
    pub(crate) fn from_mapped_times(times: Vec<f64>, total_time: f64) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(times.iter().all(|&t| t > 0.0 && t < total_time));
        Self { times, total_time }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn n_pulses(&self) -> usize {
        self.times.len()
    }

    /// Pulse times divided by T; the observation fed to the value network.
    pub fn normalized_times(&self) -> Vec<f64> {
        self.times.iter().map(|t| t / self.total_time).collect()
    }

    /// The time-reversed sequence {T − t_j, reversed}.
    pub fn mirrored(&self) -> Self {
        let times = self.times.iter().rev().map(|t| self.total_time - t).collect();
        Self { times, total_time: self.total_time }
    }
}

/// Filter magnitude at a single angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterEvaluation {
    pub omega: f64,
    /// F(ω), units of time².
    pub value: f64,
}

/// Attenuation χ and the fidelity it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuationResult {
    pub chi: f64,
    /// (1 + e^(−χ))/2, in [1/2, 1].
    pub p_avg: f64,
}

impl AttenuationResult {
    pub fn from_chi(chi: f64) -> Self {
        Self { chi, p_avg: 0.5 * (1.0 + (-chi).exp()) }
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.p_avg
    }
}

/// The switching function f(t): +1 on [0, t₁), flipping sign at each pulse,
/// zero outside [0, T].
pub fn switching_value(seq: &PulseSequence, t: f64) -> i32 {
    if t < 0.0 || t > seq.total_time {
        return 0;
    }
    let flips = seq.times.iter().take_while(|&&tj| tj < t).count();
    if flips % 2 == 0 {
        1
    } else {
        -1
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// F(ω) in closed form.
///
/// Writing the transform segment by segment and factoring out the segment
/// midpoint phase gives
///   F(ω) = |Σ_k (−1)^k Δ_k sinc(ωΔ_k/2) e^{iω m_k}|²
/// with t₀ = 0, t_{N+1} = T, Δ_k = t_{k+1} − t_k, m_k the midpoint. The
/// sinc form is regular at ω = 0 and evaluates the analytic limit there.
/// Zero-width segments (coincident pulse pairs) contribute nothing, which
/// is exactly the pairwise cancellation of coincident π pulses.
pub fn filter_value(seq: &PulseSequence, omega: f64) -> f64 {
    debug_assert!(omega >= 0.0, "filter is evaluated on non-negative frequencies");
    let mut re = 0.0;
    let mut im = 0.0;
    let mut prev = 0.0;
    let mut sign = 1.0;
    for &t in seq.times.iter().chain(std::iter::once(&seq.total_time)) {
        let width = t - prev;
        let mid = 0.5 * (prev + t);
        let amp = sign * width * sinc(0.5 * omega * width);
        let (s, c) = (omega * mid).sin_cos();
        re += amp * c;
        im += amp * s;
        prev = t;
        sign = -sign;
    }
    re * re + im * im
}

/// See [`filter_value`].
pub fn filter_function(seq: &PulseSequence, omega: f64) -> FilterEvaluation {
    FilterEvaluation { omega, value: filter_value(seq, omega) }
}

/// Quadrature settings for the attenuation integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Upper integration limit (rad/time).
    pub omega_max: f64,
    /// Relative tolerance on the integral.
    pub rel_tol: f64,
    /// Maximum bisection depth per panel.
    pub max_depth: u32,
}

impl QuadratureConfig {
    pub const DEFAULT_REL_TOL: f64 = 1e-7;

    /// Default for a sequence: the band [0, 2π·2N/T] carries ≥ 99% of any
    /// filter's squared norm; a 1.5× margin bounds the truncation error.
    /// N is floored at 1 so a free-induction sequence still gets a band.
    pub fn for_sequence(seq: &PulseSequence) -> Self {
        let n = seq.n_pulses().max(1) as f64;
        Self {
            omega_max: 1.5 * 2.0 * std::f64::consts::TAU * n / seq.total_time(),
            rel_tol: Self::DEFAULT_REL_TOL,
            max_depth: 48,
        }
    }

    fn validate(&self, seq: &PulseSequence) -> Result<()> {
        let needed = std::f64::consts::TAU * 2.0 * seq.n_pulses() as f64 / seq.total_time();
        if !self.omega_max.is_finite() || self.omega_max <= 0.0 {
            return Err(Error::InvalidQuadrature(format!(
                "omega_max must be positive, got {}",
                self.omega_max
            )));
        }
        if self.omega_max < needed {
            return Err(Error::InvalidQuadrature(format!(
                "omega_max {} is below the norm-concentration band {needed}",
                self.omega_max
            )));
        }
        if self.rel_tol <= 0.0 {
            return Err(Error::InvalidQuadrature("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Panel edges for spectral integration on [0, hi]: split at each
/// Lorentzian center so peaks never straddle a panel boundary.
fn spectral_panels(spectrum: &NoiseSpectrum, hi: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut centers: Vec<f64> =
        spectrum.components().iter().map(|c| c.center).filter(|&c| c > 0.0 && c < hi).collect();
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    centers.dedup();
    edges.extend(centers);
    edges.push(hi);
    edges
}

/// Attenuation χ = (1/2π) ∫₀^ωmax Re[S(ω)] F(ω) dω and the fidelity.
pub fn chi(
    seq: &PulseSequence,
    spectrum: &NoiseSpectrum,
    quad: &QuadratureConfig,
) -> Result<AttenuationResult> {
    quad.validate(seq)?;
    let edges = spectral_panels(spectrum, quad.omega_max);
    let integrand = |omega: f64| spectrum.evaluate(omega) * filter_value(seq, omega);
    let q = integrate::adaptive_panels(&integrand, &edges, quad.rel_tol, quad.max_depth)?;
    Ok(AttenuationResult::from_chi(q.value / std::f64::consts::TAU))
}

/// Free-induction-decay timescale T₂* = ((1/2π) ∫₀^ωc Re[S] dω)^(−1/2).
pub fn t2_star(spectrum: &NoiseSpectrum, omega_c: f64) -> Result<f64> {
    if !(omega_c > 0.0) {
        return Err(Error::InvalidQuadrature(format!("omega_c must be positive, got {omega_c}")));
    }
    let edges = spectral_panels(spectrum, omega_c);
    let f = |omega: f64| spectrum.evaluate(omega);
    let q = integrate::adaptive_panels(&f, &edges, 1e-10, 48)?;
    let integral = q.value / std::f64::consts::TAU;
    if integral <= 0.0 {
        return Err(Error::NonPositiveIntegral(integral));
    }
    Ok(integral.powf(-0.5))
}
