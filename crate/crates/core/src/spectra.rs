//! Randomized Lorentzian test spectra and the Ornstein–Uhlenbeck
//! trajectory oracle.
//!
//! Each benchmark spectrum is a sum of peak-normalized Lorentzians with
//! FWHM 2π/T: one pinned at ω = 0 (DC noise), the rest at distinct
//! harmonics 2πj/T with j drawn from 1..2N. Amplitudes are drawn uniform
//! on [0, 1) and then jointly rescaled so every spectrum has the same L₂
//! norm, which equalizes the Cauchy–Schwarz bound on χ across spectra.
//!
//! Draw order (fixed so seeds reproduce bit-exactly): the off-DC centers
//! are chosen by a partial Fisher–Yates shuffle of the ascending candidate
//! list, then all amplitudes are drawn in component order (DC first).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate;
use crate::rng;

/// A peak-normalized Lorentzian line: amplitude · γ² / ((ω − ω₀)² + γ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    pub amplitude: f64,
    pub center: f64,
    pub hwhm: f64,
}

impl Lorentzian {
    pub fn new(amplitude: f64, center: f64, hwhm: f64) -> Self {
        debug_assert!(amplitude >= 0.0 && hwhm > 0.0 && center >= 0.0);
        Self { amplitude, center, hwhm }
    }

    pub fn evaluate(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        self.amplitude * self.hwhm * self.hwhm / (d * d + self.hwhm * self.hwhm)
    }
}

/// Re[S(ω)] on ω ≥ 0 as a sum of Lorentzian components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectrum {
    components: Vec<Lorentzian>,
    norm_target: f64,
}

/// How many half-widths past the largest center the norm quadrature
/// extends. The squared tail of a Lorentzian beyond x half-widths falls
/// off as 1/(3x³) of the line integral, so 2000 widths keeps the
/// truncation error of the norm below 1e-10 relative.
const NORM_TAIL_WIDTHS: f64 = 2000.0;

impl NoiseSpectrum {
    pub fn new(components: Vec<Lorentzian>, norm_target: f64) -> Self {
        Self { components, norm_target }
    }

    pub fn components(&self) -> &[Lorentzian] {
        &self.components
    }

    pub fn norm_target(&self) -> f64 {
        self.norm_target
    }

    pub fn evaluate(&self, omega: f64) -> f64 {
        self.components.iter().map(|c| c.evaluate(omega)).sum()
    }

    pub fn max_center(&self) -> f64 {
        self.components.iter().map(|c| c.center).fold(0.0, f64::max)
    }

    fn max_hwhm(&self) -> f64 {
        self.components.iter().map(|c| c.hwhm).fold(0.0, f64::max)
    }

    /// √(∫₀^∞ Re[S]² dω / 2π), the improper integral truncated far past
    /// the last peak (see [`NORM_TAIL_WIDTHS`]).
    pub fn l2_norm(&self) -> Result<f64> {
        if self.components.iter().all(|c| c.amplitude == 0.0) {
            return Ok(0.0);
        }
        let hi = self.max_center() + NORM_TAIL_WIDTHS * self.max_hwhm();
        let mut edges: Vec<f64> = vec![0.0];
        let mut centers: Vec<f64> =
            self.components.iter().map(|c| c.center).filter(|&c| c > 0.0 && c < hi).collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        centers.dedup();
        edges.extend(centers);
        // Separate the peak region from the smooth tail.
        let peaks_end = self.max_center() + 50.0 * self.max_hwhm();
        if peaks_end < hi {
            edges.push(peaks_end);
        }
        edges.push(hi);
        let f = |omega: f64| {
            let s = self.evaluate(omega);
            s * s
        };
        let q = integrate::adaptive_panels(&f, &edges, 1e-11, 52)?;
        Ok((q.value / std::f64::consts::TAU).sqrt())
    }

    /// Checks the generation-protocol invariants for a spectrum claimed to
    /// come from [`generate_spectrum`] with the given parameters.
    pub fn validate_protocol(&self, n_pulses: usize, total_time: f64) -> Result<()> {
        let dc_count = self.components.iter().filter(|c| c.center == 0.0).count();
        if dc_count != 1 {
            return Err(Error::InvalidSpectrum(format!(
                "expected exactly one DC component, found {dc_count}"
            )));
        }
        let harmonic = std::f64::consts::TAU / total_time;
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.components {
            if c.center == 0.0 {
                continue;
            }
            let j = (c.center / harmonic).round();
            if (c.center - j * harmonic).abs() > 1e-9 * harmonic
                || j < 1.0
                || j > 2.0 * n_pulses as f64
            {
                return Err(Error::InvalidSpectrum(format!(
                    "center {} is not a harmonic 2πj/T with j in 1..{}",
                    c.center,
                    2 * n_pulses
                )));
            }
            if !seen.insert(j as u64) {
                return Err(Error::InvalidSpectrum(format!("duplicate center {}", c.center)));
            }
        }
        if self.norm_target > 0.0 {
            let norm = self.l2_norm()?;
            if (norm - self.norm_target).abs() > 1e-6 {
                return Err(Error::InvalidSpectrum(format!(
                    "L2 norm {norm} is not within 1e-6 of target {}",
                    self.norm_target
                )));
            }
        }
        Ok(())
    }
}

/// Generates one protocol spectrum: DC component plus `n_lorentzians − 1`
/// distinct harmonics, amplitudes jointly rescaled to `norm_target`.
pub fn generate_spectrum(
    n_pulses: usize,
    total_time: f64,
    n_lorentzians: usize,
    norm_target: f64,
    rng_seed: u64,
) -> Result<NoiseSpectrum> {
    if n_lorentzians == 0 {
        return Err(Error::InvalidSpectrum("need at least the DC component".into()));
    }
    if n_lorentzians > 2 * n_pulses + 1 {
        return Err(Error::InvalidSpectrum(format!(
            "{n_lorentzians} components need {} distinct centers but only {} exist",
            n_lorentzians - 1,
            2 * n_pulses
        )));
    }
    if !(total_time > 0.0) || !(norm_target >= 0.0) {
        return Err(Error::InvalidSpectrum(
            "total_time must be positive and norm_target non-negative".into(),
        ));
    }
    let hwhm = std::f64::consts::PI / total_time; // FWHM 2π/T
    let harmonic = std::f64::consts::TAU / total_time;
    let mut generator = rng::seeded_rng(rng_seed);

    // Partial Fisher–Yates over the ascending candidates 1..=2N.
    let mut candidates: Vec<u64> = (1..=2 * n_pulses as u64).collect();
    let extra = n_lorentzians - 1;
    for i in 0..extra {
        let j = i + generator.gen_range(0..candidates.len() - i);
        candidates.swap(i, j);
    }
    let mut centers = vec![0.0];
    centers.extend(candidates[..extra].iter().map(|&j| j as f64 * harmonic));

    let amplitudes: Vec<f64> = (0..n_lorentzians).map(|_| generator.gen::<f64>()).collect();

    let mut components: Vec<Lorentzian> = centers
        .iter()
        .zip(&amplitudes)
        .map(|(&c, &a)| Lorentzian::new(a, c, hwhm))
        .collect();

    if norm_target == 0.0 {
        for c in &mut components {
            c.amplitude = 0.0;
        }
        return Ok(NoiseSpectrum::new(components, norm_target));
    }

    let unscaled = NoiseSpectrum::new(components.clone(), norm_target);
    let raw_norm = unscaled.l2_norm()?;
    if raw_norm <= 0.0 {
        return Err(Error::InvalidSpectrum("degenerate zero draw cannot be normalized".into()));
    }
    let scale = norm_target / raw_norm;
    for c in &mut components {
        c.amplitude *= scale;
    }
    Ok(NoiseSpectrum::new(components, norm_target))
}

/// Stationary Ornstein–Uhlenbeck samples whose power spectral density is
/// the given DC-centered Lorentzian.
///
/// With S(ω) = A γ²/(ω² + γ²) the matching process has relaxation rate γ
/// and stationary variance Aγ/2. Sampling uses the exact AR(1)
/// discretization, so the marginal statistics are correct at any `dt`.
pub fn sample_ou_trajectory(
    component: &Lorentzian,
    dt: f64,
    n_steps: usize,
    rng_seed: u64,
) -> Result<Vec<f64>> {
    if component.center != 0.0 {
        return Err(Error::UnsupportedCenter(component.center));
    }
    if !(dt > 0.0) || !(component.hwhm > 0.0) || component.amplitude < 0.0 {
        return Err(Error::InvalidSpectrum(
            "trajectory oracle needs dt > 0, hwhm > 0, amplitude >= 0".into(),
        ));
    }
    let gamma = component.hwhm;
    let stationary_sd = (component.amplitude * gamma / 2.0).sqrt();
    let rho = (-gamma * dt).exp();
    let innovation_sd = stationary_sd * (1.0 - rho * rho).sqrt();

    let mut generator = rng::seeded_rng(rng_seed);
    let normal = rand_distr::StandardNormal;
    let mut samples = Vec::with_capacity(n_steps);
    let mut x = stationary_sd * generator.sample::<f64, _>(normal);
    for _ in 0..n_steps {
        samples.push(x);
        x = rho * x + innovation_sd * generator.sample::<f64, _>(normal);
    }
    Ok(samples)
}

/// On-disk form of a generated spectrum with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub spectrum: NoiseSpectrum,
    pub seed: u64,
    pub n_pulses: usize,
    pub total_time: f64,
    pub norm_target: f64,
}

impl SpectrumFile {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: Self = serde_json::from_str(&text).map_err(|e| Error::MalformedFile {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn lorentzian_peak_and_half_maximum() {
        let l = Lorentzian::new(1.0, 0.0, PI);
        assert_eq!(l.evaluate(0.0), 1.0);
        assert!((l.evaluate(PI) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spectrum_is_sum_of_components() {
        let s = generate_spectrum(10, 1.0, 5, 10.0, 3).unwrap();
        for i in 0..40 {
            let omega = 0.7 * i as f64;
            let direct: f64 = s.components().iter().map(|c| c.evaluate(omega)).sum();
            assert_eq!(s.evaluate(omega), direct);
        }
    }

    #[test]
    fn generated_spectrum_meets_norm_target() {
        for seed in [0_u64, 7, 99] {
            let s = generate_spectrum(10, 1.0, 5, 10.0, seed).unwrap();
            let norm = s.l2_norm().unwrap();
            assert!((norm - 10.0).abs() < 1e-6, "seed {seed}: norm {norm}");
            s.validate_protocol(10, 1.0).unwrap();
        }
    }

    #[test]
    fn zero_target_zeroes_amplitudes() {
        let s = generate_spectrum(10, 1.0, 5, 0.0, 11).unwrap();
        assert!(s.components().iter().all(|c| c.amplitude == 0.0));
        assert_eq!(s.l2_norm().unwrap(), 0.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_spectrum(10, 1.0, 5, 10.0, 1234).unwrap();
        let b = generate_spectrum(10, 1.0, 5, 10.0, 1234).unwrap();
        assert_eq!(a, b);
        let c = generate_spectrum(10, 1.0, 5, 10.0, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn centers_are_unique_harmonics() {
        // Saturate the candidate set: 2N+1 components forces every
        // harmonic to be used exactly once.
        let n = 3;
        let s = generate_spectrum(n, 1.0, 2 * n + 1, 10.0, 5).unwrap();
        let mut centers: Vec<f64> = s.components().iter().map(|c| c.center).collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected: Vec<f64> = (0..=2 * n as u64).map(|j| j as f64 * TAU).collect();
        for (got, want) in centers.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn too_many_components_is_an_error() {
        assert!(generate_spectrum(2, 1.0, 6, 10.0, 0).is_err());
    }

    #[test]
    fn ou_variance_matches_closed_form() {
        let gamma = PI;
        let amp = 2.0;
        let l = Lorentzian::new(amp, 0.0, gamma);
        let n = 100_000;
        let xs = sample_ou_trajectory(&l, 1e-3, n, 42).unwrap();
        let mean: f64 = xs.iter().sum::<f64>() / n as f64;
        let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let expected = amp * gamma / 2.0;
        // Correlated samples: effective sample count is n·γ·dt/2-ish; use a
        // generous 3σ band from the integrated autocorrelation time.
        let n_eff = n as f64 * (gamma * 1e-3) / 2.0;
        let sigma = expected * (2.0 / n_eff).sqrt();
        assert!(
            (var - expected).abs() < 3.0 * sigma,
            "var {var} vs {expected} (3σ = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn ou_refinement_consistency() {
        let l = Lorentzian::new(1.0, 0.0, 2.0);
        let coarse = sample_ou_trajectory(&l, 2e-2, 50_000, 9).unwrap();
        let fine = sample_ou_trajectory(&l, 1e-2, 100_000, 10).unwrap();
        let var = |xs: &[f64]| {
            let m: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
        };
        let (vc, vf) = (var(&coarse), var(&fine));
        let expected = 1.0;
        let tol = 0.15 * expected;
        assert!((vc - expected).abs() < tol, "coarse var {vc}");
        assert!((vf - expected).abs() < tol, "fine var {vf}");
    }

    #[test]
    fn ou_zero_amplitude_is_silent() {
        let l = Lorentzian::new(0.0, 0.0, 1.0);
        let xs = sample_ou_trajectory(&l, 1e-2, 1000, 0).unwrap();
        assert!(xs.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn ou_rejects_shifted_center() {
        let l = Lorentzian::new(1.0, TAU, 1.0);
        assert!(matches!(
            sample_ou_trajectory(&l, 1e-2, 10, 0),
            Err(Error::UnsupportedCenter(_))
        ));
    }

    #[test]
    fn spectrum_file_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spectrum.json");
        let file = SpectrumFile {
            spectrum: generate_spectrum(10, 1.0, 5, 10.0, 77).unwrap(),
            seed: 77,
            n_pulses: 10,
            total_time: 1.0,
            norm_target: 10.0,
        };
        file.save(&path).unwrap();
        let loaded = SpectrumFile::load(&path).unwrap();
        assert_eq!(file, loaded);
        for (a, b) in file.spectrum.components().iter().zip(loaded.spectrum.components()) {
            assert_eq!(a.amplitude.to_bits(), b.amplitude.to_bits());
            assert_eq!(a.center.to_bits(), b.center.to_bits());
            assert_eq!(a.hwhm.to_bits(), b.hwhm.to_bits());
        }
    }
}
