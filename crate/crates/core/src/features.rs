//! Cube-root compressed mel filterbank front end.
//!
//! Audio is cut into Hamming-windowed frames (25 ms window, 10 ms hop), each
//! frame's power spectrum is pooled by triangular mel filters, and the filter
//! energies are compressed with a cube root.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::FeatureError;
use crate::scalar::Scalar;

/// Front-end parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontendConfig {
    pub n_filters: usize,
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub hop_s: f64,
    pub window_s: f64,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        FrontendConfig {
            n_filters: 13,
            f_min_hz: 100.0,
            f_max_hz: 6855.0,
            hop_s: 0.010,
            window_s: 0.025,
        }
    }
}

impl FrontendConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        let bad = |m: String| Err(FeatureError::Config(m));
        if self.n_filters == 0 {
            return bad("n_filters must be positive".into());
        }
        if !(self.f_min_hz >= 0.0 && self.f_min_hz < self.f_max_hz) {
            return bad(format!(
                "need 0 <= f_min < f_max, got {} / {}",
                self.f_min_hz, self.f_max_hz
            ));
        }
        if !(self.hop_s > 0.0 && self.window_s > 0.0) {
            return bad("hop and window must be positive".into());
        }
        Ok(())
    }

    /// Stable textual form used for cache keys and run metadata.
    pub fn fingerprint(&self) -> String {
        format!(
            "nf={};fmin={};fmax={};hop={};win={};cbrt",
            self.n_filters, self.f_min_hz, self.f_max_hz, self.hop_s, self.window_s
        )
    }

    pub fn window_samples(&self, sample_rate: u32) -> usize {
        ((self.window_s * f64::from(sample_rate)).round() as usize).max(1)
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        ((self.hop_s * f64::from(sample_rate)).round() as usize).max(1)
    }
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Frame count for `n_samples`: tokens shorter than a window yield one padded frame.
pub fn frame_count(n_samples: usize, window: usize, hop: usize) -> usize {
    if n_samples <= window {
        1
    } else {
        (n_samples - window) / hop + 1
    }
}

/// Time-ordered feature frames for one token, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence<T> {
    pub token_id: String,
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureSequence<T> {
    /// Builds a sequence from row-major frame data. `data.len()` must be a
    /// non-zero multiple of `dim`.
    pub fn new(token_id: impl Into<String>, dim: usize, data: Vec<T>) -> Self {
        assert!(
            dim > 0 && !data.is_empty() && data.len().is_multiple_of(dim),
            "ragged feature data"
        );
        FeatureSequence {
            token_id: token_id.into(),
            dim,
            data,
        }
    }

    pub fn from_frames(token_id: impl Into<String>, frames: &[Vec<T>]) -> Self {
        let dim = frames.first().map_or(0, Vec::len);
        assert!(frames.iter().all(|f| f.len() == dim), "frames of unequal dimension");
        Self::new(token_id, dim, frames.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn frame(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn frames(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

/// Triangular mel filters over FFT bins `0..=fft_size/2`.
#[derive(Debug, Clone)]
pub struct Filterbank<T> {
    /// `n_filters + 2` edge frequencies in Hz, equally spaced in mel.
    pub edges_hz: Vec<f64>,
    pub n_bins: usize,
    weights: Vec<Vec<T>>,
}

impl<T: Scalar> Filterbank<T> {
    pub fn weights(&self, filter: usize) -> &[T] {
        &self.weights[filter]
    }

    pub fn n_filters(&self) -> usize {
        self.weights.len()
    }

    /// Center frequency of filter `i` in Hz.
    pub fn center_hz(&self, i: usize) -> f64 {
        self.edges_hz[i + 1]
    }
}

/// Builds the filterbank; filter `i` rises over edges `i..i+1` and falls over `i+1..i+2`.
pub fn make_filterbank<T: Scalar>(
    cfg: &FrontendConfig,
    sample_rate: u32,
    fft_size: usize,
) -> Result<Filterbank<T>, FeatureError> {
    cfg.validate()?;
    let nyquist = f64::from(sample_rate) / 2.0;
    if nyquist < cfg.f_max_hz {
        return Err(FeatureError::Config(format!(
            "Nyquist {nyquist} Hz below f_max {} Hz",
            cfg.f_max_hz
        )));
    }
    let lo = hz_to_mel(cfg.f_min_hz);
    let hi = hz_to_mel(cfg.f_max_hz);
    let n_edges = cfg.n_filters + 2;
    let edges_hz: Vec<f64> = (0..n_edges)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (n_edges - 1) as f64))
        .collect();

    let n_bins = fft_size / 2 + 1;
    let bin_hz = f64::from(sample_rate) / fft_size as f64;
    let mut weights = Vec::with_capacity(cfg.n_filters);
    for i in 0..cfg.n_filters {
        let (left, center, right) = (edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]);
        let row: Vec<T> = (0..n_bins)
            .map(|k| {
                let f = k as f64 * bin_hz;
                let w = if f > left && f <= center {
                    (f - left) / (center - left)
                } else if f > center && f < right {
                    (right - f) / (right - center)
                } else {
                    0.0
                };
                T::lit(w)
            })
            .collect();
        if !row.iter().any(|w| *w > T::zero()) {
            return Err(FeatureError::Config(format!(
                "filter {i} ({left:.1}-{right:.1} Hz) covers no FFT bin at {sample_rate} Hz / {fft_size}"
            )));
        }
        weights.push(row);
    }
    Ok(Filterbank {
        edges_hz,
        n_bins,
        weights,
    })
}

/// A front end bound to one sample rate: FFT plan, window and filters.
pub struct Frontend<T: Scalar> {
    cfg: FrontendConfig,
    sample_rate: u32,
    window: Vec<T>,
    hop: usize,
    fft: Arc<dyn Fft<T>>,
    fft_size: usize,
    filterbank: Filterbank<T>,
}

impl<T: Scalar> Frontend<T> {
    pub fn new(cfg: &FrontendConfig, sample_rate: u32) -> Result<Self, FeatureError> {
        cfg.validate()?;
        let win = cfg.window_samples(sample_rate);
        let fft_size = win.next_power_of_two();
        let filterbank = make_filterbank(cfg, sample_rate, fft_size)?;
        let two_pi = T::lit(2.0) * T::PI();
        let denom = T::lit((win.max(2) - 1) as f64);
        let window = (0..win)
            .map(|n| T::lit(0.54) - T::lit(0.46) * (two_pi * T::lit(n as f64) / denom).cos())
            .collect();
        Ok(Frontend {
            cfg: cfg.clone(),
            sample_rate,
            window,
            hop: cfg.hop_samples(sample_rate),
            fft: FftPlanner::new().plan_fft_forward(fft_size),
            fft_size,
            filterbank,
        })
    }

    pub fn config(&self) -> &FrontendConfig {
        &self.cfg
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn filterbank(&self) -> &Filterbank<T> {
        &self.filterbank
    }

    /// Power spectrum of one windowed frame starting at `offset` (zero-padded past the end).
    fn power_spectrum(
        &self,
        samples: &[T],
        offset: usize,
        buf: &mut [Complex<T>],
        scratch: &mut [Complex<T>],
    ) -> Vec<T> {
        for (i, slot) in buf.iter_mut().enumerate() {
            let v = if i < self.window.len() {
                samples.get(offset + i).copied().unwrap_or_else(T::zero) * self.window[i]
            } else {
                T::zero()
            };
            *slot = Complex::new(v, T::zero());
        }
        self.fft.process_with_scratch(buf, scratch);
        buf[..self.filterbank.n_bins].iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn featurize(&self, token_id: &str, samples: &[T]) -> FeatureSequence<T> {
        let win = self.window.len();
        let n_frames = frame_count(samples.len(), win, self.hop);
        let n_filters = self.filterbank.n_filters();
        let mut data = Vec::with_capacity(n_frames * n_filters);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.fft_size];
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); self.fft.get_inplace_scratch_len()];
        for f in 0..n_frames {
            let power = self.power_spectrum(samples, f * self.hop, &mut buf, &mut scratch);
            for filter in &self.filterbank.weights {
                let energy = filter.iter().zip(&power).fold(T::zero(), |acc, (w, p)| acc + *w * *p);
                data.push(energy.cbrt());
            }
        }
        FeatureSequence::new(token_id, n_filters, data)
    }
}

/// One-shot featurization; checks the sample rate against the configuration.
pub fn featurize<T: Scalar>(
    token_id: &str,
    samples: &[T],
    sample_rate: u32,
    cfg: &FrontendConfig,
) -> Result<FeatureSequence<T>, FeatureError> {
    if f64::from(sample_rate) < 2.0 * cfg.f_max_hz {
        return Err(FeatureError::Ingestion {
            path: token_id.to_string(),
            message: format!("sample rate {sample_rate} Hz below 2 x f_max ({} Hz)", cfg.f_max_hz),
        });
    }
    Ok(Frontend::new(cfg, sample_rate)?.featurize(token_id, samples))
}
