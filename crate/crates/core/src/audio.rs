//! Mono PCM WAV decoding.

use std::path::Path;

use hound::{SampleFormat, WavReader};

use crate::error::FeatureError;
use crate::scalar::Scalar;

/// Decoded mono waveform with samples scaled to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Pcm<T> {
    pub sample_rate: u32,
    pub samples: Vec<T>,
}

impl<T: Scalar> Pcm<T> {
    /// Reads a mono PCM WAV (integer 8–32 bit or 32-bit float).
    pub fn read_wav(path: &Path) -> Result<Self, FeatureError> {
        let fail = |message: String| FeatureError::Ingestion {
            path: path.display().to_string(),
            message,
        };
        let reader = WavReader::open(path).map_err(|e| fail(e.to_string()))?;
        let spec = reader.spec();
        if spec.channels != 1 {
            return Err(fail(format!("{} channels; only mono is supported", spec.channels)));
        }
        let samples: Vec<T> = match (spec.sample_format, spec.bits_per_sample) {
            (SampleFormat::Int, bits @ 8..=32) => {
                let scale = 1.0 / f64::from(1u32 << (bits - 1));
                reader
                    .into_samples::<i32>()
                    .map(|s| s.map(|v| T::lit(f64::from(v) * scale)))
                    .collect::<Result<_, _>>()
                    .map_err(|e| fail(e.to_string()))?
            }
            (SampleFormat::Float, 32) => reader
                .into_samples::<f32>()
                .map(|s| s.map(|v| T::lit(f64::from(v))))
                .collect::<Result<_, _>>()
                .map_err(|e| fail(e.to_string()))?,
            (fmt, bits) => return Err(fail(format!("unsupported encoding {fmt:?}/{bits}-bit"))),
        };
        Ok(Pcm {
            sample_rate: spec.sample_rate,
            samples,
        })
    }

    /// Samples covering `[start_s, end_s)`.
    pub fn segment(&self, start_s: f64, end_s: f64) -> Result<&[T], String> {
        let sr = f64::from(self.sample_rate);
        let start = (start_s * sr).round() as usize;
        let end = (end_s * sr).round() as usize;
        if end > self.samples.len() || start >= end {
            return Err(format!(
                "interval [{start_s}, {end_s}] s outside audio of {} samples",
                self.samples.len()
            ));
        }
        Ok(&self.samples[start..end])
    }
}

/// Writes mono 16-bit PCM. Samples are clipped to [-1, 1].
pub fn write_wav_i16(path: &Path, sample_rate: u32, samples: &[f64]) -> Result<(), hound::Error> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for s in samples {
        writer.write_sample((s.clamp(-1.0, 1.0) * 32767.0).round() as i16)?;
    }
    writer.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_segment() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let sig: Vec<f64> = (0..1600).map(|i| ((i as f64) * 0.01).sin() * 0.5).collect();
        write_wav_i16(&path, 16_000, &sig).unwrap();
        let pcm = Pcm::<f64>::read_wav(&path).unwrap();
        assert_eq!(pcm.sample_rate, 16_000);
        assert_eq!(pcm.samples.len(), 1600);
        assert!((pcm.samples[100] - sig[100]).abs() < 1e-4);
        assert_eq!(pcm.segment(0.01, 0.05).unwrap().len(), 640);
        assert!(pcm.segment(0.05, 0.2).is_err());
    }

    #[test]
    fn stereo_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 16_000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        for _ in 0..10 {
            w.write_sample(0i16).unwrap();
        }
        w.finalize().unwrap();
        let err = Pcm::<f64>::read_wav(&path).unwrap_err();
        assert!(matches!(err, FeatureError::Ingestion { .. }));
    }

    #[test]
    fn missing_file_is_ingestion_error() {
        let err = Pcm::<f32>::read_wav(Path::new("/nonexistent/x.wav")).unwrap_err();
        assert!(matches!(err, FeatureError::Ingestion { .. }));
    }
}
