//! Paired comparison of per-speaker scores between two registers.

use serde::Serialize;

use crate::error::StatsError;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos approximation).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let series = LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Two-sided tail probability `P(|T| >= |t|)` of Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    regularized_beta(df / (df + t * t), df / 2.0, 0.5).min(1.0)
}

/// Result of a paired Student t-test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    pub p: f64,
}

struct Diffs {
    n: usize,
    mean: f64,
    sd: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn diffs(xs: &[f64], ys: &[f64]) -> Result<Diffs, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFew(xs.len()));
    }
    let d: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - x).collect();
    let sd = sample_sd(&d);
    // differences equal up to rounding count as constant
    let scale = xs.iter().chain(ys).fold(0.0f64, |m, v| m.max(v.abs()));
    if sd <= 1e-12 * scale || !sd.is_finite() {
        return Err(StatsError::ZeroVariance);
    }
    Ok(Diffs {
        n: d.len(),
        mean: mean(&d),
        sd,
    })
}

/// Paired t-test on `ys - xs`.
pub fn paired_t(xs: &[f64], ys: &[f64]) -> Result<TTest, StatsError> {
    let d = diffs(xs, ys)?;
    let t = d.mean / (d.sd / (d.n as f64).sqrt());
    let df = d.n - 1;
    Ok(TTest {
        t,
        df,
        p: student_t_two_sided(t, df as f64),
    })
}

/// Paired effect size d_z = mean(ys - xs) / sd(ys - xs).
pub fn cohens_d(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    let d = diffs(xs, ys)?;
    Ok(d.mean / d.sd)
}

/// Effect size d_av = mean(ys - xs) / mean(sd_x, sd_y).
pub fn cohens_d_av(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    let d = diffs(xs, ys)?;
    let denom = (sample_sd(xs) + sample_sd(ys)) / 2.0;
    if denom == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(d.mean / denom)
}

/// Percent change of `mean_y` relative to the baseline `mean_x`.
pub fn relative_effect(mean_x: f64, mean_y: f64) -> Result<f64, StatsError> {
    if mean_x == 0.0 {
        return Err(StatsError::ZeroBaseline);
    }
    Ok(100.0 * (mean_y - mean_x) / mean_x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegisterPair {
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanPair {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeakerScores {
    pub speaker_id: String,
    pub x: f64,
    pub y: f64,
}

/// Register comparison for one metric across speakers.
///
/// Serializes to the summary JSON document; per-speaker scores are kept
/// out of the JSON and written to CSV separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedComparison {
    pub metric: String,
    pub registers: RegisterPair,
    pub n: usize,
    pub means: MeanPair,
    pub t: f64,
    pub df: usize,
    pub p: f64,
    pub d_z: f64,
    pub d_av: Option<f64>,
    pub relative_pct: Option<f64>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub per_speaker: Vec<SpeakerScores>,
}

impl PairedComparison {
    /// Sorts speakers by id, then runs the paired test on `y - x`.
    pub fn compute(
        metric: impl Into<String>,
        register_x: impl Into<String>,
        register_y: impl Into<String>,
        mut per_speaker: Vec<SpeakerScores>,
        seed: Option<u64>,
    ) -> Result<Self, StatsError> {
        per_speaker.sort_by(|a, b| a.speaker_id.cmp(&b.speaker_id));
        let xs: Vec<f64> = per_speaker.iter().map(|s| s.x).collect();
        let ys: Vec<f64> = per_speaker.iter().map(|s| s.y).collect();
        let test = paired_t(&xs, &ys)?;
        let (mean_x, mean_y) = (mean(&xs), mean(&ys));
        Ok(PairedComparison {
            metric: metric.into(),
            registers: RegisterPair {
                x: register_x.into(),
                y: register_y.into(),
            },
            n: xs.len(),
            means: MeanPair { x: mean_x, y: mean_y },
            t: test.t,
            df: test.df,
            p: test.p,
            d_z: cohens_d(&xs, &ys)?,
            d_av: cohens_d_av(&xs, &ys).ok(),
            relative_pct: relative_effect(mean_x, mean_y).ok(),
            seed,
            per_speaker,
        })
    }
}
