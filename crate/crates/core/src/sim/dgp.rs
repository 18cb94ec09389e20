use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::distributions::CharacteristicSeries;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DgpKind {
    Iid,
    /// Stationary AR(1), started from its stationary distribution.
    Ar1 {
        rho: f64,
    },
    /// `Σ_j c_j t^j` plus iid noise, `t = 1..=T`.
    PolynomialTrend {
        coefficients: Vec<f64>,
    },
    RandomWalk,
    /// `(1-L)^{-d}` applied to innovations, truncated after
    /// `max(T, 1000)` MA terms (presample innovations included).
    Fractional {
        d: f64,
    },
    /// AR(1) with `ρ = 1 - c/T`, started at zero.
    NearUnitRoot {
        c: f64,
    },
    /// Random walk plus independent noise with variance `q σ²`.
    LocalLevel {
        q: f64,
    },
}

impl fmt::Display for DgpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Iid => f.write_str("iid"),
            Self::Ar1 { rho } => write!(f, "ar1(rho={rho})"),
            Self::PolynomialTrend { coefficients } => {
                let c: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                write!(f, "polynomial-trend({})", c.join(";"))
            }
            Self::RandomWalk => f.write_str("random-walk"),
            Self::Fractional { d } => write!(f, "fractional(d={d})"),
            Self::NearUnitRoot { c } => write!(f, "near-unit-root(c={c})"),
            Self::LocalLevel { q } => write!(f, "local-level(q={q})"),
        }
    }
}

/// Innovation law, always scaled to unit variance before multiplying by `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum Innovation {
    #[default]
    Normal,
    StudentT {
        df: f64,
    },
    Uniform,
}

impl Innovation {
    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            Self::Normal => StandardNormal.sample(rng),
            Self::StudentT { df } => {
                let t: f64 = StudentT::new(df).expect("validated df").sample(rng);
                t * ((df - 2.0) / df).sqrt()
            }
            Self::Uniform => (rng.random::<f64>() - 0.5) * 12f64.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub kind: DgpKind,
    pub sigma: f64,
    pub len: usize,
    pub seed: u64,
    #[serde(default)]
    pub innovation: Innovation,
}

impl DgpSpec {
    pub fn new(kind: DgpKind, sigma: f64, len: usize, seed: u64) -> Self {
        Self {
            kind,
            sigma,
            len,
            seed,
            innovation: Innovation::Normal,
        }
    }

    pub fn with_len(&self, len: usize) -> Self {
        Self {
            len,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.len < 2 {
            return bad(format!("series length {} too short", self.len));
        }
        match &self.kind {
            DgpKind::Ar1 { rho } if rho.is_nan() || rho.abs() >= 1.0 => {
                bad(format!("ar1 needs |rho| < 1, got {rho}"))
            }
            DgpKind::PolynomialTrend { coefficients }
                if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) =>
            {
                bad("polynomial trend needs finite coefficients".into())
            }
            DgpKind::Fractional { d } if !(*d > 0.5 && *d < 1.5) => bad(format!(
                "fractional order d must lie in (0.5, 1.5), got {d}"
            )),
            DgpKind::NearUnitRoot { c } if !(*c >= 0.0 && *c < self.len as f64) => {
                bad(format!("near-unit-root c must lie in [0, T), got {c}"))
            }
            DgpKind::LocalLevel { q } if !(*q >= 0.0 && q.is_finite()) => {
                bad(format!("local-level q must be nonnegative, got {q}"))
            }
            _ => match self.innovation {
                Innovation::StudentT { df } if df.is_nan() || df <= 2.0 => {
                    bad(format!("student-t innovations need df > 2, got {df}"))
                }
                _ => Ok(()),
            },
        }
    }
}

/// MA(∞) weights of `(1-L)^{-d}`: `ψ_0 = 1`, `ψ_k = ψ_{k-1} (k-1+d)/k`.
pub(crate) fn fractional_weights(d: f64, n: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(n);
    let mut w = 1.0;
    for k in 0..n {
        if k > 0 {
            w *= (k as f64 - 1.0 + d) / k as f64;
        }
        psi.push(w);
    }
    psi
}

/// Number of MA terms kept by the fractional generator.
pub(crate) fn fractional_truncation(len: usize) -> usize {
    len.max(1000)
}

/// Full linear convolution `a * b` via FFT.
fn convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len() + b.len() - 1;
    let size = n.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| {
        let mut out: Vec<Complex<f64>> = v.iter().map(|x| Complex::new(*x, 0.0)).collect();
        out.resize(size, Complex::new(0.0, 0.0));
        out
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<Complex<f64>> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    inv.process(&mut prod);
    prod.iter().take(n).map(|c| c.re / size as f64).collect()
}

pub(crate) fn generate_with<R: Rng>(spec: &DgpSpec, rng: &mut R) -> Vec<f64> {
    let n = spec.len;
    let sigma = spec.sigma;
    let mut eps = |rng: &mut R| sigma * spec.innovation.draw(rng);
    match &spec.kind {
        DgpKind::Iid => (0..n).map(|_| eps(rng)).collect(),
        DgpKind::Ar1 { rho } => {
            let mut y = Vec::with_capacity(n);
            let mut prev = eps(rng) / (1.0 - rho * rho).sqrt();
            y.push(prev);
            for _ in 1..n {
                prev = rho * prev + eps(rng);
                y.push(prev);
            }
            y
        }
        DgpKind::PolynomialTrend { coefficients } => (1..=n)
            .map(|t| {
                let t = t as f64;
                let trend = coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c);
                trend + eps(rng)
            })
            .collect(),
        DgpKind::RandomWalk => random_walk(n, rng, &mut eps),
        DgpKind::Fractional { d } => {
            // x_t = Σ_{k<K} ψ_k ε_{t-k}, with K - 1 presample draws first
            let k = fractional_truncation(n);
            let e: Vec<f64> = (0..k - 1 + n).map(|_| eps(rng)).collect();
            let full = convolution(&fractional_weights(*d, k), &e);
            full[k - 1..k - 1 + n].to_vec()
        }
        DgpKind::NearUnitRoot { c } => {
            let rho = 1.0 - c / n as f64;
            let mut y = Vec::with_capacity(n);
            let mut prev = 0.0;
            for _ in 0..n {
                prev = rho * prev + eps(rng);
                y.push(prev);
            }
            y
        }
        DgpKind::LocalLevel { q } => {
            let level = random_walk(n, rng, &mut eps);
            let scale = q.sqrt();
            level.into_iter().map(|m| m + scale * eps(rng)).collect()
        }
    }
}

fn random_walk<R: Rng>(n: usize, rng: &mut R, eps: &mut impl FnMut(&mut R) -> f64) -> Vec<f64> {
    let mut acc = 0.0;
    (0..n)
        .map(|_| {
            acc += eps(rng);
            acc
        })
        .collect()
}

/// Draws one series with years `1..=T`; the same spec always yields the same
/// values.
pub fn generate<S: Scalar>(spec: &DgpSpec) -> Result<CharacteristicSeries<S>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = generate_with(spec, &mut rng)
        .into_iter()
        .map(S::of)
        .collect();
    Ok(CharacteristicSeries::from_values(
        spec.kind.to_string(),
        1,
        values,
    ))
}
