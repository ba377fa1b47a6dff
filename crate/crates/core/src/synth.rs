//! Synthetic noise and accumulated ARFIMA(0,d,0) paths used as oracles for
//! the estimators.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind, SeriesMeta};
use crate::transform::{accumulate_values, check_memory, fractional_revert_values, PRNG_NAME};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Noise {
    Gaussian {
        sigma: f64,
    },
    /// Symmetric α-stable with the given scale.
    Stable {
        alpha: f64,
        scale: f64,
    },
    /// Pareto magnitude with PDF tail |x|^{−ν}, random sign.
    ParetoSymmetric {
        nu: f64,
        x_min: f64,
    },
}

impl Noise {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Noise::Gaussian { sigma } if !(sigma > 0.0) => {
                Err(Error::param(format!("sigma must be > 0, got {sigma}")))
            }
            Noise::Stable { alpha, .. } if !(alpha > 0.0 && alpha <= 2.0) => Err(Error::param(
                format!("alpha must be in (0, 2], got {alpha}"),
            )),
            Noise::Stable { scale, .. } if !(scale > 0.0) => {
                Err(Error::param(format!("scale must be > 0, got {scale}")))
            }
            Noise::ParetoSymmetric { nu, .. } if !(nu > 1.0) => {
                Err(Error::param(format!("nu must be > 1, got {nu}")))
            }
            Noise::ParetoSymmetric { x_min, .. } if !(x_min > 0.0) => {
                Err(Error::param(format!("x_min must be > 0, got {x_min}")))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Noise::Gaussian { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            Noise::Stable { alpha, scale } => scale * symmetric_stable(alpha, rng),
            Noise::ParetoSymmetric { nu, x_min } => {
                // 1 - U lies in (0, 1], so the power never blows up.
                let u: f64 = 1.0 - rng.random::<f64>();
                let magnitude = x_min * u.powf(-1.0 / (nu - 1.0));
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Noise::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            Noise::Stable { alpha, scale } => format!("stable(alpha={alpha}, scale={scale})"),
            Noise::ParetoSymmetric { nu, x_min } => {
                format!("pareto_symmetric(nu={nu}, x_min={x_min})")
            }
        }
    }
}

/// Standard symmetric α-stable variate by the Chambers–Mallows–Stuck
/// transform (β = 0). α = 2 gives N(0, 2), α = 1 gives Cauchy.
pub fn symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = loop {
        let v = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
        if v.abs() < FRAC_PI_2 {
            break v;
        }
    };
    let w: f64 = loop {
        let e: f64 = Exp1.sample(rng);
        if e > 0.0 {
            break e;
        }
    };
    if alpha == 1.0 {
        return u.tan();
    }
    let a = (alpha * u).sin() / u.cos().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * u).cos() / w).powf((1.0 - alpha) / alpha);
    a * b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub noise: Noise,
    #[serde(default)]
    pub d: f64,
    pub length: usize,
    #[serde(default)]
    pub seed: u64,
    /// Fractional-sum terms; `None` uses the full available history.
    #[serde(default)]
    pub truncation: Option<usize>,
}

impl GenSpec {
    pub fn new(noise: Noise, d: f64, length: usize, seed: u64) -> Self {
        GenSpec {
            noise,
            d,
            length,
            seed,
            truncation: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        check_memory(self.d)?;
        if self.length == 0 {
            return Err(Error::param("length must be at least 1"));
        }
        if self.truncation == Some(0) {
            return Err(Error::param("truncation must be at least 1"));
        }
        Ok(())
    }

    fn meta(&self, what: &str) -> SeriesMeta {
        let mut meta = SeriesMeta::new("synthetic", what);
        meta.provenance.push(format!(
            "{}(prng={PRNG_NAME}, seed={})",
            self.noise.label(),
            self.seed
        ));
        meta
    }
}

fn noise_values(spec: &GenSpec) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.length)
        .map(|_| spec.noise.sample(&mut rng))
        .collect()
}

/// `length` i.i.d. draws from the spec's noise law (memory ignored).
pub fn gen_noise(spec: &GenSpec) -> Result<Series> {
    spec.validate()?;
    Ok(Series::new(
        noise_values(spec),
        SeriesKind::Synthetic,
        spec.meta("gen_noise"),
    ))
}

/// Fractionally summed increments of an ARFIMA(0,d,0) process.
pub fn gen_arfima_increments(spec: &GenSpec) -> Result<Series> {
    spec.validate()?;
    let n_terms = spec.truncation.unwrap_or(spec.length);
    let y = fractional_revert_values(&noise_values(spec), spec.d, n_terms)?;
    let mut meta = spec.meta("gen_arfima");
    meta.provenance.push(format!(
        "fractional_revert(d={}, n_terms={n_terms})",
        spec.d
    ));
    Ok(Series::new(y, SeriesKind::Synthetic, meta))
}

/// Accumulated ARFIMA(0,d,0) path: noise, fractional sum, running sum from 0.
pub fn gen_arfima(spec: &GenSpec) -> Result<Series> {
    let inc = gen_arfima_increments(spec)?;
    let x = accumulate_values(&inc.values, 0.0);
    Ok(inc.derive(x, SeriesKind::Synthetic, "accumulate(start=0)"))
}
