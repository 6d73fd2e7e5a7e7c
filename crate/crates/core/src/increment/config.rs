//! Constants steering the increment iteration.
//!
//! Every threshold is a monomial `c · 2^e · δ^a · β^b` evaluated in the log
//! domain, so the literal asymptotic constants (exponents near `−2000`) stay
//! representable as presets; they clamp to `f64::MIN_POSITIVE` instead of
//! underflowing to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `coeff · 2^log2_coeff · δ^delta_pow · β^beta_pow`, clamped to
/// `[f64::MIN_POSITIVE, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(default = "one")]
    pub coeff: f64,
    #[serde(default)]
    pub log2_coeff: f64,
    #[serde(default)]
    pub delta_pow: f64,
    #[serde(default)]
    pub beta_pow: f64,
}

fn one() -> f64 {
    1.0
}

impl Monomial {
    pub const fn fixed(value: f64) -> Self {
        Monomial { coeff: value, log2_coeff: 0.0, delta_pow: 0.0, beta_pow: 0.0 }
    }

    pub const fn new(log2_coeff: f64, delta_pow: f64, beta_pow: f64) -> Self {
        Monomial { coeff: 1.0, log2_coeff, delta_pow, beta_pow }
    }

    /// Unclamped `log₂` of the value.
    pub fn log2(&self, delta: f64, beta: f64) -> f64 {
        let mut l = self.coeff.log2() + self.log2_coeff;
        if self.delta_pow != 0.0 {
            l += self.delta_pow * delta.log2();
        }
        if self.beta_pow != 0.0 {
            l += self.beta_pow * beta.log2();
        }
        l
    }

    pub fn eval(&self, delta: f64, beta: f64) -> f64 {
        self.log2(delta, beta).exp2().clamp(f64::MIN_POSITIVE, 1.0)
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = self.coeff.is_finite()
            && self.coeff > 0.0
            && self.log2_coeff.is_finite()
            && self.delta_pow.is_finite()
            && self.beta_pow.is_finite();
        if !ok {
            return Err(Error::InvalidParameter(format!("{name}: coefficients must be finite with coeff > 0")));
        }
        Ok(())
    }
}

/// The required density gain of one increment step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GainFloor {
    /// `2⁻¹⁵ · min(α²δ⁻⁵, αδ⁻²)` with the step's `α` and `δ`.
    IncrementBound,
    Monomial(Monomial),
}

/// Attendant scale `κ = c · 2^e · α₀^p`; the attendant radius factor is
/// then `κ/(100d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsRule {
    #[serde(default)]
    pub log2_coeff: f64,
    pub alpha0_pow: f64,
}

impl EpsRule {
    pub fn kappa(&self, alpha0: f64) -> f64 {
        (self.log2_coeff + self.alpha0_pow * alpha0.log2()).exp2().clamp(f64::MIN_POSITIVE, 1.0)
    }

    pub fn radius_factor(&self, d: usize, alpha0: f64) -> f64 {
        self.kappa(alpha0) / (100.0 * d.max(1) as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Desk,
    Asymptotic,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub preset: Preset,
    /// Rectilinear uniformity threshold.
    pub alpha: Monomial,
    /// Factor-set Fourier bias threshold inside the current Bohr set.
    pub alpha0: Monomial,
    /// Fraction of bad slices tolerated.
    pub alpha1: f64,
    pub eps_rule: EpsRule,
    pub max_steps: usize,
    pub min_density_gain: GainFloor,
    /// The iteration stops once `δ` reaches this value.
    pub density_ceiling: f64,
    /// Regularity parameter of every Bohr set built by the driver.
    pub kappa: f64,
    /// Cap on the translates examined by the Fourier route; larger windows
    /// are sampled with the driver's generator.
    pub max_translates: usize,
    /// Scale conditions kept for reference only; never enforced.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig::desk()
    }
}

impl ConstantsConfig {
    /// `α = δ⁴/8`, gain floor from the increment inequality, `κ = 1/8`.
    pub fn desk() -> Self {
        ConstantsConfig {
            preset: Preset::Desk,
            alpha: Monomial::new(-3.0, 4.0, 0.0),
            alpha0: Monomial::new(-3.0, 4.0, 0.0),
            alpha1: 1.0 / 128.0,
            eps_rule: EpsRule { log2_coeff: -5.0, alpha0_pow: 1.0 },
            max_steps: 16,
            min_density_gain: GainFloor::IncrementBound,
            density_ceiling: 1.0,
            kappa: crate::bohr::DEFAULT_KAPPA,
            max_translates: 4096,
            notes: Vec::new(),
        }
    }

    /// The asymptotic constants. They are vacuous at any computable size and
    /// evaluate to (clamped) underflow.
    pub fn asymptotic() -> Self {
        ConstantsConfig {
            preset: Preset::Asymptotic,
            alpha: Monomial::new(-100.0, 9.0, 0.0),
            alpha0: Monomial::new(-2000.0, 96.0, 48.0),
            alpha1: 1.0 / 128.0,
            eps_rule: EpsRule { log2_coeff: -100.0, alpha0_pow: 2.0 },
            max_steps: 16,
            min_density_gain: GainFloor::Monomial(Monomial::new(-600.0, 22.0, 0.0)),
            density_ceiling: 1.0,
            kappa: crate::bohr::DEFAULT_KAPPA,
            max_translates: 4096,
            notes: vec![
                "scale condition: N >= exp(delta^(-C delta^-21)), i.e. delta >> (log log N)^(-1/22)".into(),
                "step bound K = 2^700 delta^-21".into(),
            ],
        }
    }

    /// Desk preset with a fixed rectilinear threshold.
    pub fn with_fixed_alpha(alpha: f64) -> Self {
        ConstantsConfig { preset: Preset::Custom, alpha: Monomial::fixed(alpha), ..ConstantsConfig::desk() }
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate("alpha")?;
        self.alpha0.validate("alpha0")?;
        if let GainFloor::Monomial(m) = &self.min_density_gain {
            m.validate("min_density_gain")?;
        }
        if !(self.alpha1 > 0.0 && self.alpha1 <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha1 must lie in (0,1], got {}", self.alpha1)));
        }
        if !(self.eps_rule.log2_coeff.is_finite() && self.eps_rule.alpha0_pow.is_finite()) {
            return Err(Error::InvalidParameter("eps_rule must be finite".into()));
        }
        if !(self.density_ceiling > 0.0 && self.density_ceiling <= 1.0) {
            return Err(Error::InvalidParameter(format!("density_ceiling must lie in (0,1], got {}", self.density_ceiling)));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::InvalidParameter(format!("kappa must lie in (0,1), got {}", self.kappa)));
        }
        if self.max_translates == 0 {
            return Err(Error::InvalidParameter("max_translates must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: ConstantsConfig = serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn alpha_at(&self, delta: f64, beta: f64) -> f64 {
        self.alpha.eval(delta, beta)
    }

    pub fn alpha0_at(&self, delta: f64, beta: f64) -> f64 {
        self.alpha0.eval(delta, beta)
    }

    pub fn gain_floor(&self, alpha: f64, delta: f64, beta: f64) -> f64 {
        match &self.min_density_gain {
            GainFloor::IncrementBound => increment_gain(alpha, delta),
            GainFloor::Monomial(m) => m.eval(delta, beta),
        }
    }
}

/// `2⁻¹⁵ · min(α²δ⁻⁵, αδ⁻²)`.
pub fn increment_gain(alpha: f64, delta: f64) -> f64 {
    let a = 2.0 * alpha.log2() - 5.0 * delta.log2();
    let b = alpha.log2() - 2.0 * delta.log2();
    (a.min(b) - 15.0).exp2()
}
