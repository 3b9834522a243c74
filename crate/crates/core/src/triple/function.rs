//! Scalar functions vanishing at zero, the symbols of the triple functional
//! calculus.

use std::fmt;
use std::sync::Arc;

use crate::matrix::{C64, ZERO};
use crate::{Error, Result};

type Evaluator = dyn Fn(f64) -> C64 + Send + Sync;

/// A continuous function `f: [0, ∞) → C` with `f(0) = 0`.
#[derive(Clone)]
pub struct ScalarFunction {
    label: String,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ScalarFunction").field(&self.label).finish()
    }
}

impl ScalarFunction {
    /// Wraps `f`, rejecting it unless `f(0)` is exactly zero.
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let label = label.into();
        let at_zero = f(0.0);
        if at_zero != ZERO {
            return Err(Error::NotVanishingAtZero {
                label,
                value: format!("{at_zero}"),
            });
        }
        Ok(Self {
            label,
            evaluator: Arc::new(f),
        })
    }

    fn real(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(label, move |t| C64::new(f(t), 0.0)).expect("preset vanishes at zero")
    }

    #[inline]
    pub fn eval(&self, t: f64) -> C64 {
        (self.evaluator)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `w(t) = t`, the generator of the calculus.
    pub fn identity() -> Self {
        Self::real("identity", |t| t)
    }

    pub fn cube() -> Self {
        Self::real("cube", |t| t * t * t)
    }

    pub fn cuberoot() -> Self {
        Self::real("cuberoot", f64::cbrt)
    }

    /// `t ↦ max(t - eps, 0)`.
    pub fn chop(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "chop threshold must be >= 0, got {eps}"
            )));
        }
        Ok(Self::real(format!("chop:{eps}"), move |t| {
            (t - eps).max(0.0)
        }))
    }

    /// `t ↦ t^p` for `p > 0`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidInput(format!(
                "power exponent must be > 0, got {p}"
            )));
        }
        Ok(Self::real(format!("power:{p}"), move |t| {
            if t == 0.0 {
                0.0
            } else {
                t.powf(p)
            }
        }))
    }

    /// `Σ_k c_k t^{2k-1}`, coefficients listed for `t, t³, t⁵, …`.
    pub fn odd_polynomial(coeffs: Vec<C64>) -> Self {
        let label = format!("poly:{}", format_coeffs(&coeffs));
        Self::new(label, move |t| {
            let t2 = t * t;
            let mut power = t;
            let mut acc = ZERO;
            for c in &coeffs {
                acc += c * power;
                power *= t2;
            }
            acc
        })
        .expect("odd polynomials vanish at zero")
    }

    /// `Σ_k c_k t^k` for `k = 1, 2, …` (no constant term).
    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        let label = format!("polynomial:{}", format_coeffs(&coeffs));
        Self::new(label, move |t| {
            let mut power = t;
            let mut acc = ZERO;
            for c in &coeffs {
                acc += c * power;
                power *= t;
            }
            acc
        })
        .expect("polynomials without constant term vanish at zero")
    }

    /// `t ↦ f1(t) · conj(f2(t)) · f3(t)`.
    pub fn triple_product(f1: &ScalarFunction, f2: &ScalarFunction, f3: &ScalarFunction) -> Self {
        let (a, b, c) = (f1.clone(), f2.clone(), f3.clone());
        let label = format!("[{},{},{}]", f1.label, f2.label, f3.label);
        Self::new(label, move |t| a.eval(t) * b.eval(t).conj() * c.eval(t))
            .expect("product of functions vanishing at zero")
    }

    /// `t ↦ self(t) - other(t)`.
    pub fn difference(&self, other: &ScalarFunction) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let label = format!("{}-{}", self.label, other.label);
        Self::new(label, move |t| a.eval(t) - b.eval(t)).expect("difference vanishes at zero")
    }

    /// `|self(t)|`, a real-valued function.
    pub fn modulus(&self) -> Self {
        let a = self.clone();
        let label = format!("|{}|", self.label);
        Self::new(label, move |t| C64::new(a.eval(t).norm(), 0.0))
            .expect("modulus vanishes at zero")
    }

    /// Parses a preset: `identity`, `cube`, `cuberoot`, `chop:<eps>`,
    /// `power:<p>` or `poly:[c1,c3,…]` where each coefficient is a number or
    /// a `[re, im]` pair.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "identity" | "w" => return Ok(Self::identity()),
            "cube" => return Ok(Self::cube()),
            "cuberoot" => return Ok(Self::cuberoot()),
            _ => {}
        }
        let (name, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("unknown function preset `{spec}`")))?;
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number `{s}` in `{spec}`")))
        };
        match name {
            "chop" => Self::chop(number(arg)?),
            "power" => Self::power(number(arg)?),
            "poly" => Ok(Self::odd_polynomial(parse_coeffs(arg)?)),
            _ => Err(Error::InvalidInput(format!(
                "unknown function preset `{spec}`"
            ))),
        }
    }
}

fn format_coeffs(coeffs: &[C64]) -> String {
    let parts: Vec<String> = coeffs
        .iter()
        .map(|c| {
            if c.im == 0.0 {
                format!("{}", c.re)
            } else {
                format!("[{},{}]", c.re, c.im)
            }
        })
        .collect();
    format!("[{}]", parts.join(","))
}

fn parse_coeffs(text: &str) -> Result<Vec<C64>> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("polynomial coefficients `{text}`: {e}")))?;
    let items = value.as_array().ok_or_else(|| {
        Error::InvalidInput(format!(
            "polynomial coefficients must be a list, got `{text}`"
        ))
    })?;
    items
        .iter()
        .map(|item| match item {
            serde_json::Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            serde_json::Value::Array(pair) if pair.len() == 2 => {
                let re = pair[0].as_f64();
                let im = pair[1].as_f64();
                match (re, im) {
                    (Some(re), Some(im)) => Ok(C64::new(re, im)),
                    _ => Err(Error::InvalidInput(format!("bad coefficient {item}"))),
                }
            }
            _ => Err(Error::InvalidInput(format!("bad coefficient {item}"))),
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|cs| {
            if cs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                Ok(cs)
            } else {
                Err(Error::InvalidInput(
                    "polynomial coefficients must be finite".into(),
                ))
            }
        })
}
