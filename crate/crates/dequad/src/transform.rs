//! Evaluation of the conformal maps H on the real axis.
//!
//! The solved map has the closed form
//!
//! ```text
//! H(t) = C sinh(t − T) + Σ_j 2 D_j tan⁻¹(e^{t − b_j}) + D₀
//! ```
//!
//! whose derivative C cosh(t − T) + Σ_j D_j / cosh(t − b_j) is a product of
//! cosh factors divided by cosh factors; `slit_partial_fractions` recovers the
//! partial-fraction coefficients of that product form. The cheaper variant
//! replaces tan⁻¹(e^u) by (π/4)(tanh(2u/π) + 1), which matches the exact term
//! in value and slope at u = 0 and in both limits u → ±∞.

use crate::error::{Error, Result};

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// The arctan closed form (the conformal map itself).
    Exact,
    /// The tanh approximation.
    Approx,
}

/// A solved transformation: amplitude, shift, slit preimages and step heights.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformParams {
    /// Number of slit pairs (a has m entries, b and d have m − 1).
    pub m: usize,
    /// Sinh amplitude C > 0.
    pub c: f64,
    /// Sinh shift T.
    pub t: f64,
    /// Slit-tip preimages a₁ < b₁ < a₂ < … (interleaved with b).
    pub a: Vec<f64>,
    /// Slit-mouth preimages.
    pub b: Vec<f64>,
    /// Step heights D_j = (δ̃_{j+1} − δ̃_j)/π.
    pub d: Vec<f64>,
    /// Left plateau δ̃₁.
    pub d0: f64,
    pub variant: Variant,
}

impl TransformParams {
    /// Same map, evaluated through the tanh approximation.
    pub fn approximate(&self) -> TransformParams {
        TransformParams {
            variant: Variant::Approx,
            ..self.clone()
        }
    }

    /// Evaluate H per the params' variant.
    pub fn eval(&self, t: f64) -> f64 {
        match self.variant {
            Variant::Exact => h_new_eval(self, t),
            Variant::Approx => h_new2_eval(self, t),
        }
    }

    /// Evaluate H′ per the params' variant.
    pub fn deriv(&self, t: f64) -> f64 {
        match self.variant {
            Variant::Exact => h_new_deriv(self, t),
            Variant::Approx => h_new2_deriv(self, t),
        }
    }
}

/// The plain double-exponential map (π/2) sinh(t) as a one-slit instance.
pub fn de_params() -> TransformParams {
    TransformParams {
        m: 1,
        c: std::f64::consts::FRAC_PI_2,
        t: 0.0,
        a: vec![0.0],
        b: vec![],
        d: vec![],
        d0: 0.0,
        variant: Variant::Exact,
    }
}

/// tan⁻¹(e^u) without overflow: reflected through π/2 for u > 0.
fn atan_exp(u: f64) -> f64 {
    if u > 0.0 {
        std::f64::consts::FRAC_PI_2 - (-u).exp().atan()
    } else {
        u.exp().atan()
    }
}

/// H evaluated through the arctan closed form.
pub fn h_new_eval(p: &TransformParams, t: f64) -> f64 {
    let mut v = p.c * (t - p.t).sinh() + p.d0;
    for (dj, bj) in p.d.iter().zip(&p.b) {
        v += 2.0 * dj * atan_exp(t - bj);
    }
    v
}

/// H′ = C cosh(t − T) + Σ D_j / cosh(t − b_j); strictly positive.
pub fn h_new_deriv(p: &TransformParams, t: f64) -> f64 {
    let mut v = p.c * (t - p.t).cosh();
    for (dj, bj) in p.d.iter().zip(&p.b) {
        v += dj / (t - bj).cosh();
    }
    v
}

/// H evaluated through the tanh approximation.
pub fn h_new2_eval(p: &TransformParams, t: f64) -> f64 {
    let mut v = p.c * (t - p.t).sinh() + p.d0;
    for (dj, bj) in p.d.iter().zip(&p.b) {
        let u = 2.0 * (t - bj) / std::f64::consts::PI;
        v += std::f64::consts::FRAC_PI_2 * dj * (u.tanh() + 1.0);
    }
    v
}

/// Derivative of the tanh approximation.
pub fn h_new2_deriv(p: &TransformParams, t: f64) -> f64 {
    let mut v = p.c * (t - p.t).cosh();
    for (dj, bj) in p.d.iter().zip(&p.b) {
        let c = (2.0 * (t - bj) / std::f64::consts::PI).cosh();
        v += dj / (c * c);
    }
    v
}

/// Image of the upper strip boundary x + iπ/2 under H, as explicit real
/// formulas (no complex arctan is ever evaluated):
///
/// Re = D₀ + π Σ_{j: b_j < x} D_j (the plateau step function),
/// Im = C cosh(x − T) − Σ_j D_j log|tanh((x − b_j)/2)|.
pub fn boundary_image(p: &TransformParams, x: f64) -> Result<(f64, f64)> {
    let mut re = p.d0;
    let mut im = p.c * (x - p.t).cosh();
    for (dj, bj) in p.d.iter().zip(&p.b) {
        if x == *bj {
            return Err(Error::Pole { x });
        }
        if *bj < x {
            re += std::f64::consts::PI * dj;
        }
        im -= dj * ((x - bj) / 2.0).tanh().abs().ln();
    }
    Ok((re, im))
}

/// log|sinh u| without overflow: |u| − log 2 + log(1 − e^{−2|u|}).
fn ln_abs_sinh(u: f64) -> f64 {
    let au = u.abs();
    au - std::f64::consts::LN_2 + (-(-2.0 * au).exp()).ln_1p()
}

/// Partial-fraction data of the product form: for interleaved preimages,
///
/// ```text
/// Π_k cosh(t − a_k) / Π_j cosh(t − b_j)
///     = cosh(t − T_prod) + Σ_j (L_j/2) / cosh(t − b_j)
/// ```
///
/// with T_prod = Σa − Σb and
/// L_j = −2 Π_k sinh(a_k − b_j) / Π_{k≠j} sinh(b_k − b_j),
/// evaluated through log-magnitudes so that widely spread preimages do not
/// overflow intermediate products.
pub fn slit_partial_fractions(a: &[f64], b: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = a.len();
    if m == 0 || b.len() + 1 != m {
        return Err(Error::Domain(format!(
            "need m slit tips interleaved with m−1 mouths, got {} and {}",
            m,
            b.len()
        )));
    }
    for j in 0..m - 1 {
        if !(a[j] < b[j] && b[j] < a[j + 1]) {
            return Err(Error::Domain(
                "slit preimages must satisfy a₁ < b₁ < a₂ < … (strict)".into(),
            ));
        }
    }
    let spread = a[m - 1] - a[0];
    if spread > 300.0 {
        return Err(Error::Overflow { spread });
    }
    let t_prod = a.iter().sum::<f64>() - b.iter().sum::<f64>();
    let mut l = Vec::with_capacity(m - 1);
    for j in 0..m - 1 {
        // L_j = −2 Π_k sinh(a_k − b_j) / Π_{k≠j} sinh(b_k − b_j)
        let mut log_mag = std::f64::consts::LN_2;
        let mut sign = -1.0f64;
        for ak in a {
            let u = ak - b[j];
            log_mag += ln_abs_sinh(u);
            if u < 0.0 {
                sign = -sign;
            }
        }
        for (k, bk) in b.iter().enumerate() {
            if k == j {
                continue;
            }
            let u = bk - b[j];
            log_mag -= ln_abs_sinh(u);
            if u < 0.0 {
                sign = -sign;
            }
        }
        l.push(sign * log_mag.exp());
    }
    Ok((t_prod, l))
}

/// Serialize to the interchange JSON document (fixed field order, 17
/// significant digits).
pub fn params_to_json(p: &TransformParams) -> String {
    let variant = match p.variant {
        Variant::Exact => "Exact",
        Variant::Approx => "Approx",
    };
    let list = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.16e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "{{\n  \"variant\": \"{variant}\",\n  \"C\": {:.16e},\n  \"T\": {:.16e},\n  \"a\": [{}],\n  \"b\": [{}],\n  \"D\": [{}],\n  \"D0\": {:.16e}\n}}\n",
        p.c,
        p.t,
        list(&p.a),
        list(&p.b),
        list(&p.d),
        p.d0
    )
}

/// Parse the interchange JSON document back into params.
pub fn params_from_json(text: &str) -> Result<TransformParams> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        field: None,
        msg: e.to_string(),
    })?;
    let field = |name: &str| -> Result<&serde_json::Value> {
        v.get(name).ok_or_else(|| Error::Parse {
            field: Some(name.into()),
            msg: "missing".into(),
        })
    };
    let num = |name: &str| -> Result<f64> {
        field(name)?.as_f64().ok_or_else(|| Error::Parse {
            field: Some(name.into()),
            msg: "not a number".into(),
        })
    };
    let arr = |name: &str| -> Result<Vec<f64>> {
        field(name)?
            .as_array()
            .ok_or_else(|| Error::Parse {
                field: Some(name.into()),
                msg: "not an array".into(),
            })?
            .iter()
            .map(|x| {
                x.as_f64().ok_or_else(|| Error::Parse {
                    field: Some(name.into()),
                    msg: "non-numeric entry".into(),
                })
            })
            .collect()
    };
    let variant = match field("variant")?.as_str() {
        Some("Exact") => Variant::Exact,
        Some("Approx") => Variant::Approx,
        _ => {
            return Err(Error::Parse {
                field: Some("variant".into()),
                msg: "expected \"Exact\" or \"Approx\"".into(),
            })
        }
    };
    let a = arr("a")?;
    let p = TransformParams {
        m: a.len(),
        c: num("C")?,
        t: num("T")?,
        a,
        b: arr("b")?,
        d: arr("D")?,
        d0: num("D0")?,
        variant,
    };
    if p.m == 0 || p.b.len() + 1 != p.m || p.d.len() != p.b.len() || !(p.c > 0.0) {
        return Err(Error::Validation(
            "params must have C > 0 and m tips with m−1 mouths/steps".into(),
        ));
    }
    Ok(p)
}
