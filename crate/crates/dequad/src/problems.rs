//! Benchmark integrands with their singularity data, decay exponents, and
//! reference values, plus ingestion of user problem descriptions.
//!
//! Integrands are named kernels, not parsed expressions: a problem file
//! selects one of the built-in kernels by name. Each kernel takes a `Sample`
//! so that endpoint-singular factors (log(1−x), 1/√(1+x), 1/√x) are computed
//! from the numerically stable endpoint distances instead of from x itself.

use std::path::Path;

use crate::calibration::DecaySpec;
use crate::endpoint_maps::{IntervalKind, Sample, Singularity};
use crate::error::{Error, Result};

/// Identifier of a built-in benchmark problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinId {
    P51,
    P52,
    P53,
    P54,
}

impl BuiltinId {
    pub const ALL: [BuiltinId; 4] = [
        BuiltinId::P51,
        BuiltinId::P52,
        BuiltinId::P53,
        BuiltinId::P54,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BuiltinId::P51 => "p51",
            BuiltinId::P52 => "p52",
            BuiltinId::P53 => "p53",
            BuiltinId::P54 => "p54",
        }
    }

    pub fn parse(s: &str) -> Option<BuiltinId> {
        match s {
            "p51" => Some(BuiltinId::P51),
            "p52" => Some(BuiltinId::P52),
            "p53" => Some(BuiltinId::P53),
            "p54" => Some(BuiltinId::P54),
            _ => None,
        }
    }
}

/// A named integrand kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// f ≡ 1.
    Unit,
    /// x^{−1/2} e^{−x} on (0, ∞); integrates to Γ(1/2) = √π.
    GammaHalf,
    /// The finite-interval benchmark kernel.
    P51,
    /// The whole-line benchmark kernel.
    P52,
    /// The algebraic half-line benchmark kernel.
    P53,
    /// The exponentially weighted half-line benchmark kernel.
    P54,
}

impl Kernel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kernel::Unit => "unit",
            Kernel::GammaHalf => "gamma_half",
            Kernel::P51 => "p51",
            Kernel::P52 => "p52",
            Kernel::P53 => "p53",
            Kernel::P54 => "p54",
        }
    }

    pub fn parse(s: &str) -> Option<Kernel> {
        match s {
            "unit" => Some(Kernel::Unit),
            "gamma_half" => Some(Kernel::GammaHalf),
            "p51" => Some(Kernel::P51),
            "p52" => Some(Kernel::P52),
            "p53" => Some(Kernel::P53),
            "p54" => Some(Kernel::P54),
            _ => None,
        }
    }

    pub fn eval(&self, s: &Sample) -> f64 {
        let x = s.x;
        let sq = |v: f64| v * v;
        match self {
            Kernel::Unit => 1.0,
            Kernel::GammaHalf => (-x).exp() / s.dist_lo.sqrt(),
            Kernel::P51 => {
                // exp((1 + (x+1/2)²)^{-1}) log(1−x) / ((1/4 + (x−1/2)²) √(1+x))
                (1.0 / (1.0 + sq(x + 0.5))).exp() * s.dist_hi.ln()
                    / ((0.25 + sq(x - 0.5)) * s.dist_lo.sqrt())
            }
            Kernel::P52 => {
                // exp(10/(1+(x+2)²)) cos(10/(1/4+(x+1)²))
                //   / ((x−1)² + 1/16) / √((x−2)² + 1)
                (10.0 / (1.0 + sq(x + 2.0))).exp() * (10.0 / (0.25 + sq(x + 1.0))).cos()
                    / ((sq(x - 1.0) + 0.0625) * (sq(x - 2.0) + 1.0).sqrt())
            }
            Kernel::P53 => {
                // exp((1/50)(0.04+(x−0.3)²)^{−3/2}) exp((1/20)(0.09+(x−1.2)²)^{−3/2})
                //   / (√x √(0.36+(x−0.5)²) (0.25+(x−0.8)²))
                let t1 = (0.02 * (0.04 + sq(x - 0.3)).powf(-1.5)).exp();
                let t4 = (0.05 * (0.09 + sq(x - 1.2)).powf(-1.5)).exp();
                t1 * t4
                    / (s.dist_lo.sqrt() * (0.36 + sq(x - 0.5)).sqrt() * (0.25 + sq(x - 0.8)))
            }
            Kernel::P54 => {
                // cos(5/(0.01+(x−1)²)) cos(10/(0.01+(x−7)²))
                //   × Π_{j=2..6} exp(c_j/(ε_j²+(x−j)²)) × e^{−x/5}/√x
                const C: [f64; 5] = [0.8, 0.2, 0.5, 0.1, 0.5];
                const EPS: [f64; 5] = [0.5, 0.3, 0.5, 0.2, 0.5];
                let mut v = (5.0 / (0.01 + sq(x - 1.0))).cos() * (10.0 / (0.01 + sq(x - 7.0))).cos();
                for j in 0..5 {
                    v *= (C[j] / (sq(EPS[j]) + sq(x - (j as f64 + 2.0)))).exp();
                }
                v * (-x / 5.0).exp() / s.dist_lo.sqrt()
            }
        }
    }
}

/// A quadrature problem: interval, integrand, singularity data, endpoint
/// decay, and an optional reference value.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub kind: IntervalKind,
    pub kernel: Kernel,
    pub singularities: Vec<Singularity>,
    pub decay: DecaySpec,
    pub reference: Option<f64>,
}

impl Problem {
    /// Evaluate the integrand at a sample point.
    pub fn eval(&self, s: &Sample) -> f64 {
        self.kernel.eval(s)
    }

    fn check(self) -> Result<Problem> {
        self.decay.validate()?;
        if self.decay.kind() != self.kind {
            return Err(Error::Validation(format!(
                "decay spec {:?} does not match interval {:?}",
                self.decay, self.kind
            )));
        }
        for s in &self.singularities {
            if !(s.eps > 0.0) {
                return Err(Error::Validation(format!(
                    "singularity at {} must lie strictly off the axis",
                    s.delta
                )));
            }
        }
        Ok(self)
    }
}

fn sing(delta: f64, eps: f64) -> Singularity {
    Singularity { delta, eps }
}

/// The four benchmark problems.
///
/// References are oracle-grade values (the printed six-digit forms are
/// −2.04645, 15.0136, 30.6929, −0.3451).
pub fn builtin(id: BuiltinId) -> Problem {
    match id {
        BuiltinId::P51 => Problem {
            name: "finite interval, two interior singularity pairs".into(),
            kind: IntervalKind::Finite,
            kernel: Kernel::P51,
            singularities: vec![sing(-0.5, 1.0), sing(0.5, 0.5)],
            decay: DecaySpec::Finite { p: 0.0, q: -0.5 },
            reference: Some(-2.0464508116069475),
        },
        BuiltinId::P52 => Problem {
            name: "whole line, four singularity pairs".into(),
            kind: IntervalKind::RealLine,
            kernel: Kernel::P52,
            singularities: vec![
                sing(-2.0, 1.0),
                sing(-1.0, 0.5),
                sing(1.0, 0.25),
                sing(2.0, 1.0),
            ],
            decay: DecaySpec::RealLine { r: -3.0, s: -3.0 },
            reference: Some(15.013361987606277),
        },
        BuiltinId::P53 => Problem {
            name: "half line, algebraic decay, four singularity pairs".into(),
            kind: IntervalKind::HalfLineAlgebraic,
            kernel: Kernel::P53,
            singularities: vec![
                sing(0.3, 0.2),
                sing(0.5, 0.6),
                sing(0.8, 0.5),
                sing(1.2, 0.3),
            ],
            decay: DecaySpec::HalfLineAlgebraic { r: -3.5, q: -0.5 },
            reference: Some(30.692936912278556),
        },
        BuiltinId::P54 => Problem {
            name: "half line, exponential weight, seven singularity pairs".into(),
            kind: IntervalKind::HalfLineExpWeight(0.2),
            kernel: Kernel::P54,
            singularities: vec![
                sing(1.0, 0.1),
                sing(2.0, 0.5),
                sing(3.0, 0.3),
                sing(4.0, 0.5),
                sing(5.0, 0.2),
                sing(6.0, 0.5),
                sing(7.0, 0.1),
            ],
            decay: DecaySpec::HalfLineExpWeight { v: 0.2, q: -0.5 },
            reference: Some(-0.3451882594217504),
        },
    }
}

/// Read a problem description file.
///
/// Schema: `{name, interval: {kind, v?}, kernel,
/// singularities: [{delta, eps}], decay: {p?, q?, r?, s?, v?}, reference?}`.
pub fn load_problem(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        field: None,
        msg: format!("{}: {e}", path.display()),
    })?;
    parse_problem(&text)
}

/// Parse a problem description from its JSON text.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        field: None,
        msg: e.to_string(),
    })?;
    let parse_err = |field: &str, msg: &str| Error::Parse {
        field: Some(field.into()),
        msg: msg.into(),
    };
    let name = v
        .get("name")
        .and_then(|x| x.as_str())
        .ok_or_else(|| parse_err("name", "missing or not a string"))?
        .to_string();
    let interval = v
        .get("interval")
        .ok_or_else(|| parse_err("interval", "missing"))?;
    let kind_str = interval
        .get("kind")
        .and_then(|x| x.as_str())
        .ok_or_else(|| parse_err("interval.kind", "missing or not a string"))?;
    let kind = match kind_str {
        "finite" => IntervalKind::Finite,
        "real_line" => IntervalKind::RealLine,
        "half_line_algebraic" => IntervalKind::HalfLineAlgebraic,
        "half_line_exp_weight" => {
            let rate = interval
                .get("v")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| parse_err("interval.v", "missing weight rate"))?;
            if !(rate > 0.0) {
                return Err(Error::Validation("weight rate v must be positive".into()));
            }
            IntervalKind::HalfLineExpWeight(rate)
        }
        other => {
            return Err(parse_err(
                "interval.kind",
                &format!("unknown interval kind `{other}`"),
            ))
        }
    };
    let kernel_str = v
        .get("kernel")
        .and_then(|x| x.as_str())
        .ok_or_else(|| parse_err("kernel", "missing kernel name"))?;
    let kernel = Kernel::parse(kernel_str)
        .ok_or_else(|| parse_err("kernel", &format!("unknown kernel `{kernel_str}`")))?;
    let mut singularities = Vec::new();
    if let Some(arr) = v.get("singularities") {
        let arr = arr
            .as_array()
            .ok_or_else(|| parse_err("singularities", "not an array"))?;
        for item in arr {
            let delta = item
                .get("delta")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| parse_err("singularities.delta", "missing"))?;
            let eps = item
                .get("eps")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| parse_err("singularities.eps", "missing"))?;
            if !(eps > 0.0) {
                return Err(Error::Validation(format!(
                    "singularity at {delta} must have eps > 0"
                )));
            }
            singularities.push(Singularity { delta, eps });
        }
    }
    let decay_v = v.get("decay").ok_or_else(|| parse_err("decay", "missing"))?;
    let exp = |key: &str| -> Result<f64> {
        decay_v
            .get(key)
            .and_then(|x| x.as_f64())
            .ok_or_else(|| parse_err(&format!("decay.{key}"), "missing exponent"))
    };
    let decay = match kind {
        IntervalKind::Finite => DecaySpec::Finite {
            p: exp("p")?,
            q: exp("q")?,
        },
        IntervalKind::RealLine => DecaySpec::RealLine {
            r: exp("r")?,
            s: exp("s")?,
        },
        IntervalKind::HalfLineAlgebraic => DecaySpec::HalfLineAlgebraic {
            r: exp("r")?,
            q: exp("q")?,
        },
        IntervalKind::HalfLineExpWeight(_) => DecaySpec::HalfLineExpWeight {
            v: exp("v")?,
            q: exp("q")?,
        },
    };
    let reference = v.get("reference").and_then(|x| x.as_f64());
    Problem {
        name,
        kind,
        kernel,
        singularities,
        decay,
        reference,
    }
    .check()
}
