//! Trapezoidal rule over the transformed integrand at the prescribed mesh
//! size, convergence sweeps, and the strip-width diagnostic for the plain DE
//! map.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::calibration::{beta2, choose_t, de_beta2, solve_params, Calibration};
use crate::endpoint_maps::{collect_singularities, psi_preimage, psi_sample};
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::transform::{de_params, TransformParams};

/// Which transformation drives the quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Plain (π/2) sinh(t).
    De,
    /// The solved slit map.
    New,
    /// The solved slit map through the tanh approximation.
    New2,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::De => "de",
            Method::New => "new",
            Method::New2 => "new2",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "de" => Some(Method::De),
            "new" => Some(Method::New),
            "new2" => Some(Method::New2),
            _ => None,
        }
    }
}

/// Result of one trapezoid evaluation with N = 2n+1 nodes.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub n: usize,
    pub h: f64,
    /// Nodes whose tail-underflow path fired; they contribute exactly zero.
    pub nodes_skipped: usize,
}

/// One convergence data point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub method: Method,
    pub n: usize,
    pub h: f64,
    pub value: f64,
    /// Absolute error against the problem reference, when one is known.
    pub abs_error: Option<f64>,
    /// Wall time including the (shared) parameter solve.
    pub elapsed: Duration,
    /// Present when this record failed instead of producing a value.
    pub error: Option<String>,
}

/// Mesh size h = log(2πdγn/β₂)/(γn) with d = π/2 and γ = 1.
pub fn mesh_size(n: usize, beta2: f64) -> Result<f64> {
    let arg = std::f64::consts::PI * std::f64::consts::PI * n as f64 / beta2;
    if !(arg > std::f64::consts::E) {
        return Err(Error::Domain(format!(
            "mesh size undefined: π²n/β₂ = {arg} ≤ e (n too small for β₂ = {beta2})"
        )));
    }
    Ok(arg.ln() / n as f64)
}

/// The transformed integrand F(t) = f(ψ(H(t))) ψ′(H(t)) H′(t). Returns 0
/// without calling f when ψ′ has underflowed (deep tails); a non-finite f at
/// an interior node is an error.
pub fn transformed_integrand(problem: &Problem, p: &TransformParams, t: f64) -> Result<f64> {
    let w = p.eval(t);
    match psi_sample(problem.kind, w) {
        None => Ok(0.0),
        Some((sample, psi_d)) => {
            let f = problem.eval(&sample);
            if !f.is_finite() {
                return Err(Error::Eval { t, x: sample.x });
            }
            Ok(f * psi_d * p.deriv(t))
        }
    }
}

/// Trapezoid sum h Σ_{j=−n}^{n} F(jh) with compensated accumulation in
/// ascending |j|.
pub fn integrate(
    problem: &Problem,
    p: &TransformParams,
    beta2: f64,
    n: usize,
) -> Result<QuadratureResult> {
    let h = mesh_size(n, beta2)?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut skipped = 0usize;
    let mut add = |term: f64| {
        // Neumaier update: the compensation is added once at the end.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    };
    let mut node = |t: f64| -> Result<()> {
        let w = p.eval(t);
        match psi_sample(problem.kind, w) {
            None => skipped += 1,
            Some((sample, psi_d)) => {
                let f = problem.eval(&sample);
                if !f.is_finite() {
                    return Err(Error::Eval { t, x: sample.x });
                }
                add(f * psi_d * p.deriv(t));
            }
        }
        Ok(())
    };
    node(0.0)?;
    for j in 1..=n {
        let t = j as f64 * h;
        node(t)?;
        node(-t)?;
    }
    Ok(QuadratureResult {
        value: (sum + comp) * h,
        n,
        h,
        nodes_skipped: skipped,
    })
}

/// Everything a method needs to integrate: the map and its β₂.
#[derive(Debug, Clone)]
pub struct MethodSetup {
    pub params: TransformParams,
    pub beta2: f64,
    pub calibration: Calibration,
}

/// Solve (or construct) the transformation for a problem and method.
pub fn setup(problem: &Problem, method: Method) -> Result<MethodSetup> {
    let cal = choose_t(&problem.decay)?;
    match method {
        Method::De => Ok(MethodSetup {
            params: de_params(),
            beta2: de_beta2(&problem.decay)?,
            calibration: Calibration {
                t: 0.0,
                beta2_per_c: de_beta2(&problem.decay)? / std::f64::consts::FRAC_PI_2,
            },
        }),
        Method::New | Method::New2 => {
            let mapped = collect_singularities(problem.kind, &problem.singularities)?;
            let params = solve_params(&mapped, &cal)?;
            let b2 = beta2(&params, &cal);
            let params = if method == Method::New2 {
                params.approximate()
            } else {
                params
            };
            Ok(MethodSetup {
                params,
                beta2: b2,
                calibration: cal,
            })
        }
    }
}

/// One record per n; the parameters are solved once and reused, and each
/// record's elapsed time includes that shared solve time.
pub fn sweep(problem: &Problem, method: Method, n_list: &[usize]) -> Result<Vec<SweepRecord>> {
    let solve_start = Instant::now();
    let setup = setup(problem, method)?;
    let solve_time = solve_start.elapsed();
    let mut records = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let start = Instant::now();
        match integrate(problem, &setup.params, setup.beta2, n) {
            Ok(r) => records.push(SweepRecord {
                method,
                n,
                h: r.h,
                value: r.value,
                abs_error: problem.reference.map(|re| (r.value - re).abs()),
                elapsed: solve_time + start.elapsed(),
                error: None,
            }),
            Err(e) => records.push(SweepRecord {
                method,
                n,
                h: 0.0,
                value: f64::NAN,
                abs_error: None,
                elapsed: solve_time + start.elapsed(),
                error: Some(e.to_string()),
            }),
        }
    }
    records.sort_by_key(|r| r.n);
    Ok(records)
}

/// The strip half-width available to the plain DE map:
/// d = min_j Im[sinh⁻¹((2/π) ψ⁻¹(δ_j + ε_j i))], clamped to π/2. Only the
/// integrand's own singularities enter; the map's intrinsic ones do not.
pub fn d_de(problem: &Problem) -> Result<f64> {
    if problem.singularities.is_empty() {
        return Err(Error::Domain(
            "d_DE needs at least one integrand singularity".into(),
        ));
    }
    let mut d = f64::INFINITY;
    for s in &problem.singularities {
        let pre = psi_preimage(problem.kind, Complex64::new(s.delta, s.eps))?;
        let z = Complex64::new(pre.delta_t, pre.eps_t) * (2.0 / std::f64::consts::PI);
        let im = (z + (z * z + 1.0).sqrt()).ln().im;
        d = d.min(im);
    }
    Ok(d.min(std::f64::consts::FRAC_PI_2))
}
