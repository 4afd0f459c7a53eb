//! Choice of the shift T and decay coefficient from endpoint behavior, and
//! the nonlinear solve for the map parameters C, a, b.
//!
//! The shift T balances the two endpoint decay rates of the transformed
//! integrand; with T fixed, the slit map is pinned down by requiring that the
//! image of the upper strip boundary dips to exactly ε̃_k over each slit
//! position (value condition) with a critical point there (slope condition).
//! That is a 2m-dimensional nonlinear system, solved by damped Newton in a
//! log-gap parametrization that keeps the interleaving a₁ < b₁ < a₂ < …
//! feasible by construction.

use crate::endpoint_maps::{IntervalKind, MappedSingularity};
use crate::error::{Error, Result};
use crate::transform::{boundary_image, slit_partial_fractions, TransformParams, Variant};

/// Endpoint decay exponents of the integrand, one layout per interval type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecaySpec {
    /// f = O((1−x)^p) at 1 and O((1+x)^q) at −1; p, q > −1.
    Finite { p: f64, q: f64 },
    /// f = O(x^r) at +∞ and O(|x|^s) at −∞; r, s < −1.
    RealLine { r: f64, s: f64 },
    /// f = O(x^r) at ∞ and O(x^q) at 0; r < −1, q > −1.
    HalfLineAlgebraic { r: f64, q: f64 },
    /// f decays like e^{−vx} at ∞ and O(x^q) at 0; v > 0, q > −1.
    HalfLineExpWeight { v: f64, q: f64 },
}

impl DecaySpec {
    /// Check the exponent ranges.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DecaySpec::Finite { p, q } => p > -1.0 && q > -1.0,
            DecaySpec::RealLine { r, s } => r < -1.0 && s < -1.0,
            DecaySpec::HalfLineAlgebraic { r, q } => r < -1.0 && q > -1.0,
            DecaySpec::HalfLineExpWeight { v, q } => v > 0.0 && q > -1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("decay exponents out of range: {self:?}")))
        }
    }

    /// The interval type this decay description belongs to.
    pub fn kind(&self) -> IntervalKind {
        match *self {
            DecaySpec::Finite { .. } => IntervalKind::Finite,
            DecaySpec::RealLine { .. } => IntervalKind::RealLine,
            DecaySpec::HalfLineAlgebraic { .. } => IntervalKind::HalfLineAlgebraic,
            DecaySpec::HalfLineExpWeight { v, .. } => IntervalKind::HalfLineExpWeight(v),
        }
    }
}

/// The fixed shift and the ratio β₂/C determined by the endpoint decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub t: f64,
    pub beta2_per_c: f64,
}

/// Balance the endpoint decay rates: the shift and the β₂/C factor.
pub fn choose_t(spec: &DecaySpec) -> Result<Calibration> {
    spec.validate()?;
    let (t, factor) = match *spec {
        DecaySpec::Finite { p, q } => (
            0.5 * ((1.0 + p) / (1.0 + q)).ln(),
            ((1.0 + p) * (1.0 + q)).sqrt(),
        ),
        DecaySpec::RealLine { r, s } => (
            0.5 * ((1.0 + r) / (1.0 + s)).ln(),
            0.5 * ((r + 1.0) * (s + 1.0)).sqrt(),
        ),
        DecaySpec::HalfLineAlgebraic { r, q } => (
            0.5 * (-(1.0 + r) / (1.0 + q)).ln(),
            0.5 * (-(1.0 + r) * (1.0 + q)).sqrt(),
        ),
        DecaySpec::HalfLineExpWeight { v, q } => (
            0.5 * (v / (1.0 + q)).ln(),
            0.5 * (v * (1.0 + q)).sqrt(),
        ),
    };
    Ok(Calibration {
        t,
        beta2_per_c: factor,
    })
}

/// β₂ of the plain DE map (π/2) sinh(t) on the same problem: (π/2) times the
/// binding endpoint factor.
pub fn de_beta2(spec: &DecaySpec) -> Result<f64> {
    spec.validate()?;
    let factor = match *spec {
        DecaySpec::Finite { p, q } => (1.0 + p).min(1.0 + q),
        DecaySpec::RealLine { r, s } => 0.5 * (-(1.0 + r)).min(-(1.0 + s)),
        DecaySpec::HalfLineAlgebraic { r, q } => 0.5 * (-(1.0 + r)).min(1.0 + q),
        DecaySpec::HalfLineExpWeight { v, q } => 0.5 * v.min(1.0 + q),
    };
    Ok(std::f64::consts::FRAC_PI_2 * factor)
}

/// Decode the solver vector: C = e^{x₁}, a₁ = x₂, then alternating log-gaps
/// b_j − a_j = e^{x_{2j+1}}, a_{j+1} − b_j = e^{x_{2j+2}}.
fn decode(x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let c = x[0].exp();
    let m = x.len() / 2;
    let mut pos = Vec::with_capacity(2 * m - 1);
    pos.push(x[1]);
    for g in &x[2..] {
        pos.push(pos.last().unwrap() + g.exp());
    }
    let a: Vec<f64> = pos.iter().step_by(2).copied().collect();
    let b: Vec<f64> = pos.iter().skip(1).step_by(2).copied().collect();
    (c, a, b)
}

/// The 2m residual rows: value conditions
/// C cosh(a_k − T) − Σ_j D_j log|tanh((a_k − b_j)/2)| − ε̃_k,
/// then slope conditions C sinh(a_k − T) − Σ_j D_j / sinh(a_k − b_j).
pub fn residual(x: &[f64], t: f64, d: &[f64], eps_t: &[f64]) -> Vec<f64> {
    let m = eps_t.len();
    let (c, a, b) = decode(x);
    let mut r = vec![0.0; 2 * m];
    for k in 0..m {
        let mut val = c * (a[k] - t).cosh() - eps_t[k];
        let mut slope = c * (a[k] - t).sinh();
        for j in 0..m - 1 {
            val -= d[j] * ((a[k] - b[j]) / 2.0).tanh().abs().ln();
            slope -= d[j] / (a[k] - b[j]).sinh();
        }
        r[k] = val;
        r[m + k] = slope;
    }
    r
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn norm2_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Gaussian elimination with partial pivoting; systems here are 2m ≤ ~20.
fn solve_linear(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = rhs[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

const TARGET: f64 = 1e-12;
const FALLBACK: f64 = 1e-10;
const MAX_ITERS: usize = 200;
const MAX_HALVINGS: usize = 30;

fn newton_from(x0: Vec<f64>, t: f64, d: &[f64], eps_t: &[f64]) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0;
    let mut r = residual(&x, t, d, eps_t);
    for _ in 0..MAX_ITERS {
        let norm = inf_norm(&r);
        if norm <= TARGET {
            break;
        }
        // Finite-difference Jacobian, column by column.
        let mut jac = vec![vec![0.0; n]; n];
        for i in 0..n {
            let h = 1e-6 * (1.0 + x[i].abs());
            let mut xp = x.clone();
            xp[i] += h;
            let rp = residual(&xp, t, d, eps_t);
            for row in 0..n {
                jac[row][i] = (rp[row] - r[row]) / h;
            }
        }
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let Some(step) = solve_linear(jac, neg_r) else {
            break;
        };
        // Backtracking line search on ½‖F‖².
        let phi0 = 0.5 * norm2_sq(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let xt: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + lambda * si).collect();
            let rt = residual(&xt, t, d, eps_t);
            if 0.5 * norm2_sq(&rt) < phi0 * (1.0 - 1e-4 * lambda) {
                x = xt;
                r = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let norm = inf_norm(&r);
    (x, norm)
}

/// Solve for the map parameters given the sorted strip-plane singularities
/// and the calibration. Step heights come directly from the plateau gaps;
/// C, a, b come from the damped Newton solve (analytic for one slit pair).
pub fn solve_params(mapped: &[MappedSingularity], cal: &Calibration) -> Result<TransformParams> {
    let m = mapped.len();
    if m == 0 {
        return Err(Error::EmptySet);
    }
    for w in mapped.windows(2) {
        if !(w[0].delta_t < w[1].delta_t) {
            return Err(Error::Domain(
                "mapped singularities must be sorted with distinct positions".into(),
            ));
        }
    }
    let d: Vec<f64> = mapped
        .windows(2)
        .map(|w| (w[1].delta_t - w[0].delta_t) / std::f64::consts::PI)
        .collect();
    let d0 = mapped[0].delta_t;
    let eps_t: Vec<f64> = mapped.iter().map(|s| s.eps_t).collect();

    if m == 1 {
        return Ok(TransformParams {
            m: 1,
            c: eps_t[0],
            t: cal.t,
            a: vec![cal.t],
            b: vec![],
            d,
            d0,
            variant: Variant::Exact,
        });
    }

    let min_eps = eps_t.iter().fold(f64::INFINITY, |acc, e| acc.min(*e));
    let start = |c_scale: f64, gap_scale: f64| -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * m);
        x.push((0.5 * min_eps * c_scale).ln());
        x.push(cal.t + (1.0 - (m as f64 + 1.0) / 2.0) - (gap_scale - 1.0) * (m as f64 - 1.0) / 2.0);
        for _ in 0..2 * (m - 1) {
            x.push((0.5 * gap_scale).ln());
        }
        x
    };
    let attempts: [(f64, f64); 9] = [
        (1.0, 1.0),
        (1.0, 0.5),
        (1.0, 2.0),
        (0.25, 1.0),
        (4.0, 1.0),
        (0.25, 0.5),
        (0.25, 2.0),
        (4.0, 0.5),
        (4.0, 2.0),
    ];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (c_scale, gap_scale) in attempts {
        let (x, norm) = newton_from(start(c_scale, gap_scale), cal.t, &d, &eps_t);
        if best.as_ref().map_or(true, |(_, bn)| norm < *bn) {
            best = Some((x, norm));
        }
        if norm <= TARGET {
            break;
        }
    }
    let (x, norm) = best.unwrap();
    if norm > FALLBACK {
        return Err(Error::Convergence {
            best_residual: norm,
        });
    }
    let (c, a, b) = decode(&x);
    Ok(TransformParams {
        m,
        c,
        t: cal.t,
        a,
        b,
        d,
        d0,
        variant: Variant::Exact,
    })
}

/// Post-solve defect report; thresholds are the caller's business.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// |Σa − Σb − T|, exactly zero at the true root.
    pub telescoping: f64,
    /// |Im H(a_k + iπ/2) − ε̃_k| per slit tip.
    pub boundary: Vec<f64>,
    /// |C·L_j − 2 D_j| per slit term, from the partial-fraction identity.
    pub slit: Vec<f64>,
}

/// Check the three identities every converged solve must satisfy.
pub fn validate_params(
    p: &TransformParams,
    cal: &Calibration,
    mapped: &[MappedSingularity],
) -> Result<ValidationReport> {
    let telescoping =
        (p.a.iter().sum::<f64>() - p.b.iter().sum::<f64>() - cal.t).abs();
    let mut boundary = Vec::with_capacity(p.m);
    for (ak, s) in p.a.iter().zip(mapped) {
        let (_, im) = boundary_image(p, *ak)?;
        boundary.push((im - s.eps_t).abs());
    }
    let (_, l) = slit_partial_fractions(&p.a, &p.b)?;
    let slit = l
        .iter()
        .zip(&p.d)
        .map(|(lj, dj)| (p.c * lj - 2.0 * dj).abs())
        .collect();
    Ok(ValidationReport {
        telescoping,
        boundary,
        slit,
    })
}

/// The decay coefficient β₂ of the solved map.
pub fn beta2(p: &TransformParams, cal: &Calibration) -> f64 {
    p.c * cal.beta2_per_c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endpoint_maps::{collect_singularities, IntervalKind, Singularity};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn choose_t_examples() {
        let c = choose_t(&DecaySpec::Finite { p: 0.0, q: -0.5 }).unwrap();
        assert!((c.t - 0.5 * 2.0f64.ln()).abs() < 1e-15);
        assert!((c.beta2_per_c - 0.5f64.sqrt()).abs() < 1e-15);

        let c = choose_t(&DecaySpec::HalfLineExpWeight { v: 0.2, q: -0.5 }).unwrap();
        assert!((c.t - -0.45814536593707755).abs() < 1e-15);
        assert!((c.beta2_per_c - 0.5 * 0.1f64.sqrt()).abs() < 1e-15);

        let c = choose_t(&DecaySpec::RealLine { r: -3.0, s: -3.0 }).unwrap();
        assert_eq!(c.t, 0.0);
        assert_eq!(c.beta2_per_c, 1.0);

        let c = choose_t(&DecaySpec::Finite { p: 0.3, q: 0.3 }).unwrap();
        assert_eq!(c.t, 0.0);
    }

    #[test]
    fn choose_t_rejects_bad_exponents() {
        assert!(choose_t(&DecaySpec::Finite { p: -1.0, q: 0.0 }).is_err());
        assert!(choose_t(&DecaySpec::RealLine { r: -0.5, s: -3.0 }).is_err());
        assert!(choose_t(&DecaySpec::HalfLineExpWeight { v: 0.0, q: 0.0 }).is_err());
    }

    #[test]
    fn de_beta2_matches_known_tables() {
        let b = de_beta2(&DecaySpec::Finite { p: 0.0, q: -0.5 }).unwrap();
        assert!((b - FRAC_PI_2 * 0.5).abs() < 1e-15); // 0.785
        let b = de_beta2(&DecaySpec::RealLine { r: -3.0, s: -3.0 }).unwrap();
        assert!((b - FRAC_PI_2).abs() < 1e-15); // 1.571
        let b = de_beta2(&DecaySpec::HalfLineAlgebraic { r: -3.5, q: -0.5 }).unwrap();
        assert!((b - FRAC_PI_2 * 0.25).abs() < 1e-15); // 0.393
        let b = de_beta2(&DecaySpec::HalfLineExpWeight { v: 0.2, q: -0.5 }).unwrap();
        assert!((b - FRAC_PI_2 * 0.1).abs() < 1e-15); // 0.157
    }

    #[test]
    fn residual_de_case() {
        let x = [FRAC_PI_2.ln(), 0.0];
        let r = residual(&x, 0.0, &[], &[FRAC_PI_2]);
        assert!(r.iter().all(|v| v.abs() < 1e-15));
        let r = residual(&[0.0, 0.0], 0.0, &[], &[FRAC_PI_2]);
        assert!((r[0] - (1.0 - FRAC_PI_2)).abs() < 1e-15);
        assert_eq!(r[1], 0.0);
    }

    #[test]
    fn solve_m1_is_analytic_de() {
        let mapped = [MappedSingularity {
            delta_t: 0.0,
            eps_t: FRAC_PI_2,
        }];
        let cal = Calibration {
            t: 0.0,
            beta2_per_c: 1.0,
        };
        let p = solve_params(&mapped, &cal).unwrap();
        assert_eq!(p.c, FRAC_PI_2);
        assert_eq!(p.a, vec![0.0]);
    }

    #[test]
    fn solve_symmetric_pair() {
        let mapped = [
            MappedSingularity {
                delta_t: -1.0,
                eps_t: 1.0,
            },
            MappedSingularity {
                delta_t: 1.0,
                eps_t: 1.0,
            },
        ];
        let cal = Calibration {
            t: 0.0,
            beta2_per_c: 1.0,
        };
        let p = solve_params(&mapped, &cal).unwrap();
        assert!(p.b[0].abs() < 1e-10, "b1 = {}", p.b[0]);
        assert!((p.a[1] + p.a[0]).abs() < 1e-10);
    }

    #[test]
    fn solve_three_slit_finite_interval() {
        // The finite-interval benchmark configuration; amplitude should come
        // out near 0.3557 and the mouths near −0.190 and −0.177.
        let sings = [
            Singularity::new(-0.5, 1.0).unwrap(),
            Singularity::new(0.5, 0.5).unwrap(),
        ];
        let mapped = collect_singularities(IntervalKind::Finite, &sings).unwrap();
        let cal = choose_t(&DecaySpec::Finite { p: 0.0, q: -0.5 }).unwrap();
        let p = solve_params(&mapped, &cal).unwrap();
        assert!((p.c - 0.356).abs() / 0.356 < 0.05, "C = {}", p.c);
        assert!((p.c - 0.35572102804695876).abs() < 1e-8);
        assert!((p.b[0] - -0.18999692784335337).abs() < 1e-7);
        assert!((p.b[1] - -0.17705530638872180).abs() < 1e-7);
        // Residual at the root.
        let x = {
            let mut x = vec![p.c.ln(), p.a[0]];
            let pos = [p.a[0], p.b[0], p.a[1], p.b[1], p.a[2]];
            for w in pos.windows(2) {
                x.push((w[1] - w[0]).ln());
            }
            x
        };
        let eps_t: Vec<f64> = mapped.iter().map(|s| s.eps_t).collect();
        let r = residual(&x, cal.t, &p.d, &eps_t);
        assert!(r.iter().all(|v| v.abs() <= 1e-10));
        // And the full defect report.
        let rep = validate_params(&p, &cal, &mapped).unwrap();
        assert!(rep.telescoping <= 1e-8);
        assert!(rep.boundary.iter().all(|d| *d <= 1e-8));
        for (defect, dj) in rep.slit.iter().zip(&p.d) {
            assert!(*defect <= 1e-6 * 2.0 * dj);
        }
        assert!((beta2(&p, &cal) - 0.252).abs() / 0.252 < 0.05);
    }

    #[test]
    fn validate_de_params_is_exact() {
        let p = crate::transform::de_params();
        let cal = Calibration {
            t: 0.0,
            beta2_per_c: 1.0,
        };
        let mapped = [MappedSingularity {
            delta_t: 0.0,
            eps_t: FRAC_PI_2,
        }];
        let rep = validate_params(&p, &cal, &mapped).unwrap();
        assert_eq!(rep.telescoping, 0.0);
        assert!(rep.boundary.iter().all(|d| *d == 0.0));
        assert!(rep.slit.is_empty());
    }

    #[test]
    fn shift_equivariance_of_plateau() {
        // Shifting every δ̃ by Δ must change only D0: C, a, b, D are driven by
        // the gaps and heights alone.
        let base = [
            MappedSingularity {
                delta_t: -0.3,
                eps_t: 0.9,
            },
            MappedSingularity {
                delta_t: 0.4,
                eps_t: 1.2,
            },
        ];
        let shifted: Vec<MappedSingularity> = base
            .iter()
            .map(|s| MappedSingularity {
                delta_t: s.delta_t + 5.0,
                eps_t: s.eps_t,
            })
            .collect();
        let cal = Calibration {
            t: 0.2,
            beta2_per_c: 1.0,
        };
        let p = solve_params(&base, &cal).unwrap();
        let q = solve_params(&shifted, &cal).unwrap();
        // Newton iterates differ by rounding between the two runs, so the
        // roots agree to solver accuracy rather than bit for bit.
        assert!((p.c - q.c).abs() < 1e-10);
        for (x, y) in p.a.iter().zip(&q.a) {
            assert!((x - y).abs() < 1e-10);
        }
        for (x, y) in p.b.iter().zip(&q.b) {
            assert!((x - y).abs() < 1e-10);
        }
        for (x, y) in p.d.iter().zip(&q.d) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!((q.d0 - p.d0 - 5.0).abs() < 1e-10);
    }

    #[test]
    fn jacobian_columns_match_directional_differences() {
        let d = [0.3, 0.5];
        let eps_t = [1.0, 0.8, 1.3];
        let t = 0.1;
        let x = [0.2f64.ln(), -1.0, 0.4f64.ln(), 0.7f64.ln(), 0.5f64.ln(), 0.6f64.ln()];
        let r0 = residual(&x, t, &d, &eps_t);
        for i in 0..x.len() {
            let h = 1e-6 * (1.0 + x[i].abs());
            let mut xp = x;
            xp[i] += h;
            let col: Vec<f64> = residual(&xp, t, &d, &eps_t)
                .iter()
                .zip(&r0)
                .map(|(a, b)| (a - b) / h)
                .collect();
            // Directional oracle: central difference with a smaller step.
            let hs = h / 16.0;
            let mut xa = x;
            xa[i] += hs;
            let mut xb = x;
            xb[i] -= hs;
            let oracle: Vec<f64> = residual(&xa, t, &d, &eps_t)
                .iter()
                .zip(residual(&xb, t, &d, &eps_t).iter())
                .map(|(a, b)| (a - b) / (2.0 * hs))
                .collect();
            for (c, o) in col.iter().zip(&oracle) {
                assert!((c - o).abs() <= 1e-4 * o.abs().max(1.0));
            }
        }
    }
}
