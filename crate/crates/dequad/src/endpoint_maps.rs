//! The four interval maps ψ of the DE family, their derivatives, singularity
//! preimages, and intrinsic singularities.
//!
//! Every integration interval is reached from the strip plane through one of
//! four outer maps: tanh for (−1, 1), sinh for the real line, exp for (0, ∞)
//! with algebraic decay, and log(exp(·)+1) for (0, ∞) with an exponential
//! weight. Integrand singularities δ ± εi are pulled back through the inverse
//! map to strip-plane representatives (δ̃, ε̃) with ε̃ ∈ (0, π].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which of the four interval maps applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalKind {
    /// (−1, 1), ψ = tanh.
    Finite,
    /// (−∞, ∞), ψ = sinh.
    RealLine,
    /// (0, ∞) with algebraic decay at infinity, ψ = exp.
    HalfLineAlgebraic,
    /// (0, ∞) with weight e^{−vx}, ψ = log(exp(·)+1). Carries the rate v > 0.
    HalfLineExpWeight(f64),
}

/// One conjugate pair δ ± εi of integrand singularities, given by the
/// representative in the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub delta: f64,
    pub eps: f64,
}

impl Singularity {
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Validation(format!(
                "singularity at {delta} has non-positive imaginary part {eps}"
            )));
        }
        Ok(Self { delta, eps })
    }
}

/// A singularity's strip-plane representative (δ̃, ε̃) with ε̃ ∈ (0, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedSingularity {
    pub delta_t: f64,
    pub eps_t: f64,
}

/// ψ evaluated at a real point.
pub fn psi_eval(kind: IntervalKind, w: f64) -> f64 {
    match kind {
        IntervalKind::Finite => w.tanh(),
        IntervalKind::RealLine => w.sinh(),
        IntervalKind::HalfLineAlgebraic => w.exp(),
        IntervalKind::HalfLineExpWeight(_) => {
            // log(e^w + 1), kept accurate on both ends.
            if w > 0.0 {
                w + (-w).exp().ln_1p()
            } else {
                w.exp().ln_1p()
            }
        }
    }
}

/// ψ′ evaluated at a real point. Always finite and non-negative; the Finite
/// variant underflows to exactly 0 for |w| ≳ 372.
pub fn psi_deriv(kind: IntervalKind, w: f64) -> f64 {
    match kind {
        IntervalKind::Finite => {
            let c = w.cosh();
            1.0 / (c * c)
        }
        IntervalKind::RealLine => w.cosh(),
        IntervalKind::HalfLineAlgebraic => w.exp(),
        IntervalKind::HalfLineExpWeight(_) => {
            // e^w / (e^w + 1) = 1 / (1 + e^{−w})
            if w > 0.0 {
                1.0 / (1.0 + (-w).exp())
            } else {
                let e = w.exp();
                e / (e + 1.0)
            }
        }
    }
}

/// Principal-branch preimage of an upper-half-plane point under ψ.
pub fn psi_preimage(kind: IntervalKind, s: Complex64) -> Result<MappedSingularity> {
    if !(s.im > 0.0) {
        return Err(Error::Domain(format!(
            "singularity {s} must have positive imaginary part"
        )));
    }
    let z = match kind {
        IntervalKind::Finite => (((1.0 + s) / (1.0 - s)).ln()) * 0.5,
        IntervalKind::RealLine => (s + (s * s + 1.0).sqrt()).ln(),
        IntervalKind::HalfLineAlgebraic => s.ln(),
        IntervalKind::HalfLineExpWeight(_) => (s.exp() - 1.0).ln(),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("{s} is outside the range of the map")));
    }
    if !(z.im > 0.0 && z.im <= std::f64::consts::PI) {
        return Err(Error::Domain(format!(
            "preimage of {s} has imaginary part {} outside (0, π]",
            z.im
        )));
    }
    Ok(MappedSingularity {
        delta_t: z.re,
        eps_t: z.im,
    })
}

/// The map's own singularities, one representative per 2π-period.
pub fn psi_fixed_singularities(kind: IntervalKind) -> Vec<MappedSingularity> {
    match kind {
        IntervalKind::Finite => vec![MappedSingularity {
            delta_t: 0.0,
            eps_t: std::f64::consts::FRAC_PI_2,
        }],
        IntervalKind::RealLine | IntervalKind::HalfLineAlgebraic => vec![],
        IntervalKind::HalfLineExpWeight(_) => vec![MappedSingularity {
            delta_t: 0.0,
            eps_t: std::f64::consts::PI,
        }],
    }
}

/// Tolerance under which two preimages count as one slit.
const DEDUP_TOL: f64 = 1e-9;

/// Pull all integrand singularities back to the strip, merge with the map's
/// own singularities, and sort. Coincident positions (|Δδ̃| < 1e−9) keep only
/// the smallest ε̃, which is the binding constraint on the map.
pub fn collect_singularities(
    kind: IntervalKind,
    sings: &[Singularity],
) -> Result<Vec<MappedSingularity>> {
    let mut out = psi_fixed_singularities(kind);
    for s in sings {
        out.push(psi_preimage(kind, Complex64::new(s.delta, s.eps))?);
    }
    if out.is_empty() {
        return Err(Error::EmptySet);
    }
    out.sort_by(|p, q| p.delta_t.total_cmp(&q.delta_t));
    let mut merged: Vec<MappedSingularity> = Vec::with_capacity(out.len());
    for s in out {
        match merged.last_mut() {
            Some(last) if (s.delta_t - last.delta_t).abs() < DEDUP_TOL => {
                if s.eps_t < last.eps_t {
                    *last = s;
                }
            }
            _ => merged.push(s),
        }
    }
    Ok(merged)
}

/// One quadrature abscissa in the integration variable, with numerically
/// stable distances to the interval endpoints. Near x = ±1 the naive 1 ∓ x
/// loses every significant digit; kernels with endpoint singularities must
/// use these fields instead.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub x: f64,
    /// Distance to the lower endpoint (1+x on (−1,1), x on (0,∞), ∞ on ℝ).
    pub dist_lo: f64,
    /// Distance to the upper endpoint (1−x on (−1,1), ∞ otherwise).
    pub dist_hi: f64,
}

impl Sample {
    /// Build a sample from a plain interior point (used by the reference
    /// integrator away from endpoints; loses no precision there).
    pub fn from_x(kind: IntervalKind, x: f64) -> Self {
        match kind {
            IntervalKind::Finite => Sample {
                x,
                dist_lo: 1.0 + x,
                dist_hi: 1.0 - x,
            },
            IntervalKind::RealLine => Sample {
                x,
                dist_lo: f64::INFINITY,
                dist_hi: f64::INFINITY,
            },
            IntervalKind::HalfLineAlgebraic | IntervalKind::HalfLineExpWeight(_) => Sample {
                x,
                dist_lo: x,
                dist_hi: f64::INFINITY,
            },
        }
    }
}

/// Map a strip-plane abscissa w to the integration variable, returning the
/// sample and ψ′(w). `None` marks a tail node that contributes nothing: ψ′
/// has underflowed, or |ψ(w)| would overflow while the integrand is already
/// far below round-off.
pub fn psi_sample(kind: IntervalKind, w: f64) -> Option<(Sample, f64)> {
    match kind {
        IntervalKind::Finite => {
            let deriv = psi_deriv(kind, w);
            if deriv == 0.0 {
                return None;
            }
            let x = w.tanh();
            // 1 ∓ tanh(w) without cancellation: 2e^{∓2w}/(1+e^{∓2w}).
            let (dist_lo, dist_hi) = if w >= 0.0 {
                let e = (-2.0 * w).exp();
                (2.0 / (1.0 + e), 2.0 * e / (1.0 + e))
            } else {
                let e = (2.0 * w).exp();
                (2.0 * e / (1.0 + e), 2.0 / (1.0 + e))
            };
            Some((Sample { x, dist_lo, dist_hi }, deriv))
        }
        IntervalKind::RealLine => {
            // Beyond |w| = 600, x² already overflows in typical kernels while
            // the transformed integrand is below 1e−300.
            if w.abs() > 600.0 {
                return None;
            }
            Some((Sample::from_x(kind, w.sinh()), w.cosh()))
        }
        IntervalKind::HalfLineAlgebraic => {
            if w > 600.0 {
                return None;
            }
            let x = w.exp();
            if x == 0.0 {
                return None;
            }
            Some((
                Sample {
                    x,
                    dist_lo: x,
                    dist_hi: f64::INFINITY,
                },
                x,
            ))
        }
        IntervalKind::HalfLineExpWeight(_) => {
            let deriv = psi_deriv(kind, w);
            if deriv == 0.0 {
                return None;
            }
            let x = psi_eval(kind, w);
            Some((
                Sample {
                    x,
                    dist_lo: x,
                    dist_hi: f64::INFINITY,
                },
                deriv,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn psi_eval_basics() {
        assert_eq!(psi_eval(IntervalKind::Finite, 0.0), 0.0);
        assert_eq!(psi_eval(IntervalKind::HalfLineAlgebraic, 0.0), 1.0);
        let v = psi_eval(IntervalKind::HalfLineExpWeight(0.2), 30.0);
        // 30 + log(1 + e^{−30}); the correction is ~9.36e−14.
        assert!((v - (30.0 + (-30.0f64).exp().ln_1p())).abs() < 1e-15);
        assert!(v > 30.0 && v < 30.0 + 1e-12);
    }

    #[test]
    fn psi_deriv_basics() {
        assert_eq!(psi_deriv(IntervalKind::Finite, 0.0), 1.0);
        assert_eq!(psi_deriv(IntervalKind::RealLine, 0.0), 1.0);
        assert_eq!(psi_deriv(IntervalKind::HalfLineExpWeight(0.2), 0.0), 0.5);
    }

    #[test]
    fn psi_deriv_matches_finite_differences() {
        let kinds = [
            IntervalKind::Finite,
            IntervalKind::RealLine,
            IntervalKind::HalfLineAlgebraic,
            IntervalKind::HalfLineExpWeight(0.7),
        ];
        for kind in kinds {
            for i in 0..=200 {
                let w = -10.0 + 0.1 * i as f64;
                let h = 1e-6 * (1.0 + w.abs());
                let fd = (psi_eval(kind, w + h) - psi_eval(kind, w - h)) / (2.0 * h);
                let d = psi_deriv(kind, w);
                // The absolute slack covers cancellation when ψ is flat
                // (e.g. tanh near saturation, where ψ′ underflows long
                // before ψ stops rounding to ±1).
                assert!(
                    (fd - d).abs() <= 1e-6 * d.abs().max(1e-300) + 1e-9,
                    "{kind:?} at w={w}: fd={fd} deriv={d}"
                );
            }
        }
    }

    #[test]
    fn preimage_finite() {
        let m = psi_preimage(IntervalKind::Finite, Complex64::new(-0.5, 0.5)).unwrap();
        assert!((m.delta_t - -0.40235947810852507).abs() < 1e-15);
        assert!((m.eps_t - 0.55357435889704520).abs() < 1e-15);
    }

    #[test]
    fn preimage_real_line() {
        let m = psi_preimage(IntervalKind::RealLine, Complex64::new(-2.0, 1.0)).unwrap();
        assert!((m.delta_t - -1.52857091948099820).abs() < 1e-14);
        assert!((m.eps_t - 0.42707858639247610).abs() < 1e-14);
        // sinh of the result must return the input.
        let z = Complex64::new(m.delta_t, m.eps_t).sinh();
        assert!((z - Complex64::new(-2.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn preimage_half_line() {
        let m = psi_preimage(IntervalKind::HalfLineAlgebraic, Complex64::new(0.3, 0.2)).unwrap();
        assert!((m.delta_t - -1.02011041426327730).abs() < 1e-14);
        assert!((m.eps_t - 0.58800260354756760).abs() < 1e-14);
    }

    #[test]
    fn preimage_rejects_lower_half_plane() {
        assert!(psi_preimage(IntervalKind::Finite, Complex64::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn fixed_singularities() {
        let f = psi_fixed_singularities(IntervalKind::Finite);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].delta_t, 0.0);
        assert_eq!(f[0].eps_t, FRAC_PI_2);
        assert!(psi_fixed_singularities(IntervalKind::RealLine).is_empty());
        assert!(psi_fixed_singularities(IntervalKind::HalfLineAlgebraic).is_empty());
        let e = psi_fixed_singularities(IntervalKind::HalfLineExpWeight(0.2));
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].eps_t, PI);
    }

    #[test]
    fn collect_orders_and_merges() {
        let sings = [
            Singularity::new(-0.5, 1.0).unwrap(),
            Singularity::new(0.5, 0.5).unwrap(),
        ];
        let m = collect_singularities(IntervalKind::Finite, &sings).unwrap();
        assert_eq!(m.len(), 3);
        assert!((m[0].delta_t - -0.23887786125685911).abs() < 1e-14);
        assert!((m[0].eps_t - 0.84757566067082901).abs() < 1e-14);
        assert_eq!(m[1].delta_t, 0.0);
        assert_eq!(m[1].eps_t, FRAC_PI_2);
        assert!((m[2].delta_t - 0.40235947810852507).abs() < 1e-14);
        assert!((m[2].eps_t - 0.55357435889704520).abs() < 1e-14);
        for w in m.windows(2) {
            assert!(w[0].delta_t < w[1].delta_t);
        }
    }

    #[test]
    fn collect_empty_input_keeps_psi_pole() {
        let m = collect_singularities(IntervalKind::Finite, &[]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].eps_t, FRAC_PI_2);
        assert!(collect_singularities(IntervalKind::RealLine, &[]).is_err());
    }

    #[test]
    fn collect_dedup_keeps_binding_constraint() {
        // Two singularities over the same δ̃ = 0: asinh(i) = iπ/2 and a lower one.
        let sings = [
            Singularity::new(0.0, 1.0).unwrap(),
            Singularity::new(0.0, 0.5).unwrap(),
        ];
        let m = collect_singularities(IntervalKind::RealLine, &sings).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m[0].eps_t < FRAC_PI_2);
    }

    #[test]
    fn sinh_of_i_maps_to_pi_over_2() {
        let m = collect_singularities(
            IntervalKind::RealLine,
            &[Singularity::new(0.0, 1.0).unwrap()],
        )
        .unwrap();
        assert_eq!(m.len(), 1);
        assert!(m[0].delta_t.abs() < 1e-15);
        assert!((m[0].eps_t - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn stable_endpoint_distances() {
        // At w = 20, 1 − tanh(w) ≈ 8.2e−18: the naive form returns 0.
        let (s, _) = psi_sample(IntervalKind::Finite, 20.0).unwrap();
        assert!(s.dist_hi > 0.0 && s.dist_hi < 1e-16);
        let expected = 2.0 * (-40.0f64).exp();
        assert!((s.dist_hi - expected).abs() < 1e-3 * expected);
        // Symmetry.
        let (sm, _) = psi_sample(IntervalKind::Finite, -20.0).unwrap();
        assert_eq!(sm.dist_lo, s.dist_hi);
    }

    #[test]
    fn tail_skips() {
        assert!(psi_sample(IntervalKind::Finite, 400.0).is_none());
        assert!(psi_sample(IntervalKind::RealLine, 601.0).is_none());
        assert!(psi_sample(IntervalKind::HalfLineAlgebraic, 601.0).is_none());
        assert!(psi_sample(IntervalKind::HalfLineAlgebraic, -800.0).is_none());
        assert!(psi_sample(IntervalKind::HalfLineExpWeight(0.2), -800.0).is_none());
    }
}
