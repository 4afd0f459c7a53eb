//! Independent high-accuracy reference values.
//!
//! Globally adaptive bisection with an embedded 15-point Kronrod / 7-point
//! Gauss pair. The interval is pre-split at each singularity's real part,
//! endpoint algebraic singularities are removed by explicit substitutions,
//! and infinite tails are folded by x = 1/u. No double-exponential map is
//! used anywhere here, so agreement with the quadrature engine is evidence,
//! not circularity.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::endpoint_maps::{IntervalKind, Sample};
use crate::error::{Error, Result};
use crate::problems::Problem;

/// 15-point Kronrod abscissae on [0, 1] of |x| (symmetric pairs).
const XK: [f64; 8] = [
    0.000000000000000000,
    0.207784955007898468,
    0.405845151377397167,
    0.586087235467691130,
    0.741531185599394440,
    0.864864423359769073,
    0.949107912342758525,
    0.991455371120812639,
];
/// Kronrod weights matching `XK`.
const WK: [f64; 8] = [
    0.209482141084727828,
    0.204432940075298892,
    0.190350578064785410,
    0.169004726639267903,
    0.140653259715525919,
    0.104790010322250184,
    0.063092092629978553,
    0.022935322010529225,
];
/// Embedded 7-point Gauss weights; they attach to XK[0], XK[2], XK[4], XK[6].
const WG: [f64; 4] = [
    0.417959183673469388,
    0.381830050505118945,
    0.279705391489276668,
    0.129484966168869693,
];

/// A smooth integrand segment in an already substituted variable.
struct Segment<'a> {
    lo: f64,
    hi: f64,
    f: Box<dyn Fn(f64) -> f64 + 'a>,
}

/// One adaptive panel with its embedded error estimate.
struct Panel {
    lo: f64,
    hi: f64,
    segment: usize,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f0 = f(mid);
    let mut kronrod = WK[0] * f0;
    let mut gauss = WG[0] * f0;
    for i in 1..8 {
        let dx = half * XK[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += WK[i] * pair;
        if i % 2 == 0 {
            gauss += WG[i / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    // The usual sharpened estimate: the raw difference overstates smooth
    // panels and understates rough ones; (200·Δ)^{1.5} balances both.
    let scaled = (200.0 * err).powf(1.5).min(err.max(1e-300));
    (value, if err < 1e-300 { err } else { scaled })
}

const MAX_PANELS: usize = 1_000_000;

/// Split positions strictly inside (lo, hi), sorted and deduplicated.
fn interior_splits(problem: &Problem, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = problem
        .singularities
        .iter()
        .map(|s| s.delta)
        .filter(|d| *d > lo && *d < hi)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn segments_for(problem: &Problem) -> Vec<Segment<'_>> {
    let kind = problem.kind;
    let mut segs: Vec<Segment> = Vec::new();
    match kind {
        IntervalKind::Finite => {
            let splits = interior_splits(problem, -1.0, 1.0);
            let first = splits.first().copied().unwrap_or(0.0);
            let last = splits.last().copied().unwrap_or(0.0);
            // Left endpoint: x = −1 + u², so dist_lo = u² exactly.
            segs.push(Segment {
                lo: 0.0,
                hi: (first + 1.0).sqrt(),
                f: Box::new(move |u| {
                    let s = Sample {
                        x: -1.0 + u * u,
                        dist_lo: u * u,
                        dist_hi: 2.0 - u * u,
                    };
                    problem.eval(&s) * 2.0 * u
                }),
            });
            for w in splits.windows(2) {
                let (a, b) = (w[0], w[1]);
                segs.push(Segment {
                    lo: a,
                    hi: b,
                    f: Box::new(move |x| problem.eval(&Sample::from_x(kind, x))),
                });
            }
            // Right endpoint: x = 1 − u², dist_hi = u² exactly.
            segs.push(Segment {
                lo: 0.0,
                hi: (1.0 - last).sqrt(),
                f: Box::new(move |u| {
                    let s = Sample {
                        x: 1.0 - u * u,
                        dist_lo: 2.0 - u * u,
                        dist_hi: u * u,
                    };
                    problem.eval(&s) * 2.0 * u
                }),
            });
        }
        IntervalKind::RealLine => {
            let mut splits = interior_splits(problem, f64::NEG_INFINITY, f64::INFINITY);
            if splits.is_empty() {
                splits.push(0.0);
            }
            let left = (2.0 * splits.first().unwrap()).min(-10.0);
            let right = (2.0 * splits.last().unwrap()).max(10.0);
            // Left tail: x = 1/u, u ∈ [1/left, 0).
            segs.push(Segment {
                lo: 1.0 / left,
                hi: 0.0,
                f: Box::new(move |u| {
                    let x = 1.0 / u;
                    problem.eval(&Sample::from_x(kind, x)) / (u * u)
                }),
            });
            let mut cuts = vec![left];
            cuts.extend(&splits);
            cuts.push(right);
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                segs.push(Segment {
                    lo: a,
                    hi: b,
                    f: Box::new(move |x| problem.eval(&Sample::from_x(kind, x))),
                });
            }
            // Right tail: x = 1/u, u ∈ (0, 1/right].
            segs.push(Segment {
                lo: 0.0,
                hi: 1.0 / right,
                f: Box::new(move |u| {
                    let x = 1.0 / u;
                    problem.eval(&Sample::from_x(kind, x)) / (u * u)
                }),
            });
        }
        IntervalKind::HalfLineAlgebraic | IntervalKind::HalfLineExpWeight(_) => {
            let splits = interior_splits(problem, 0.0, f64::INFINITY);
            let first = splits.first().copied().unwrap_or(1.0);
            let right = splits.last().map_or(10.0, |l| (2.0 * l).max(10.0));
            // Origin: x = u², so dist_lo = u² exactly (handles x^q, q > −1).
            segs.push(Segment {
                lo: 0.0,
                hi: first.sqrt(),
                f: Box::new(move |u| {
                    let x = u * u;
                    let s = Sample {
                        x,
                        dist_lo: x,
                        dist_hi: f64::INFINITY,
                    };
                    problem.eval(&s) * 2.0 * u
                }),
            });
            let mut cuts: Vec<f64> = splits.clone();
            if cuts.is_empty() {
                cuts.push(first);
            }
            cuts.push(right);
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                segs.push(Segment {
                    lo: a,
                    hi: b,
                    f: Box::new(move |x| problem.eval(&Sample::from_x(kind, x))),
                });
            }
            // Tail: x = 1/u.
            segs.push(Segment {
                lo: 0.0,
                hi: 1.0 / right,
                f: Box::new(move |u| {
                    let x = 1.0 / u;
                    problem.eval(&Sample::from_x(kind, x)) / (u * u)
                }),
            });
        }
    }
    segs.retain(|s| s.hi > s.lo);
    segs
}

/// Integrate a problem to the requested absolute tolerance.
pub fn reference_integrate(problem: &Problem, tol: f64) -> Result<f64> {
    if !(tol >= 1e-10) {
        return Err(Error::Domain(format!(
            "oracle tolerance must be at least 1e-10, got {tol}"
        )));
    }
    let segs = segments_for(problem);
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut total_err = 0.0f64;
    for (i, seg) in segs.iter().enumerate() {
        let (v, e) = gk15(&seg.f, seg.lo, seg.hi);
        total_err += e;
        heap.push(Panel {
            lo: seg.lo,
            hi: seg.hi,
            segment: i,
            value: v,
            error: e,
        });
    }
    let mut panels = segs.len();
    while total_err > tol && panels < MAX_PANELS {
        let worst = heap.pop().expect("heap cannot be empty while error > 0");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel narrower than machine spacing; its estimate is final.
            total_err -= worst.error;
            continue;
        }
        let seg = &segs[worst.segment];
        let (v1, e1) = gk15(&seg.f, worst.lo, mid);
        let (v2, e2) = gk15(&seg.f, mid, worst.hi);
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            segment: worst.segment,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            segment: worst.segment,
            value: v2,
            error: e2,
        });
        panels += 1;
    }
    // Re-accumulate from the heap for a deterministic merge independent of
    // the bisection order.
    let final_panels = heap.into_sorted_vec();
    let value: f64 = final_panels.iter().map(|p| p.value).sum();
    let error: f64 = final_panels.iter().map(|p| p.error).sum();
    if error > tol {
        return Err(Error::NoConvergence {
            estimate: value,
            error_bound: error,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::DecaySpec;
    use crate::problems::{builtin, BuiltinId, Kernel};

    #[test]
    fn constant_on_finite_interval() {
        let prob = Problem {
            name: "constant".into(),
            kind: IntervalKind::Finite,
            kernel: Kernel::Unit,
            singularities: vec![],
            decay: DecaySpec::Finite { p: 0.0, q: 0.0 },
            reference: None,
        };
        let v = reference_integrate(&prob, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_half() {
        let prob = Problem {
            name: "gamma(1/2)".into(),
            kind: IntervalKind::HalfLineExpWeight(1.0),
            kernel: Kernel::GammaHalf,
            singularities: vec![],
            decay: DecaySpec::HalfLineExpWeight { v: 1.0, q: -0.5 },
            reference: None,
        };
        let v = reference_integrate(&prob, 1e-10).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn finite_benchmark_to_printed_digits() {
        let v = reference_integrate(&builtin(BuiltinId::P51), 1e-8).unwrap();
        assert!((v - -2.04645).abs() < 1e-5);
        assert!((v - -2.0464508116069475).abs() < 1e-7);
    }

    #[test]
    fn whole_line_benchmark_to_printed_digits() {
        let v = reference_integrate(&builtin(BuiltinId::P52), 1e-8).unwrap();
        assert!((v - 15.0136).abs() < 5e-4);
        assert!((v - 15.013361987606277).abs() < 1e-6);
    }

    #[test]
    fn rejects_too_tight_tolerance() {
        let prob = builtin(BuiltinId::P51);
        assert!(reference_integrate(&prob, 1e-11).is_err());
    }

    #[test]
    fn halving_tolerance_is_stable() {
        let prob = builtin(BuiltinId::P51);
        let loose = reference_integrate(&prob, 2e-7).unwrap();
        let tight = reference_integrate(&prob, 1e-7).unwrap();
        assert!((loose - tight).abs() <= 2e-7);
    }
}
