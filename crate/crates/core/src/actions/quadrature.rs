//! Period integrals (2/pi) * int sqrt(p^2) ds between turning points and
//! poles.
//!
//! On [lo, hi] we substitute s = m + w sin(theta). Every linear factor of
//! p^2 that sits on an endpoint is evaluated from the endpoint distance
//! directly, so a root or a simple pole at an end becomes a smooth
//! integrand in theta. The theta integral uses adaptive Gauss-Legendre.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::separation::MomentumSq;

/// Absolute tolerance of one period integral.
pub const QUAD_TOL: f64 = 1e-13;
/// Intervals shorter than this give a zero action.
pub const MIN_INTERVAL: f64 = 1e-12;
const MAX_DEPTH: u32 = 50;
const SNAP: f64 = 1e-14;
const CANCEL: f64 = 1e-13;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(20).expect("nonzero")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Anchor {
    Lo,
    Hi,
    /// offset of the factor's root from the nearer endpoint, and whether that is hi
    Free(f64, bool),
}

#[derive(Debug, Clone, Copy)]
struct Factor {
    anchor: Anchor,
    power: i32,
}

/// The factored form lead * prod (s - c)^power of p^2 on [lo, hi].
#[derive(Debug, Clone)]
struct Factored {
    lead: f64,
    factors: Vec<Factor>,
    m: f64,
    w: f64,
    /// numerator without real roots: evaluate the relation as is
    direct: bool,
}

impl Factored {
    fn new(rel: &MomentumSq, lo: f64, hi: f64) -> Self {
        let [c0, c1, c2] = rel.numerator;
        let mut direct = false;
        let (lead, mut roots) = if c2 != 0.0 {
            match rel.numerator_roots().as_slice() {
                [a, b] => (c2, vec![*a, *b]),
                _ => {
                    direct = true;
                    (c2, vec![])
                }
            }
        } else if c1 != 0.0 {
            (c1, vec![-c0 / c1])
        } else {
            (c0, vec![])
        };
        let mut poles = rel.poles.clone();
        roots.retain(|r| {
            let tol = CANCEL * (1.0 + r.abs());
            match poles.iter().position(|p| (p - r).abs() < tol) {
                Some(k) => {
                    poles.remove(k);
                    false
                }
                None => true,
            }
        });
        let anchor = |c: f64| {
            if (c - lo).abs() <= SNAP * (1.0 + lo.abs()) {
                Anchor::Lo
            } else if (c - hi).abs() <= SNAP * (1.0 + hi.abs()) {
                Anchor::Hi
            } else if (c - lo).abs() <= (c - hi).abs() {
                Anchor::Free(lo - c, false)
            } else {
                Anchor::Free(hi - c, true)
            }
        };
        let mut factors: Vec<Factor> = roots.iter().map(|&r| Factor { anchor: anchor(r), power: 1 }).collect();
        factors.extend(poles.iter().map(|&p| Factor { anchor: anchor(p), power: -1 }));
        Factored { lead: lead / rel.scale, factors, m: 0.5 * (lo + hi), w: 0.5 * (hi - lo), direct }
    }

    fn integrand(&self, theta: f64, rel: &MomentumSq) -> f64 {
        let (sin, cos) = theta.sin_cos();
        let s = self.m + self.w * sin;
        if self.direct {
            return rel.eval(s).max(0.0).sqrt() * self.w * cos;
        }
        let from_lo = 2.0 * self.w * (FRAC_PI_4 + 0.5 * theta).sin().powi(2);
        let from_hi = -2.0 * self.w * (FRAC_PI_4 - 0.5 * theta).sin().powi(2);
        let mut val = self.lead;
        for f in &self.factors {
            // measured from the nearer endpoint so a root just outside the interval keeps its digits
            let d = match f.anchor {
                Anchor::Lo => from_lo,
                Anchor::Hi => from_hi,
                Anchor::Free(offset, false) => offset + from_lo,
                Anchor::Free(offset, true) => offset + from_hi,
            };
            if f.power == 1 {
                val *= d;
            } else {
                val /= d;
            }
        }
        val.max(0.0).sqrt() * self.w * cos
    }
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule().integrate(a, mid, f);
    let right = rule().integrate(mid, b, f);
    let both = left + right;
    if depth >= MAX_DEPTH || (both - whole).abs() <= tol || (b - a) < 1e-15 {
        return both;
    }
    let t = (0.5 * tol).max(1e-17);
    adaptive(f, a, mid, left, t, depth + 1) + adaptive(f, mid, b, right, t, depth + 1)
}

/// (2/pi) * int_lo^hi sqrt(max(p^2, 0)) ds.
pub fn period_integral(rel: &MomentumSq, lo: f64, hi: f64) -> f64 {
    if !(hi - lo > MIN_INTERVAL) {
        return 0.0;
    }
    let fac = Factored::new(rel, lo, hi);
    let f = |t: f64| fac.integrand(t, rel);
    let whole = rule().integrate(-FRAC_PI_2, FRAC_PI_2, f);
    2.0 / PI * adaptive(&f, -FRAC_PI_2, FRAC_PI_2, whole, QUAD_TOL, 0)
}

/// Adaptive Gauss-Legendre for a smooth function on [a, b].
pub fn integrate_smooth(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let whole = rule().integrate(a, b, &f);
    adaptive(&f, a, b, whole, tol, 0)
}
