//! Orlicz-type integrability classifiers for the Monge-Ampère density of
//! radial metrics, and the decay predicates they feed.
//!
//! Everything reduces to one-dimensional tail integrals in `t = log |z|^2`.
//! The density `f = chi'^{n-1} chi'' e^{-nt}` blows up double-exponentially
//! at the puncture, so weights like `f |log f|^n (log log (f+3))^p` are
//! composed in log space with the exact cancellation `log f + n t =
//! (n-1) log chi' + log chi''` applied symbolically; forming `log f` and
//! `n t` separately would lose every digit deep in the tail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ModulusFn;
use crate::profile::Profile;
use crate::quadrature::{self, Integrand, IntegralVerdict, TailPoint};

/// The weight `h` in Condition (K): increasing, with `int^inf dt/h(t)` finite,
/// asserted by the caller.
#[derive(Debug, Clone)]
pub enum HWeight {
    /// `h(s) = s^gamma` with `gamma > 1`.
    Power { gamma: f64 },
}

impl HWeight {
    /// The default `h(s) = s^{1.01}`.
    pub fn default_power() -> Self {
        HWeight::Power { gamma: 1.01 }
    }

    /// `log h(s)` given `s` directly (s stays moderate in every use here:
    /// it is `log |t|`, at most ~log(1e12) times the window depth).
    pub fn ln_h(&self, s: f64) -> f64 {
        match self {
            HWeight::Power { gamma } => gamma * s.ln(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            HWeight::Power { gamma } => format!("s^{gamma}"),
        }
    }
}

/// Orlicz weight classes for the density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightSpec {
    /// `w(x) = x^{1+eps}`.
    PowerEps { n: u32, eps: f64 },
    /// `w(x) = x |log x|^{n+eps}`.
    LogPower { n: u32, eps: f64 },
    /// `w(x) = x |log x|^n (log log (x+3))^{n+eps}`.
    LogLogPower { n: u32, eps: f64 },
    /// `w(x) = x |log x|^n (log log (x+3))^p`.
    IteratedLog { n: u32, p: f64 },
}

/// Modulus-of-continuity bound derived from a weight class (existence only;
/// no constant is produced).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModulusBound {
    /// `m(r) <= C r^alpha` for every `alpha < alpha_sup`.
    Holder { alpha_sup: f64 },
    /// `m(r) <= C (-log r)^{-exponent}`.
    InverseLogPower { exponent: f64 },
    /// `m(r) <= C (log(-log r))^{-exponent}`.
    InverseLogLogPower { exponent: f64 },
}

/// Pure lookup from an integrability class to the modulus bound it buys.
pub fn modulus_from_weight(w: &WeightSpec) -> Result<ModulusBound> {
    match w {
        WeightSpec::PowerEps { n, eps } => {
            let (n, eps) = (*n as f64, *eps);
            Ok(ModulusBound::Holder {
                alpha_sup: 2.0 * eps / (n * (1.0 + eps) + eps),
            })
        }
        WeightSpec::LogPower { n, eps } => Ok(ModulusBound::InverseLogPower {
            exponent: eps / *n as f64,
        }),
        WeightSpec::LogLogPower { n, eps } => Ok(ModulusBound::InverseLogLogPower {
            exponent: eps / *n as f64,
        }),
        WeightSpec::IteratedLog { .. } => Err(Error::UnsupportedClass(
            "the |log|^n (log log)^p class has no stated modulus bound beyond its n+eps specialization".into(),
        )),
    }
}

/// `log chi^{(k)}` as a positive quantity, or a domain/sign error.
fn ln_deriv(profile: &Profile, k: usize, w: f64) -> Option<f64> {
    match profile.deriv_signed_log(k, w) {
        Ok(sl) if sl.sign > 0 => Some(sl.ln_abs),
        Ok(sl) if sl.sign == 0 => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

/// The Condition-(K) radial integrand
/// `chi''(t) chi'(t)^{n-1} |t|^n h(log|t|)^n`.
struct ConditionKIntegrand<'a> {
    profile: &'a Profile,
    n: f64,
    h: &'a HWeight,
}

impl Integrand for ConditionKIntegrand<'_> {
    fn value(&self, p: &TailPoint) -> f64 {
        self.ln_value(p).map(f64::exp).unwrap_or(f64::NAN)
    }

    fn ln_value(&self, p: &TailPoint) -> Option<f64> {
        let w = p.ln_neg_t;
        let l2 = ln_deriv(self.profile, 2, w)?;
        let l1 = ln_deriv(self.profile, 1, w)?;
        Some(l2 + (self.n - 1.0) * l1 + self.n * w + self.n * self.h.ln_h(w))
    }
}

/// Checks the growth assumption `chi', chi'' >= e^{Ct}` near `t = -inf`
/// (needed for `log f ~ log |z|` in the radial Condition-(K) reduction):
/// the ratios `log chi^{(k)}(t) / t` must stay bounded above. A diverging
/// increasing trend over the deep samples is a violation.
fn check_growth_assumption(profile: &Profile) -> Result<()> {
    for k in [1usize, 2] {
        let mut ratios = Vec::new();
        for j in 0..8 {
            let w = 2.0 + (j as f64) * 2.0; // -t from e^2 up to e^16
            let t = -(w.exp());
            match ln_deriv(profile, k, w) {
                Some(l) if l.is_finite() => ratios.push(l / t),
                _ => {
                    return Err(Error::GrowthAssumptionViolated(format!(
                        "chi^({k}) not evaluable or non-positive at t = {t}"
                    )))
                }
            }
        }
        let increasing = ratios.windows(2).all(|p| p[1] > p[0]);
        let first = ratios.first().copied().unwrap_or(0.0);
        let last = ratios.last().copied().unwrap_or(0.0);
        if increasing && last > 1.0 && last >= 2.0 * first.max(0.5) {
            return Err(Error::GrowthAssumptionViolated(format!(
                "log chi^({k})(t)/t grows without bound ({first:.3} -> {last:.3}); \
                 the profile decays super-exponentially"
            )));
        }
    }
    Ok(())
}

/// Classifies the radial Condition-(K) integral
/// `int_{-inf}^{-e} chi'' chi'^{n-1} |t|^n h(log|t|)^n dt`.
pub fn condition_k_radial(
    profile: &Profile,
    n: u32,
    h: &HWeight,
    tol: f64,
) -> Result<IntegralVerdict> {
    check_growth_assumption(profile)?;
    let f = ConditionKIntegrand {
        profile,
        n: n as f64,
        h,
    };
    let t0 = profile.tail_anchor().min(-std::f64::consts::E);
    quadrature::integrate_improper(&f, t0, tol)
}

/// `W(f(t)) e^{nt}` for a density weight `W`, with
/// `f = chi'^{n-1} chi'' e^{-nt}` the radial Monge-Ampère density.
struct OrliczIntegrand<'a> {
    profile: &'a Profile,
    n: f64,
    weight: &'a WeightSpec,
}

impl OrliczIntegrand<'_> {
    /// `(log f + n t, log f)`; the first is the exactly cancelled form
    /// `(n-1) log chi' + log chi''`, the second may be huge (≈ n e^w).
    fn log_density_parts(&self, w: f64) -> Option<(f64, f64)> {
        let l1 = ln_deriv(self.profile, 1, w)?;
        let l2 = ln_deriv(self.profile, 2, w)?;
        let cancelled = (self.n - 1.0) * l1 + l2;
        // log f = cancelled + n e^w; saturates to inf harmlessly (only the
        // iterated logs of it are used)
        let log_f = cancelled + self.n * w.exp();
        Some((cancelled, log_f))
    }

    /// `(log |log f|, log(log log (f+3)))`, stable for any window depth.
    fn iterated_logs(&self, w: f64, cancelled: f64, log_f: f64) -> (f64, f64) {
        if log_f.is_finite() && log_f.abs() < 1e300 {
            let a = log_f.abs().ln();
            // log(f+3), then two more logs; log(f+3) >= log 3 > 1 always
            let ln_f3 = if log_f > 40.0 {
                log_f
            } else {
                (log_f.exp() + 3.0).ln()
            };
            (a, ln_f3.ln().ln())
        } else {
            // log f ~ n e^w: log|log f| = log n + w + log(1 + cancelled/(n e^w))
            let corr = cancelled * (-w).exp() / self.n;
            let a = self.n.ln() + w + corr.ln_1p();
            (a, a.ln())
        }
    }
}

impl Integrand for OrliczIntegrand<'_> {
    fn value(&self, p: &TailPoint) -> f64 {
        self.ln_value(p).map(f64::exp).unwrap_or(f64::NAN)
    }

    fn ln_value(&self, p: &TailPoint) -> Option<f64> {
        let w = p.ln_neg_t;
        let (cancelled, log_f) = self.log_density_parts(w)?;
        Some(match self.weight {
            WeightSpec::PowerEps { eps, .. } => {
                // f^{1+eps} e^{nt} = exp((1+eps)(cancelled) + eps n e^w)
                (1.0 + eps) * cancelled + eps * self.n * w.exp()
            }
            WeightSpec::LogPower { n: nw, eps } => {
                let (ln_abs_log, _) = self.iterated_logs(w, cancelled, log_f);
                cancelled + (*nw as f64 + eps) * ln_abs_log
            }
            WeightSpec::LogLogPower { n: nw, eps } => {
                let (ln_abs_log, lll) = self.iterated_logs(w, cancelled, log_f);
                cancelled + *nw as f64 * ln_abs_log + (*nw as f64 + eps) * lll
            }
            WeightSpec::IteratedLog { n: nw, p } => {
                let (ln_abs_log, lll) = self.iterated_logs(w, cancelled, log_f);
                cancelled + *nw as f64 * ln_abs_log + p * lll
            }
        })
    }
}

/// Classifies `int_{-inf}^{T0} W(f(t)) e^{nt} dt` for the radial density.
pub fn orlicz_radial(
    profile: &Profile,
    n: u32,
    weight: &WeightSpec,
    tol: f64,
) -> Result<IntegralVerdict> {
    let f = OrliczIntegrand {
        profile,
        n: n as f64,
        weight,
    };
    let t0 = profile.tail_anchor().min(-std::f64::consts::E);
    quadrature::integrate_improper(&f, t0, tol)
}

/// Verdict of the log-log diameter-sufficiency test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SufficiencyVerdict {
    /// Modulus decays at least like `(log(-log r))^{-(1+delta)}`.
    True { delta_hat: f64 },
    False,
    Inconclusive,
}

/// Tests whether a modulus satisfies
/// `m(r) <= C / (log(-log r))^{1+delta}` for some `delta > 0`, by regressing
/// `log m(r)` against `log log(-log r)` on `r = exp(-exp(2^k))`, `k = 3..12`.
///
/// `True` needs a fitted exponent `>= 1.05` with `R^2 >= 0.99`, or every
/// local slope above that bar (moduli decaying faster than any power of the
/// iterated log are maximally nonlinear in the regression coordinate, so the
/// global-fit gate alone would misreport them). `False` needs the exponent
/// `<= 0.95`. Everything else is `Inconclusive`.
pub fn diameter_decay_sufficient(modulus: &dyn ModulusFn) -> SufficiencyVerdict {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut slopes = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 3..=12u32 {
        let ln_y = 2f64.powi(k as i32); // log(-log r) = 2^k
        let x = ln_y.ln();
        let y = modulus.ln_m_from_ln_y(ln_y);
        if y.is_nan() {
            break;
        }
        if let Some((px, py)) = prev {
            if y.is_finite() && py.is_finite() {
                slopes.push(-(y - py) / (x - px));
            } else if py.is_finite() && y == f64::NEG_INFINITY {
                slopes.push(f64::INFINITY);
            }
        }
        if y.is_finite() {
            xs.push(x);
            ys.push(y);
            prev = Some((x, y));
        } else {
            prev = Some((x, y));
        }
    }
    if slopes.len() < 3 {
        return SufficiencyVerdict::Inconclusive;
    }
    if slopes.iter().all(|s| *s >= 1.05) {
        let delta = slopes.iter().copied().filter(|s| s.is_finite()).fold(f64::INFINITY, f64::min);
        let delta_hat = if delta.is_finite() { delta - 1.0 } else { f64::INFINITY };
        return SufficiencyVerdict::True { delta_hat };
    }
    if slopes.iter().all(|s| *s <= 0.95) {
        return SufficiencyVerdict::False;
    }
    if xs.len() >= 4 {
        let (slope, r2) = {
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let mut sxx = 0.0;
            let mut sxy = 0.0;
            for (x, y) in xs.iter().zip(&ys) {
                sxx += (x - mx) * (x - mx);
                sxy += (x - mx) * (y - my);
            }
            let slope = sxy / sxx;
            let b = my - slope * mx;
            let mut ss_res = 0.0;
            let mut ss_tot = 0.0;
            for (x, y) in xs.iter().zip(&ys) {
                ss_res += (y - b - slope * x).powi(2);
                ss_tot += (y - my).powi(2);
            }
            (slope, if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 })
        };
        let exponent = -slope;
        if r2 >= 0.99 && exponent >= 1.05 {
            return SufficiencyVerdict::True {
                delta_hat: exponent - 1.0,
            };
        }
        if r2 >= 0.99 && exponent <= 0.95 {
            return SufficiencyVerdict::False;
        }
    }
    SufficiencyVerdict::Inconclusive
}

/// Comparison of the measured distance-decay exponent with the ceiling the
/// `|log|^n (log log)^p` integrability class would give.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayComparison {
    /// Fitted exponent of `d(0, r)` against `log(-log r)`.
    pub actual: f64,
    /// `(p_threshold - 2n)/2` at the family's integrability threshold.
    pub integrability_ceiling: f64,
    /// Whether the measured decay stays within the ceiling (vacuous when the
    /// ceiling is negative). A comparison, not an assertion: the local model
    /// is not a global Kähler form.
    pub consistent: bool,
}

/// Fits the decay exponent of the tail distance `d(0, r)` for a third-family
/// profile with `alpha > 1` and reports it next to the integrability ceiling.
pub fn decay_exponent_check(profile: &Profile, n: u32, tol: f64) -> Result<DecayComparison> {
    let alpha = profile.alpha().ok_or_else(|| {
        Error::Domain("decay check needs a built-in third-family profile".into())
    })?;
    if alpha <= 1.0 {
        return Err(Error::Domain(format!(
            "decay check needs alpha > 1 (finite diameter), got {alpha}"
        )));
    }
    let f = crate::geometry::SqrtChi2 { profile };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 3..=8u32 {
        let w = 2f64.powi(k as i32);
        let t0 = -(w.exp());
        let v = quadrature::integrate_improper(&f, t0, tol)?;
        match v.value {
            Some(d) if d > 0.0 => {
                xs.push(w.ln());
                ys.push(d.ln());
            }
            _ => {
                return Err(Error::Domain(format!(
                    "tail distance not convergent at log(-t) = {w}"
                )))
            }
        }
    }
    let npts = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / npts;
    let my = ys.iter().sum::<f64>() / npts;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let actual = -(sxy / sxx);
    let p_threshold = n as f64 * (1.0 + alpha) - 1.0;
    let integrability_ceiling = (p_threshold - 2.0 * n as f64) / 2.0;
    Ok(DecayComparison {
        actual,
        integrability_ceiling,
        consistent: actual <= integrability_ceiling + 0.05,
    })
}
