//! Ricci eigenvalues of the smoothing family and uniform lower-bound scans.
//!
//! At log-radius `t` with `F = eps^2 e^{-t} in [0, 1]` and
//! `psi = chi'' + (chi' - chi'') F`, the Ricci form of `omega_eps` has
//! eigenvalues (relative to `1/(|z|^2+eps^2)`):
//!
//! ```text
//! lambda = n - [(n-1) chi''/chi' + psi'/psi]                 (mult. n-1)
//! mu     = -[(n-1)(chi'''/chi' - (chi''/chi')^2) + (psi''/psi - (psi'/psi)^2)]
//!          + F [n + (n-1)((chi'''-chi'')/chi' - (chi''/chi')^2)
//!               + ((psi''-psi')/psi - (psi'/psi)^2)]          (mult. 1)
//! ```
//!
//! `Ric >= -C omega_eps` at the point iff `lambda >= -C chi'` and
//! `mu >= -C psi`. The difference quotients are evaluated through
//! chi'-normalized derivative ratios with grouped numerators
//! (`chi''' chi' - chi''^2` style), which keeps every digit for the log
//! families where the raw derivatives underflow long before the ratios do.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RadialMetric;
use crate::jet::Jet;
use crate::profile::Profile;

/// Ricci data at one point of the smoothing family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciPoint {
    pub t: f64,
    /// `F = eps^2 e^{-t}`.
    pub f_weight: f64,
    /// Spherical Ricci eigenvalue (multiplicity n-1).
    pub lambda: f64,
    /// Radial Ricci eigenvalue (multiplicity 1).
    pub mu: f64,
    /// Comparison weight for lambda: `chi'(t)`.
    pub weight_spherical: f64,
    /// Comparison weight for mu: `psi(t) = chi'' + (chi' - chi'') F`.
    pub weight_radial: f64,
}

impl RicciPoint {
    /// Normalized margins `(lambda/chi' + C, mu/psi + C)`; the point satisfies
    /// `Ric >= -C omega_eps` iff both are >= 0.
    pub fn normalized_margins(&self, c: f64) -> (f64, f64) {
        (
            self.lambda / self.weight_spherical + c,
            self.mu / self.weight_radial + c,
        )
    }
}

fn ricci_from_parts(n: u32, f_weight: f64, chi: &Jet, t: f64) -> Result<RicciPoint> {
    let nf = n as f64;
    let c1 = chi.deriv(1);
    if !(c1 > 0.0) {
        return Err(Error::DegenerateMetric(format!("chi'({t}) = {c1} <= 0")));
    }
    // chi'-normalized derivatives
    let d2 = chi.deriv(2) / c1;
    let d3 = chi.deriv(3) / c1;
    let d4 = chi.deriv(4) / c1;
    let ff = f_weight;
    // psi and its derivatives, normalized by chi':
    //   psi   = chi'' (1-F) + chi' F
    //   psi'  = chi''' + F (2 chi'' - chi''' - chi')
    //   psi'' = chi'''' + F (chi' - 3 chi'' + 3 chi''' - chi'''')
    let q0 = d2 + ff * (1.0 - d2);
    let q1 = d3 + ff * (2.0 * d2 - d3 - 1.0);
    let q2 = d4 + ff * (1.0 - 3.0 * d2 + 3.0 * d3 - d4);
    if !(q0 > 0.0) {
        return Err(Error::DegenerateMetric(format!(
            "psi({t}) = {} <= 0",
            q0 * c1
        )));
    }
    let lambda = nf - ((nf - 1.0) * d2 + q1 / q0);
    // grouped difference quotients
    let chi_part = d3 - d2 * d2;
    let psi_part = (q2 * q0 - q1 * q1) / (q0 * q0);
    let chi_part_f = d3 - d2 - d2 * d2;
    let psi_part_f = ((q2 - q1) * q0 - q1 * q1) / (q0 * q0);
    let mu = -((nf - 1.0) * chi_part + psi_part)
        + ff * (nf + (nf - 1.0) * chi_part_f + psi_part_f);
    Ok(RicciPoint {
        t,
        f_weight: ff,
        lambda,
        mu,
        weight_spherical: c1,
        weight_radial: q0 * c1,
    })
}

/// Jet of `psi(t) = chi''(t) + (chi'(t) - chi''(t)) eps^2 e^{-t}` up to
/// order 2, assembled by jet algebra as `chi'' - eps^2 (chi' e^{-t})'`.
pub fn psi_jet(m: &RadialMetric, t: f64, order: usize) -> Result<Jet> {
    assert!(order <= 2);
    let chi = m.profile().jet(t, order + 2)?;
    let chi1 = Jet::from_derivs(&chi.coeffs()[1..]); // jet of chi', order+1
    let chi2 = Jet::from_derivs(&chi.coeffs()[2..]); // jet of chi'', order
    let e_mt = Jet::variable(t, order + 1).neg().exp();
    let prod_deriv = chi1.mul(&e_mt).derivative(); // (chi' e^{-t})', order
    let eps2 = m.eps() * m.eps();
    chi2.sub(&prod_deriv.scale(eps2)).ensure_finite(t)
}

/// Ricci eigenvalues of `omega_eps` at log-radius `t`.
pub fn ricci_point(m: &RadialMetric, t: f64) -> Result<RicciPoint> {
    m.profile().check_in_window(t)?;
    let f_weight = if m.eps() == 0.0 {
        0.0
    } else {
        m.eps() * m.eps() * (-t).exp()
    };
    if f_weight > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "t = {t} lies below log(eps^2) = {}",
            (m.eps() * m.eps()).ln()
        )));
    }
    let chi = m.profile().jet(t, 4)?;
    ricci_from_parts(m.n(), f_weight.min(1.0), &chi, t)
}

/// The `eps = 0` shortcut: same eigenvalues with `psi = chi''`.
pub fn ricci_epsilon0(profile: &Profile, n: u32, t: f64) -> Result<RicciPoint> {
    let chi = profile.jet(t, 4)?;
    ricci_from_parts(n, 0.0, &chi, t)
}

/// Absolute margins of `Ric >= -C omega_eps` at `t`:
/// `(lambda + C chi', mu + C psi)`. Both `>= 0` iff the bound holds there.
pub fn bound_margins(m: &RadialMetric, t: f64, c: f64) -> Result<(f64, f64)> {
    let p = ricci_point(m, t)?;
    Ok((
        p.lambda + c * p.weight_spherical,
        p.mu + c * p.weight_radial,
    ))
}

/// Left side of the n=1 minoration inequality including the `C psi^3` term:
///
/// ```text
/// F psi^2 + (1-F) psi'^2 - F psi psi' - (1-F) psi psi'' + C psi^3
/// ```
///
/// Its sign equals the sign of `margin_mu * psi^2` (the inequality is the
/// mu-bound multiplied through by `psi^3 > 0`).
pub fn minoration_lhs(m: &RadialMetric, t: f64, c: f64) -> Result<f64> {
    if m.n() != 1 {
        return Err(Error::Domain(format!(
            "the minoration polynomial is the n = 1 case, metric has n = {}",
            m.n()
        )));
    }
    let f_weight = if m.eps() == 0.0 {
        0.0
    } else {
        m.eps() * m.eps() * (-t).exp()
    };
    if f_weight > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "t = {t} lies below log(eps^2) = {}",
            (m.eps() * m.eps()).ln()
        )));
    }
    let psi = psi_jet(m, t, 2)?;
    if !(psi.value() > 0.0) {
        return Err(Error::DegenerateMetric(format!(
            "psi({t}) = {} <= 0",
            psi.value()
        )));
    }
    Ok(minoration_from_psi(&psi, f_weight.min(1.0), c))
}

/// The minoration polynomial evaluated on an explicit `psi` jet.
pub fn minoration_from_psi(psi: &Jet, f_weight: f64, c: f64) -> f64 {
    let p0 = psi.deriv(0);
    let p1 = psi.deriv(1);
    let p2 = psi.deriv(2);
    f_weight * p0 * p0 + (1.0 - f_weight) * p1 * p1
        - f_weight * p0 * p1
        - (1.0 - f_weight) * p0 * p2
        + c * p0 * p0 * p0
}

/// A point of a witness sequence for unbounded Ricci curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub t: f64,
    pub eps: f64,
    /// Normalized min margin at the largest tested C.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScanVerdict {
    /// The smallest tested C whose margins are non-negative on the grid.
    UniformlyBounded { c: f64 },
    /// A sequence along which the normalized margin decreases without bound
    /// (at least 5 strictly decreasing points, magnitude at least doubling);
    /// the bound fails for every fixed C. `curve` names the probe sequence.
    EvidenceUnbounded {
        curve: String,
        witness: Vec<WitnessPoint>,
    },
    /// Margins are negative at every tested C but show no diverging trend:
    /// a larger C may still work. Not reachable for the built-in families.
    Indeterminate { min_margin: f64, at_c: f64 },
}

/// Scan report over a (t, eps) grid and a ladder of candidate constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundScanReport {
    pub c_tested: Vec<f64>,
    /// Evaluated (t, eps) samples.
    pub grid: Vec<(f64, f64)>,
    /// Minimum of `lambda/chi'` over the grid (the C = 0 normalized margin).
    pub min_margin_lambda: f64,
    /// Minimum of `mu/psi` over the grid.
    pub min_margin_mu: f64,
    pub verdict: ScanVerdict,
}

/// Exponents `a` of the probe curves `|z|^2 = eps^2 (-log eps)^a` along which
/// the smoothed families lose their uniform bound.
pub const PROBE_CURVE_EXPONENTS: [f64; 4] = [0.75, 1.0, 2.0, 2.5];

/// Detects a trailing window of >= 5 strictly decreasing values whose
/// magnitude at least doubles while negative. Returns the window indices.
fn find_decreasing_witness(values: &[f64]) -> Option<(usize, usize)> {
    let finite_end = values.iter().take_while(|v| v.is_finite()).count();
    if finite_end < 5 {
        return None;
    }
    let vals = &values[..finite_end];
    // longest strictly decreasing suffix
    let mut start = vals.len() - 1;
    while start > 0 && vals[start - 1] > vals[start] {
        start -= 1;
    }
    let window = &vals[start..];
    if window.len() < 5 {
        return None;
    }
    let first = window[0];
    let last = *window.last().unwrap();
    if last < 0.0 && (first >= 0.0 || last <= 2.0 * first) {
        Some((start, finite_end))
    } else {
        None
    }
}

/// Scans the smoothing family for a uniform Ricci lower bound.
///
/// Sequences searched for unbounded-below evidence: the probe curves
/// `|z|^2 = eps^2 (-log eps)^a` over the eps grid, and `t -> -inf` at each
/// fixed eps. The witness quantity is the C-free normalized margin
/// `min(lambda/chi', mu/psi)`; once it diverges to `-inf`, the margin at
/// every fixed C does too.
pub fn scan_uniform_bound(
    profile: &Profile,
    n: u32,
    eps_grid: &[f64],
    t_grid: &[f64],
    c_list: &[f64],
) -> Result<BoundScanReport> {
    if eps_grid.is_empty() || t_grid.is_empty() || c_list.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let c_max = c_list.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut grid = Vec::new();
    let mut min_lambda = f64::INFINITY;
    let mut min_mu = f64::INFINITY;
    let q_of = |t: f64, eps: f64| -> Option<(f64, f64)> {
        let m = RadialMetric::new_unchecked(profile.clone(), n, eps);
        match ricci_point(&m, t) {
            Ok(p) => {
                let (ml, mm) = p.normalized_margins(0.0);
                Some((ml, mm))
            }
            Err(_) => None,
        }
    };

    // evaluate the raw grid (for the reported minima)
    for &eps in eps_grid {
        for &t in t_grid {
            if eps > 0.0 && t <= (eps * eps).ln() {
                continue;
            }
            if let Some((ml, mm)) = q_of(t, eps) {
                if ml.is_finite() {
                    min_lambda = min_lambda.min(ml);
                }
                if mm.is_finite() {
                    min_mu = min_mu.min(mm);
                }
                grid.push((t, eps));
            }
        }
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }

    // candidate witness sequences: probe curves first (in exponent order,
    // they are the designated evidence for the smoothing families), then the
    // fixed-eps tails. (label, points ordered toward the singular limit)
    let mut sequences: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let eps_positive: Vec<f64> = eps_grid.iter().copied().filter(|e| *e > 0.0).collect();
    if eps_positive.len() >= 5 {
        for &a in PROBE_CURVE_EXPONENTS.iter() {
            let mut pts = Vec::new();
            for &eps in &eps_positive {
                if eps >= 1.0 {
                    continue;
                }
                let ell = -eps.ln();
                // t = log(eps^2 (1 + ell^a))
                let t = 2.0 * eps.ln() + ell.powf(a).ln_1p();
                pts.push((t, eps));
            }
            if pts.len() >= 5 {
                sequences.push((format!("|z|^2 = eps^2 (-log eps)^{a}"), pts));
            }
        }
    }
    for &eps in eps_grid {
        let mut pts: Vec<(f64, f64)> = t_grid
            .iter()
            .copied()
            .filter(|&t| eps == 0.0 || t > (eps * eps).ln())
            .map(|t| (t, eps))
            .collect();
        // toward the singular end: decreasing t
        pts.sort_by(|a, b| b.0.total_cmp(&a.0));
        if pts.len() >= 5 {
            sequences.push((format!("t -> -inf at eps = {eps}"), pts));
        }
    }

    let mut best: Option<(f64, String, Vec<WitnessPoint>)> = None;
    for (label, pts) in &sequences {
        let qs: Vec<f64> = pts
            .iter()
            .map(|&(t, eps)| match q_of(t, eps) {
                Some((ml, mm)) => ml.min(mm),
                None => f64::NAN,
            })
            .collect();
        if let Some((start, end)) = find_decreasing_witness(&qs) {
            let witness: Vec<WitnessPoint> = (start..end)
                .map(|i| WitnessPoint {
                    t: pts[i].0,
                    eps: pts[i].1,
                    margin: qs[i] + c_max,
                })
                .collect();
            let depth = qs[end - 1];
            // first qualifying probe curve wins; fixed-eps tails compete by
            // depth only among themselves
            let better = match &best {
                None => true,
                Some((d, l, _)) => !l.starts_with("|z|^2") && (label.starts_with("|z|^2") || depth < *d),
            };
            if better {
                best = Some((depth, label.clone(), witness));
            }
        }
    }

    if let Some((_, curve, witness)) = best {
        return Ok(BoundScanReport {
            c_tested: c_list.to_vec(),
            grid,
            min_margin_lambda: min_lambda,
            min_margin_mu: min_mu,
            verdict: ScanVerdict::EvidenceUnbounded { curve, witness },
        });
    }

    // no witness: look for the smallest C that clears the grid
    let floor = min_lambda.min(min_mu);
    let mut c_ok = None;
    for &c in c_list {
        if floor + c >= 0.0 {
            c_ok = Some(c);
            break;
        }
    }
    Ok(match c_ok {
        Some(c) => BoundScanReport {
            c_tested: c_list.to_vec(),
            grid,
            min_margin_lambda: min_lambda,
            min_margin_mu: min_mu,
            verdict: ScanVerdict::UniformlyBounded { c },
        },
        None => BoundScanReport {
            c_tested: c_list.to_vec(),
            grid,
            min_margin_lambda: min_lambda,
            min_margin_mu: min_mu,
            verdict: ScanVerdict::Indeterminate {
                min_margin: floor,
                at_c: c_max,
            },
        },
    })
}

/// Log-spaced `t` grid on `[-s_hi, -s_lo]`, ordered from the anchor inward.
pub fn log_t_grid(s_lo: f64, s_hi: f64, points: usize) -> Vec<f64> {
    assert!(s_lo > 0.0 && s_hi > s_lo && points >= 2);
    (0..points)
        .map(|i| {
            let frac = i as f64 / (points - 1) as f64;
            -(s_lo * (s_hi / s_lo).powf(frac))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;
    use approx::assert_relative_eq;

    fn metric(p: Profile, n: u32, eps: f64) -> RadialMetric {
        RadialMetric::new(p, n, eps).unwrap()
    }

    #[test]
    fn psi_jet_reduces_to_chi_at_eps0() {
        let m = metric(Profile::family2(1.5).unwrap(), 2, 0.0);
        let t = -4.0;
        let chi = m.profile().jet(t, 4).unwrap();
        let psi = psi_jet(&m, t, 2).unwrap();
        for k in 0..=2usize {
            assert_relative_eq!(psi.deriv(k), chi.deriv(k + 2), max_relative = 1e-13);
        }
    }

    #[test]
    fn psi_jet_poincare_closed_form() {
        // family4(1): psi = 1/s^2 + F(1/s - 1/s^2), psi' = 2/s^3 + F(-1/s + 2/s^2 - 2/s^3),
        // psi'' = 6/s^4 + F(1/s - 3/s^2 + 6/s^3 - 6/s^4)
        let eps = 0.05;
        let m = metric(Profile::family4(1.0).unwrap(), 1, eps);
        for &t in &[-4.0, -9.0] {
            let s = -t;
            let f = eps * eps * (-t as f64).exp();
            let psi = psi_jet(&m, t, 2).unwrap();
            assert_relative_eq!(
                psi.deriv(0),
                1.0 / (s * s) + f * (1.0 / s - 1.0 / (s * s)),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                psi.deriv(1),
                2.0 / s.powi(3) + f * (-1.0 / s + 2.0 / (s * s) - 2.0 / s.powi(3)),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                psi.deriv(2),
                6.0 / s.powi(4) + f * (1.0 / s - 3.0 / (s * s) + 6.0 / s.powi(3) - 6.0 / s.powi(4)),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn family1_is_ricci_flat_at_alpha_one() {
        let m = metric(Profile::family1(1.0).unwrap(), 2, 0.0);
        let p = ricci_point(&m, -3.0).unwrap();
        assert_relative_eq!(p.lambda, 0.0, epsilon = 1e-12);
        assert_relative_eq!(p.mu, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn family1_eigenvalues_are_constant() {
        // (lambda, mu) = (n(1-alpha), 0)
        for &(n, alpha) in &[(1u32, 0.5), (2, 2.0), (3, 1.3)] {
            let m = metric(Profile::family1(alpha).unwrap(), n, 0.0);
            for &t in &[-1.0, -10.0, -200.0] {
                let p = ricci_point(&m, t).unwrap();
                assert_relative_eq!(p.lambda, n as f64 * (1.0 - alpha), epsilon = 1e-11);
                assert_relative_eq!(p.mu, 0.0, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn family2_closed_forms() {
        // lambda = n - (n alpha + n + 1)/(-t), mu = -(n alpha + n + 1)/t^2
        let (n, alpha, t) = (2u32, 1.0, -1e3);
        let m = metric(Profile::family2(alpha).unwrap(), n, 0.0);
        let p = ricci_point(&m, t).unwrap();
        let k = n as f64 * alpha + n as f64 + 1.0;
        assert_relative_eq!(p.lambda, n as f64 - k / (-t), max_relative = 1e-10);
        assert_relative_eq!(p.mu * t * t, -k, max_relative = 1e-10);
        // mu/chi'' = -(n(alpha+1)+1)/(alpha(alpha+1)) (-t)^alpha
        let chi2 = m.profile().jet(t, 2).unwrap().deriv(2);
        let expect = -(n as f64 * (alpha + 1.0) + 1.0) / (alpha * (alpha + 1.0)) * (-t).powf(alpha);
        assert_relative_eq!(p.mu / chi2, expect, max_relative = 1e-9);
    }

    #[test]
    fn family3_mu_asymptotics() {
        // mu/chi'' ~ -((n+1)/alpha) (log(-t))^{alpha+1} as t -> -inf
        let (n, alpha) = (2u32, 1.0);
        let t = -(20f64.exp());
        let m = metric(Profile::family3(alpha).unwrap(), n, 0.0);
        let p = ricci_point(&m, t).unwrap();
        let chi2 = m.profile().jet(t, 2).unwrap().deriv(2);
        let asymptotic = -((n as f64 + 1.0) / alpha) * (-t).ln().powf(alpha + 1.0);
        let ratio = (p.mu / chi2) / asymptotic;
        assert!((ratio - 1.0).abs() < 0.05, "ratio = {ratio}");
    }

    #[test]
    fn poincare_mu_ratio_is_minus_two() {
        // family4(1), n=1: mu/chi'' = -2 for all t (convention-independent
        // eigenvalue ratio; the absolute curvature constant depends on the
        // dd^c normalization and is not asserted)
        let m = metric(Profile::family4(1.0).unwrap(), 1, 0.0);
        for &t in &[-3.0, -10.0, -100.0] {
            let p = ricci_point(&m, t).unwrap();
            let chi2 = m.profile().jet(t, 2).unwrap().deriv(2);
            assert_relative_eq!(p.mu / chi2, -2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn epsilon0_shortcut_equals_general_path() {
        for p in [
            Profile::family2(0.7).unwrap(),
            Profile::family3(1.5).unwrap(),
            Profile::family4(1.0).unwrap(),
        ] {
            let m = metric(p.clone(), 2, 0.0);
            for &t in &[-3.0, -25.0] {
                let a = ricci_point(&m, t).unwrap();
                let b = ricci_epsilon0(&p, 2, t).unwrap();
                assert_relative_eq!(a.lambda, b.lambda, max_relative = 1e-12);
                assert_relative_eq!(a.mu, b.mu, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn margins_family1() {
        let m05 = metric(Profile::family1(0.5).unwrap(), 2, 0.0);
        for &t in &[-1.0, -5.0, -40.0] {
            let (ml, mm) = bound_margins(&m05, t, 0.0).unwrap();
            assert!(ml >= 0.0 && mm >= 0.0);
        }
        let m2 = metric(Profile::family1(2.0).unwrap(), 2, 0.0);
        let (ml, _) = bound_margins(&m2, -3.0, 0.0).unwrap();
        assert!(ml < 0.0); // lambda = n(1-2) < 0
    }

    #[test]
    fn family2_mu_margin_fails_for_any_fixed_c() {
        let m = metric(Profile::family2(1.0).unwrap(), 2, 0.0);
        for &c in &[1.0, 10.0, 100.0] {
            let (_, mm) = bound_margins(&m, -1e6, c).unwrap();
            assert!(mm < 0.0, "C = {c}");
        }
    }

    #[test]
    fn minoration_sign_matches_mu_margin() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let profile = Profile::family4(1.0).unwrap();
        let mut checked = 0;
        while checked < 200 {
            let t = -rng.gen_range(2.5f64..50.0);
            let eps = if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.0f64..0.4)
            };
            if eps > 0.0 && t <= (eps * eps).ln() {
                continue;
            }
            let c = *[0.0, 0.5, 1.0, 10.0]
                .iter()
                .nth(rng.gen_range(0..4))
                .unwrap();
            let m = RadialMetric::new_unchecked(profile.clone(), 1, eps);
            let lhs = minoration_lhs(&m, t, c).unwrap();
            let (_, mm) = bound_margins(&m, t, c).unwrap();
            assert_eq!(
                lhs >= 0.0,
                mm >= 0.0,
                "sign mismatch at t={t}, eps={eps}, C={c}: lhs={lhs}, margin={mm}"
            );
            checked += 1;
        }
    }

    #[test]
    fn minoration_constant_psi() {
        // psi constant: LHS = F psi^2 + C psi^3 >= 0
        let psi = Jet::from_derivs(&[0.7, 0.0, 0.0]);
        for &f in &[0.0, 0.3, 1.0] {
            for &c in &[0.0, 2.0] {
                let v = minoration_from_psi(&psi, f, c);
                assert!(v >= 0.0);
                assert_relative_eq!(v, f * 0.49 + c * 0.343, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn minoration_case_asymptotics() {
        // Case F ~ 1 (near the origin): LHS ~ 2 F^3 / s^2
        let p = Profile::family4(1.0).unwrap();
        let eps = 1e-12f64;
        let z2 = 0.1 * eps * eps;
        let t = (z2 + eps * eps).ln();
        let s = -t;
        let f = eps * eps / (z2 + eps * eps);
        let m = RadialMetric::new_unchecked(p.clone(), 1, eps);
        let lhs = minoration_lhs(&m, t, 0.0).unwrap();
        let lead = 2.0 * f.powi(3) / (s * s);
        assert!((lhs / lead - 1.0).abs() < 0.2, "ratio {}", lhs / lead);

        // Case F -> 0: LHS ~ -2/s^6 - F/s^3 + 2F^3/s^2
        let eps = 2f64.powi(-26);
        let ell = -eps.ln();
        let z2 = eps * eps * ell.powf(1.5);
        let t = (z2 + eps * eps).ln();
        let s = -t;
        let f = eps * eps / (z2 + eps * eps);
        let m = RadialMetric::new_unchecked(p, 1, eps);
        let lhs = minoration_lhs(&m, t, 0.0).unwrap();
        let asym = -2.0 / s.powi(6) - f / s.powi(3) + 2.0 * f.powi(3) / (s * s);
        assert!((lhs / asym - 1.0).abs() < 0.15, "ratio {}", lhs / asym);
    }

    #[test]
    fn eps_continuity_toward_eps0() {
        // t must stay above log(eps^2) for the whole ladder
        let p = Profile::family3(1.5).unwrap();
        let t = -2.0;
        let base = ricci_epsilon0(&p, 2, t).unwrap();
        let mut prev_drift = f64::INFINITY;
        for k in 2..=8 {
            let eps = 10f64.powi(-k);
            let m = RadialMetric::new_unchecked(p.clone(), 2, eps);
            let q = ricci_point(&m, t).unwrap();
            let drift = ((q.lambda - base.lambda).abs() + (q.mu - base.mu).abs())
                / (1.0 + base.lambda.abs() + base.mu.abs());
            assert!(drift < 1e-3, "eps = {eps}: drift {drift}");
            assert!(drift <= prev_drift * 1.01);
            prev_drift = drift;
        }
    }

    #[test]
    fn scale_covariance_of_eigenvalues() {
        // chi -> a chi leaves lambda and mu unchanged: every term is a ratio
        // of chi-derivatives (the F-terms too)
        let p = Profile::family2(1.3).unwrap();
        let t = -7.0;
        let chi = p.jet(t, 4).unwrap();
        for &(a, tol) in &[(4.0f64, 0.0), (3.7, 1e-13)] {
            let scaled = chi.scale(a);
            for &f in &[0.0, 0.25, 0.9] {
                let x = ricci_from_parts(2, f, &chi, t).unwrap();
                let y = ricci_from_parts(2, f, &scaled, t).unwrap();
                if tol == 0.0 {
                    // powers of two rescale exactly
                    assert_eq!(x.lambda, y.lambda);
                    assert_eq!(x.mu, y.mu);
                } else {
                    assert_relative_eq!(x.lambda, y.lambda, max_relative = tol);
                    assert_relative_eq!(x.mu, y.mu, max_relative = tol);
                }
            }
        }
    }

    #[test]
    fn scan_flat_family_is_bounded() {
        let report = scan_uniform_bound(
            &Profile::family1(1.0).unwrap(),
            2,
            &[0.0],
            &log_t_grid(1.0, 1e6, 40),
            &[0.0],
        )
        .unwrap();
        assert_eq!(report.verdict, ScanVerdict::UniformlyBounded { c: 0.0 });
    }

    #[test]
    fn scan_family2_unbounded_along_t() {
        let report = scan_uniform_bound(
            &Profile::family2(1.0).unwrap(),
            2,
            &[0.0],
            &log_t_grid(2.0, 1e8, 48),
            &[1.0, 10.0, 100.0],
        )
        .unwrap();
        match report.verdict {
            ScanVerdict::EvidenceUnbounded { ref witness, .. } => {
                assert!(witness.len() >= 5);
                let margins: Vec<f64> = witness.iter().map(|w| w.margin).collect();
                assert!(margins.windows(2).all(|w| w[1] < w[0]));
            }
            other => panic!("expected EvidenceUnbounded, got {other:?}"),
        }
    }

    #[test]
    fn scan_family4_smoothing_witness_on_probe_curve() {
        let eps_grid: Vec<f64> = (4..=20).map(|k| 2f64.powi(-k)).collect();
        let report = scan_uniform_bound(
            &Profile::family4(1.0).unwrap(),
            1,
            &eps_grid,
            &log_t_grid(2.0, 1e4, 24),
            &[0.0, 1.0, 10.0, 100.0, 1000.0],
        )
        .unwrap();
        match report.verdict {
            ScanVerdict::EvidenceUnbounded { ref curve, ref witness } => {
                assert!(curve.contains("(-log eps)^1"), "curve = {curve}");
                assert!(witness.len() >= 5);
            }
            other => panic!("expected EvidenceUnbounded, got {other:?}"),
        }
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(matches!(
            scan_uniform_bound(&Profile::family1(1.0).unwrap(), 1, &[], &[-2.0], &[0.0]),
            Err(Error::EmptyGrid)
        ));
    }
}
