//! The analysis report: everything one profile run produces, serialized to
//! `report.json` plus the `curves/*.csv` companions.

use std::path::Path;

use num_complex::Complex64;
use radial_kahler::curvature::{self, BoundScanReport, RicciPoint};
use radial_kahler::geometry::{dini_transform, ModulusFn, RadialMetric};
use radial_kahler::integrability::{self, HWeight};
use radial_kahler::oracle;
use radial_kahler::quadrature::IntegralVerdict;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Ok { data: T },
    Skipped { reason: String },
}

impl<T> Section<T> {
    fn from_result(r: Result<T, radial_kahler::Error>) -> Self {
        match r {
            Ok(data) => Section::Ok { data },
            Err(e) => Section::Skipped {
                reason: e.to_string(),
            },
        }
    }

    pub fn data(&self) -> Option<&T> {
        match self {
            Section::Ok { data } => Some(data),
            Section::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusSection {
    pub convention: String,
    /// `(log(-log r), log m(r))` samples along the double-exponential ladder.
    pub samples: Vec<(f64, f64)>,
    pub fitted_decay_class: String,
    pub fitted_exponent: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionKSection {
    pub h: String,
    pub verdict: IntegralVerdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrliczEntry {
    pub weight: String,
    pub verdict: IntegralVerdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundEntry {
    pub c: f64,
    /// Both normalized margins non-negative over the sampled grid.
    pub satisfied_on_grid: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RicciSection {
    pub samples: Vec<RicciPoint>,
    pub bound_verdicts: Vec<BoundEntry>,
    /// Verdict for the metric at the configured eps alone.
    pub bound_verdict: radial_kahler::curvature::ScanVerdict,
    /// Scan over the smoothing ladder eps = 2^-k (plus the configured eps).
    pub smoothing_scan: BoundScanReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSection {
    pub fd_metric_max_rel: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_ricci_max_rel: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub profile: String,
    pub n: u32,
    pub eps: f64,
    pub diameter: Section<IntegralVerdict>,
    pub modulus: Section<ModulusSection>,
    pub dini: Section<IntegralVerdict>,
    pub condition_k: Section<ConditionKSection>,
    pub orlicz: Vec<OrliczEntry>,
    pub ricci: Section<RicciSection>,
    pub oracle_checks: Section<OracleSection>,
    pub tool_version: String,
    pub config_hash: String,
}

fn t_grid(cfg: &Config, profile: &radial_kahler::profile::Profile, points: usize) -> Vec<f64> {
    let hi = cfg.window[1].min(profile.tail_anchor());
    let lo = cfg.window[0].max(-1e8);
    let (s_lo, s_hi) = ((-hi).max(1e-2), (-lo).max(1.0));
    curvature::log_t_grid(s_lo, s_hi.max(s_lo * 10.0), points)
}

/// Runs the full analysis for one configuration.
pub fn analyze(cfg: &Config) -> Result<AnalysisReport, CliError> {
    let profile = cfg.profile()?;
    let tol = cfg.tol;

    // singular-end quantities are defined on the unsmoothed metric
    let base = RadialMetric::new(profile.clone(), cfg.n, 0.0).map_err(CliError::module)?;

    let diameter = Section::from_result(base.diameter(tol));

    let convention = cfg.modulus_convention.into();
    let modulus = Section::from_result(base.modulus_fn(convention).map(|m| {
        let mut samples = Vec::new();
        for k in 3..=12u32 {
            let ln_y = 2f64.powi(k as i32);
            let v = m.ln_m_from_ln_y(ln_y);
            if v.is_finite() {
                samples.push((ln_y, v));
            }
        }
        let (class, exponent) = match integrability::diameter_decay_sufficient(&m) {
            integrability::SufficiencyVerdict::True { delta_hat } => {
                ("inverse_log_log_power".to_string(), delta_hat + 1.0)
            }
            integrability::SufficiencyVerdict::False => {
                // fit the log-log exponent anyway for the report
                ("inverse_log_log_power_weak".to_string(), fit_exponent(&samples))
            }
            integrability::SufficiencyVerdict::Inconclusive => {
                ("inconclusive".to_string(), fit_exponent(&samples))
            }
        };
        ModulusSection {
            convention: format!("{convention:?}"),
            samples,
            fitted_decay_class: class,
            fitted_exponent: exponent,
        }
    }));

    // the Dini radius must keep log r inside the profile window
    let r_dini = (0.5f64).min(0.8 * profile.window().sup.exp());
    let dini = Section::from_result(
        base.modulus_fn(convention)
            .and_then(|m| dini_transform(&m, r_dini, tol)),
    );

    let h = HWeight::default_power();
    let condition_k = Section::from_result(
        integrability::condition_k_radial(&profile, cfg.n, &h, tol).map(|verdict| {
            ConditionKSection {
                h: h.describe(),
                verdict,
            }
        }),
    );

    let mut orlicz = Vec::new();
    for w in &cfg.weights {
        let spec = cfg.weight_spec(w)?;
        let verdict =
            integrability::orlicz_radial(&profile, cfg.n, &spec, tol).map_err(CliError::module)?;
        orlicz.push(OrliczEntry {
            weight: format!("{spec:?}"),
            verdict,
        });
    }

    let ricci = Section::from_result((|| {
        let grid = t_grid(cfg, &profile, 48);
        let m_eps = RadialMetric::new_unchecked(profile.clone(), cfg.n, cfg.eps);
        let mut samples = Vec::new();
        for &t in grid.iter().step_by(6) {
            if cfg.eps > 0.0 && t <= (cfg.eps * cfg.eps).ln() {
                continue;
            }
            if let Ok(p) = curvature::ricci_point(&m_eps, t) {
                samples.push(p);
            }
        }
        let mut bound_verdicts = Vec::new();
        for &c in &cfg.c_list {
            let ok = samples.iter().all(|p| {
                let (ml, mm) = p.normalized_margins(c);
                ml >= 0.0 && mm >= 0.0
            });
            bound_verdicts.push(BoundEntry {
                c,
                satisfied_on_grid: ok,
            });
        }
        let bound_verdict = curvature::scan_uniform_bound(
            &profile,
            cfg.n,
            &[cfg.eps],
            &grid,
            &cfg.c_list,
        )?
        .verdict;
        let eps_grid: Vec<f64> = if cfg.eps > 0.0 {
            vec![cfg.eps]
        } else {
            std::iter::once(0.0)
                .chain((4..=20).map(|k| 2f64.powi(-k)))
                .collect()
        };
        let smoothing_scan =
            curvature::scan_uniform_bound(&profile, cfg.n, &eps_grid, &grid, &cfg.c_list)?;
        Ok::<RicciSection, radial_kahler::Error>(RicciSection {
            samples,
            bound_verdicts,
            bound_verdict,
            smoothing_scan,
        })
    })());

    let oracle_checks = Section::from_result((|| {
        let m = RadialMetric::new_unchecked(profile.clone(), cfg.n, cfg.eps);
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            let r = 0.1 + 0.12 * i as f64;
            let mut z = vec![Complex64::new(0.0, 0.0); cfg.n as usize];
            z[0] = Complex64::new(r * 0.8, r * 0.3);
            let rho2: f64 =
                z.iter().map(|v| v.norm_sqr()).sum::<f64>() + cfg.eps * cfg.eps;
            if m.profile().check_in_window(rho2.ln()).is_err() {
                continue;
            }
            let exact = m.metric_matrix(&z)?;
            let fd = oracle::fd_metric(&m, &z, 1e-3 * rho2.sqrt())?;
            worst = worst.max((&fd - &exact).norm() / exact.norm());
        }
        let fd_ricci_max_rel = if cfg.n == 2 {
            let mut worst_r: f64 = 0.0;
            for &t in &[-4.0, -7.0] {
                if cfg.eps > 0.0 && t <= (cfg.eps * cfg.eps).ln() {
                    continue;
                }
                if m.profile().check_in_window(t).is_err() {
                    continue;
                }
                let exact = curvature::ricci_point(&m, t)?;
                let (l, mu) = oracle::fd_ricci(&m, (t / 2.0f64).exp(), 1e-2)?;
                worst_r = worst_r
                    .max((l - exact.lambda).abs() / exact.lambda.abs().max(1e-3))
                    .max((mu - exact.mu).abs() / exact.mu.abs().max(1e-3));
            }
            Some(worst_r)
        } else {
            None
        };
        Ok::<OracleSection, radial_kahler::Error>(OracleSection {
            fd_metric_max_rel: worst,
            fd_ricci_max_rel,
        })
    })());

    Ok(AnalysisReport {
        profile: profile.name(),
        n: cfg.n,
        eps: cfg.eps,
        diameter,
        modulus,
        dini,
        condition_k,
        orlicz,
        ricci,
        oracle_checks,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash(),
    })
}

fn fit_exponent(samples: &[(f64, f64)]) -> f64 {
    if samples.len() < 2 {
        return f64::NAN;
    }
    let xs: Vec<f64> = samples.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, y)| *y).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    -(sxy / sxx)
}

/// Writes `report.json` and the CSV curves; returns the report path.
pub fn write_outputs(report: &AnalysisReport, out: &Path) -> Result<std::path::PathBuf, CliError> {
    let curves = out.join("curves");
    std::fs::create_dir_all(&curves)
        .map_err(|e| CliError::internal(&format!("cannot create {}: {e}", curves.display())))?;
    let path = out.join("report.json");
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::internal(&format!("serialize report: {e}")))?;
    std::fs::write(&path, json)
        .map_err(|e| CliError::internal(&format!("write {}: {e}", path.display())))?;

    let mut modulus_csv = String::from("param,class,value,error_estimate,diagnostics_ref\n");
    if let Some(m) = report.modulus.data() {
        for (x, y) in &m.samples {
            modulus_csv.push_str(&format!("{x},sample,{y},0,modulus.samples\n"));
        }
    }
    std::fs::write(curves.join("modulus.csv"), modulus_csv)
        .map_err(|e| CliError::internal(&format!("write modulus.csv: {e}")))?;

    let mut diam_csv = String::from("param,class,value,error_estimate,diagnostics_ref\n");
    if let Some(d) = report.diameter.data() {
        for w in &d.windows {
            diam_csv.push_str(&format!(
                "{},partial,{},{},diameter.windows\n",
                w.u_hi, w.partial, w.increment
            ));
        }
    }
    std::fs::write(curves.join("diameter_windows.csv"), diam_csv)
        .map_err(|e| CliError::internal(&format!("write diameter_windows.csv: {e}")))?;

    let mut ricci_csv = String::from("param,class,value,error_estimate,diagnostics_ref\n");
    if let Some(r) = report.ricci.data() {
        for p in &r.samples {
            let (ml, mm) = p.normalized_margins(0.0);
            ricci_csv.push_str(&format!(
                "{},margin,{},0,ricci.samples\n",
                p.t,
                ml.min(mm)
            ));
        }
    }
    std::fs::write(curves.join("ricci_margin.csv"), ricci_csv)
        .map_err(|e| CliError::internal(&format!("write ricci_margin.csv: {e}")))?;

    Ok(path)
}
