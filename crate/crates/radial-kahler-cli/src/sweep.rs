//! Parameter sweeps: one CSV row per grid point, computed in parallel with a
//! deterministic row order (output is byte-identical for any thread count).

use radial_kahler::curvature;
use radial_kahler::geometry::{dini_transform, RadialMetric};
use radial_kahler::integrability::{self, HWeight, WeightSpec};
use radial_kahler::profile::Profile;
use radial_kahler::quadrature::{IntegralVerdict, VerdictClass};
use rayon::prelude::*;

use crate::config::Config;
use crate::CliError;

fn class_str(c: VerdictClass) -> &'static str {
    match c {
        VerdictClass::Convergent => "convergent",
        VerdictClass::Divergent => "divergent",
        VerdictClass::Inconclusive => "inconclusive",
    }
}

fn verdict_row(param: f64, v: &IntegralVerdict) -> String {
    let value = v
        .value
        .map(|x| format!("{x}"))
        .unwrap_or_else(|| "".to_string());
    format!(
        "{param},{},{value},{},windows={};exponent={}\n",
        class_str(v.class),
        v.error_estimate,
        v.windows.len(),
        v.local_exponent
            .map(|e| format!("{e:.6}"))
            .unwrap_or_else(|| "na".to_string()),
    )
}

fn family_with_alpha(cfg: &Config, alpha: f64) -> Result<Profile, CliError> {
    let kind = cfg
        .profile
        .kind
        .as_deref()
        .ok_or_else(|| CliError::config("alpha sweeps need a family profile"))?;
    match kind {
        "family1" => Profile::family1(alpha),
        "family2" => Profile::family2(alpha),
        "family3" => Profile::family3(alpha),
        "family4" => Profile::family4(alpha),
        other => return Err(CliError::config(&format!("unknown profile kind `{other}`"))),
    }
    .map_err(CliError::module)
}

fn row_for(cfg: &Config, param: f64) -> Result<String, CliError> {
    let sweep = cfg.sweep.as_ref().expect("caller checked");
    let tol = cfg.tol;
    match (sweep.param.as_str(), sweep.quantity.as_str()) {
        ("alpha", "diameter") => {
            let m =
                RadialMetric::new(family_with_alpha(cfg, param)?, cfg.n, 0.0).map_err(CliError::module)?;
            Ok(verdict_row(param, &m.diameter(tol).map_err(CliError::module)?))
        }
        ("alpha", "dini") => {
            let m =
                RadialMetric::new(family_with_alpha(cfg, param)?, cfg.n, 0.0).map_err(CliError::module)?;
            let modulus = m
                .modulus_fn(cfg.modulus_convention.into())
                .map_err(CliError::module)?;
            Ok(verdict_row(
                param,
                &dini_transform(&modulus, 0.5, tol).map_err(CliError::module)?,
            ))
        }
        ("alpha", "condition_k") => {
            let v = integrability::condition_k_radial(
                &family_with_alpha(cfg, param)?,
                cfg.n,
                &HWeight::default_power(),
                tol,
            )
            .map_err(CliError::module)?;
            Ok(verdict_row(param, &v))
        }
        ("p", "orlicz_p") => {
            let profile = cfg.profile()?;
            let v = integrability::orlicz_radial(
                &profile,
                cfg.n,
                &WeightSpec::IteratedLog { n: cfg.n, p: param },
                tol,
            )
            .map_err(CliError::module)?;
            Ok(verdict_row(param, &v))
        }
        ("eps", "mu_min") => {
            let profile = cfg.profile()?;
            let m = RadialMetric::new_unchecked(profile.clone(), cfg.n, param);
            let lo = cfg.window[0].max(-1e8);
            let hi = cfg.window[1].min(profile.tail_anchor());
            let grid = curvature::log_t_grid((-hi).max(1e-2), (-lo).max(1.0), 64);
            let margin_at = |t: f64| -> f64 {
                if param > 0.0 && t <= (param * param).ln() {
                    return f64::INFINITY;
                }
                match curvature::ricci_point(&m, t) {
                    Ok(p) => p.normalized_margins(0.0).1,
                    Err(_) => f64::INFINITY,
                }
            };
            // coarse pass, then local refinement around the best point: the
            // minimum sits in a narrow transition zone the log grid alone
            // undersamples
            let mut best_t = grid[0];
            let mut min_margin = f64::INFINITY;
            for &t in &grid {
                let v = margin_at(t);
                if v < min_margin {
                    min_margin = v;
                    best_t = t;
                }
            }
            let mut width = (grid[1] - grid[0]).abs().max(best_t.abs() * 0.2);
            for _ in 0..4 {
                let lo_t = best_t - width;
                let hi_t = best_t + width;
                for i in 0..=32 {
                    let t = lo_t + (hi_t - lo_t) * i as f64 / 32.0;
                    let v = margin_at(t);
                    if v < min_margin {
                        min_margin = v;
                        best_t = t;
                    }
                }
                width /= 8.0;
            }
            Ok(format!("{param},margin,{min_margin},0,mu_over_psi_min\n"))
        }
        (p, q) => Err(CliError::config(&format!(
            "unsupported sweep param/quantity `{p}`/`{q}`"
        ))),
    }
}

/// Runs the sweep on `threads` rayon workers; rows are collected in grid
/// order, so the bytes do not depend on the thread count.
pub fn run_sweep(cfg: &Config, threads: usize) -> Result<String, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("config has no `sweep` section"))?;
    let grid = sweep.grid()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::internal(&format!("thread pool: {e}")))?;
    let rows: Vec<Result<String, CliError>> =
        pool.install(|| grid.par_iter().map(|&x| row_for(cfg, x)).collect());
    let mut out = String::from("param,class,value,error_estimate,diagnostics_ref\n");
    for r in rows {
        out.push_str(&r?);
    }
    Ok(out)
}
