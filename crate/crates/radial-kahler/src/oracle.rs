//! Independent brute-force verifiers for the closed-form paths: central
//! finite differences for the metric and Ricci data, shortest paths on
//! annulus meshes for distances, and a registry of integrals with stored
//! antiderivatives for the quadrature engine.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RadialMetric;

/// Evaluates the potential `v(z) = chi(log(|z|^2 + eps^2))` at a real point
/// of C^n given as `(x_1, y_1, ..., x_n, y_n)`.
fn potential(m: &RadialMetric, xy: &[f64]) -> Result<f64> {
    let rho2: f64 = xy.iter().map(|v| v * v).sum::<f64>() + m.eps() * m.eps();
    Ok(m.profile().jet(rho2.ln(), 0)?.value())
}

/// Complex Hessian `d^2 v / dz_i dzbar_j` by second-order central
/// differences in the 2n real coordinates:
///
/// ```text
/// 4 dz_i dzbar_j = (dx_i dx_j + dy_i dy_j) + i (dx_i dy_j - dy_i dx_j)
/// ```
fn complex_hessian_fd(m: &RadialMetric, z: &[Complex64], h: f64) -> Result<DMatrix<Complex64>> {
    let n = z.len();
    let mut xy = Vec::with_capacity(2 * n);
    for v in z {
        xy.push(v.re);
        xy.push(v.im);
    }
    let v0 = potential(m, &xy)?;
    // second derivative in one real coordinate
    let d2 = |xy: &[f64], a: usize| -> Result<f64> {
        let mut p = xy.to_vec();
        p[a] += h;
        let vp = potential(m, &p)?;
        p[a] -= 2.0 * h;
        let vm = potential(m, &p)?;
        Ok((vp - 2.0 * v0 + vm) / (h * h))
    };
    // mixed derivative in two distinct real coordinates
    let dmix = |xy: &[f64], a: usize, b: usize| -> Result<f64> {
        let mut p = xy.to_vec();
        let mut s = 0.0;
        for (sa, sb, sign) in [
            (1.0, 1.0, 1.0),
            (1.0, -1.0, -1.0),
            (-1.0, 1.0, -1.0),
            (-1.0, -1.0, 1.0),
        ] {
            p.copy_from_slice(&xy[..]);
            p[a] += sa * h;
            p[b] += sb * h;
            s += sign * potential(m, &p)?;
        }
        Ok(s / (4.0 * h * h))
    };
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            let dxx = if xi == xj { d2(&xy, xi)? } else { dmix(&xy, xi, xj)? };
            let dyy = if yi == yj { d2(&xy, yi)? } else { dmix(&xy, yi, yj)? };
            let dxy = dmix(&xy, xi, yj)?;
            let dyx = if yi == xj {
                d2(&xy, yi)?
            } else {
                dmix(&xy, yi, xj)?
            };
            out[(i, j)] = Complex64::new((dxx + dyy) / 4.0, (dxy - dyx) / 4.0);
        }
    }
    Ok(out)
}

/// Finite-difference metric matrix with one Richardson step (`h`, `h/2`).
///
/// Matches the closed-form matrix to `O(h^4)` on smooth points.
pub fn fd_metric(m: &RadialMetric, z: &[Complex64], h_step: f64) -> Result<DMatrix<Complex64>> {
    let coarse = complex_hessian_fd(m, z, h_step)?;
    let fine = complex_hessian_fd(m, z, h_step / 2.0)?;
    Ok(fine.map(|x| x * Complex64::new(4.0 / 3.0, 0.0))
        - coarse.map(|x| x * Complex64::new(1.0 / 3.0, 0.0)))
}

fn det2(h: &DMatrix<Complex64>) -> f64 {
    (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]).re
}

/// Finite-difference Ricci eigenvalues on the n = 2 slice.
///
/// Computes `phi = log det H_fd` by nested differencing and extracts
/// `(lambda_hat, mu_hat) = (|z|^2 + eps^2) * (-d^2 phi / dz_2 dzbar_2,
/// -d^2 phi / dz_1 dzbar_1)` at the U(2)-normalized point `z = (r, 0)`,
/// where the radial direction is the first coordinate axis.
pub fn fd_ricci(m: &RadialMetric, r: f64, h_step: f64) -> Result<(f64, f64)> {
    if m.n() != 2 {
        return Err(Error::Domain(
            "the finite-difference Ricci oracle runs on the n = 2 slice".into(),
        ));
    }
    if !(r > 0.0) {
        return Err(Error::Domain("need r > 0".into()));
    }
    let rho2 = r * r + m.eps() * m.eps();
    let h_inner = h_step * rho2.sqrt();

    let phi = |xy4: &[f64; 4]| -> Result<f64> {
        let z = [
            Complex64::new(xy4[0], xy4[1]),
            Complex64::new(xy4[2], xy4[3]),
        ];
        let h = fd_metric(m, &z, h_inner)?;
        let d = det2(&h);
        if !(d > 1e-300) || !d.is_finite() {
            return Err(Error::IllConditioned(format!(
                "det H = {d} at |z| = {:.3e}",
                (z[0].norm_sqr() + z[1].norm_sqr()).sqrt()
            )));
        }
        Ok(d.ln())
    };

    // -d^2 phi / dz_k dzbar_k = -(phi_xx + phi_yy)/4 in coordinate k,
    // with one outer Richardson step
    let second_pair = |k: usize, ho: f64| -> Result<f64> {
        let base = [r, 0.0, 0.0, 0.0];
        let axis = |idx: usize, delta: f64| -> [f64; 4] {
            let mut p = base;
            p[idx] += delta;
            p
        };
        let p0 = phi(&base)?;
        let (xi, yi) = (2 * k, 2 * k + 1);
        let dxx = (phi(&axis(xi, ho))? - 2.0 * p0 + phi(&axis(xi, -ho))?) / (ho * ho);
        let dyy = (phi(&axis(yi, ho))? - 2.0 * p0 + phi(&axis(yi, -ho))?) / (ho * ho);
        Ok(-(dxx + dyy) / 4.0)
    };
    let richardson = |k: usize| -> Result<f64> {
        let ho = 8.0 * h_inner;
        let coarse = second_pair(k, ho)?;
        let fine = second_pair(k, ho / 2.0)?;
        Ok((4.0 * fine - coarse) / 3.0)
    };

    let mu_hat = rho2 * richardson(0)?;
    let lambda_hat = rho2 * richardson(1)?;
    Ok((lambda_hat, mu_hat))
}

/// A 2D slice mesh of the annulus `r_in <= r <= r_out` in the ray-length
/// normalization: radial steps weigh `2 sqrt(chi''(log r^2))/r dr`, angular
/// steps `sqrt(chi'(log r^2)) dphi` for n >= 2 (the totally geodesic
/// (r, one-angle) slice) and `2 sqrt(chi''(log r^2)) dphi` for n = 1
/// (conformal circle direction). Edge weights are midpoint metric lengths
/// of straight parameter segments; 8-neighbor connectivity.
#[derive(Debug, Clone)]
pub struct AnnulusMesh {
    n_r: usize,
    n_phi: usize,
    radii: Vec<f64>,
    phis: Vec<f64>,
    /// adjacency: (neighbor index, weight)
    edges: Vec<Vec<(usize, f64)>>,
}

impl AnnulusMesh {
    /// Builds the mesh at a refinement level: level 0 has 16 radial
    /// intervals and 16 angular nodes; each level halves both spacings.
    pub fn new(m: &RadialMetric, r_in: f64, r_out: f64, refinement: u32) -> Result<Self> {
        if !(0.0 < r_in && r_in < r_out) {
            return Err(Error::Domain(format!(
                "invalid annulus [{r_in}, {r_out}]"
            )));
        }
        if m.eps() != 0.0 {
            return Err(Error::Domain("the mesh oracle runs at eps = 0".into()));
        }
        let n_r = 16 * 2usize.pow(refinement) + 1;
        let n_phi = 16 * 2usize.pow(refinement);
        let radii: Vec<f64> = (0..n_r)
            .map(|i| {
                let frac = i as f64 / (n_r - 1) as f64;
                r_in * (r_out / r_in).powf(frac)
            })
            .collect();
        let phis: Vec<f64> = (0..n_phi)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64)
            .collect();

        let g_rr = |r: f64| -> Result<f64> {
            let c2 = m.profile().jet(2.0 * r.ln(), 2)?.deriv(2);
            Ok(4.0 * c2 / (r * r))
        };
        let g_pp = |r: f64| -> Result<f64> {
            let j = m.profile().jet(2.0 * r.ln(), 2)?;
            Ok(if m.n() >= 2 {
                j.deriv(1)
            } else {
                4.0 * j.deriv(2)
            })
        };

        let idx = |i: usize, j: usize| i * n_phi + j;
        let mut edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_r * n_phi];
        let mut connect = |ia: usize, ja: usize, ib: usize, jb: usize| -> Result<()> {
            let (ra, rb) = (radii[ia], radii[ib]);
            let pa = phis[ja];
            let pb = phis[jb];
            let mut dphi = (pb - pa).abs();
            if dphi > std::f64::consts::PI {
                dphi = 2.0 * std::f64::consts::PI - dphi;
            }
            let rm = 0.5 * (ra + rb);
            let dr = rb - ra;
            let w2 = g_rr(rm)? * dr * dr + g_pp(rm)? * dphi * dphi;
            if !(w2 > 0.0) || !w2.is_finite() {
                return Err(Error::Domain(format!(
                    "non-positive edge weight near r = {rm}"
                )));
            }
            let w = w2.sqrt();
            edges[idx(ia, ja)].push((idx(ib, jb), w));
            edges[idx(ib, jb)].push((idx(ia, ja), w));
            Ok(())
        };
        for i in 0..n_r {
            for j in 0..n_phi {
                let jn = (j + 1) % n_phi;
                connect(i, j, i, jn)?;
                if i + 1 < n_r {
                    connect(i, j, i + 1, j)?;
                    connect(i, j, i + 1, jn)?;
                    connect(i + 1, j, i, jn)?;
                }
            }
        }
        Ok(AnnulusMesh {
            n_r,
            n_phi,
            radii,
            phis,
            edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n_r * self.n_phi
    }

    /// Node index nearest to `(r, phi)`.
    pub fn nearest_node(&self, r: f64, phi: f64) -> usize {
        let i = self
            .radii
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - r).abs().total_cmp(&(b.1 - r).abs()))
            .map(|(i, _)| i)
            .unwrap();
        let phi = phi.rem_euclid(2.0 * std::f64::consts::PI);
        let j = self
            .phis
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - phi).abs().total_cmp(&(b.1 - phi).abs()))
            .map(|(j, _)| j)
            .unwrap();
        i * self.n_phi + j
    }
}

/// Dijkstra shortest-path length between two mesh nodes.
pub fn graph_geodesic(mesh: &AnnulusMesh, from: usize, to: usize) -> Result<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Dist(f64);
    impl Eq for Dist {}
    impl PartialOrd for Dist {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Dist {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }

    let n = mesh.node_count();
    if from >= n || to >= n {
        return Err(Error::Domain("node index out of range".into()));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(Reverse((Dist(0.0), from)));
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if u == to {
            return Ok(d);
        }
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &mesh.edges[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Dist(nd), v)));
            }
        }
    }
    Err(Error::DisconnectedMesh)
}

/// Registry of integrals with stored antiderivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadCase {
    /// `int_{-inf}^0 alpha e^{alpha s/2} ds = 2` (the first-family ray).
    Family1Ray { alpha: f64 },
    /// `int_0^r t^{alpha/2 - 1} dt = (2/alpha) r^{alpha/2}` (Dini transform
    /// of the power modulus `m(t) = t^alpha`).
    DiniOfPower { alpha: f64, r: f64 },
    /// `int_{-inf}^{T} dt / (|t| (log(-t))^{(alpha+1)/2})
    ///  = (2/(alpha-1)) (log(-T))^{-(alpha-1)/2}` (the third-family
    /// diameter-criterion tail).
    Family3Tail { alpha: f64, t_end: f64 },
}

/// Value of a registry case from its antiderivative.
pub fn quad_reference(case: QuadCase) -> Result<f64> {
    match case {
        QuadCase::Family1Ray { alpha } => {
            if alpha <= 0.0 {
                return Err(Error::UnknownCase(format!("family1_ray(alpha={alpha})")));
            }
            // antiderivative 2 e^{alpha s / 2}, limits -inf and 0
            Ok(2.0)
        }
        QuadCase::DiniOfPower { alpha, r } => {
            if alpha <= 0.0 || !(0.0 < r && r <= 1.0) {
                return Err(Error::UnknownCase(format!(
                    "dini_of_power(alpha={alpha}, r={r})"
                )));
            }
            Ok((2.0 / alpha) * r.powf(alpha / 2.0))
        }
        QuadCase::Family3Tail { alpha, t_end } => {
            if alpha <= 1.0 || !(t_end < -1.0) {
                return Err(Error::UnknownCase(format!(
                    "family3_tail(alpha={alpha}, t_end={t_end})"
                )));
            }
            let u = (-t_end).ln();
            Ok((2.0 / (alpha - 1.0)) * u.powf(-(alpha - 1.0) / 2.0))
        }
    }
}

/// Classifies/evaluates a registry case through the quadrature engine
/// (the non-oracle route), for agreement checks.
pub fn quad_case_via_engine(case: QuadCase, tol: f64) -> Result<f64> {
    use crate::quadrature::{self, Integrand, TailPoint};
    match case {
        QuadCase::Family1Ray { alpha } => {
            let f = move |s: f64| alpha * (alpha * s / 2.0).exp();
            let v = quadrature::integrate_improper(&f, 0.0, tol)?;
            v.value.ok_or_else(|| Error::Domain(format!("not convergent: {:?}", v.class)))
        }
        QuadCase::DiniOfPower { alpha, r } => {
            let f = move |t: f64| t.powf(alpha / 2.0 - 1.0);
            let hints = quadrature::EndpointHints {
                lower: Some(alpha / 2.0 - 1.0),
                upper: None,
            };
            let (v, _) = quadrature::integrate_proper(&f, 0.0, r, tol, hints)?;
            Ok(v)
        }
        QuadCase::Family3Tail { alpha, t_end } => {
            struct F {
                ex: f64,
            }
            impl Integrand for F {
                fn value(&self, p: &TailPoint) -> f64 {
                    self.ln_value(p).unwrap().exp()
                }
                fn ln_value(&self, p: &TailPoint) -> Option<f64> {
                    Some(-p.ln_neg_t - self.ex * p.ln_neg_t.ln())
                }
            }
            let f = F {
                ex: (alpha + 1.0) / 2.0,
            };
            let v = quadrature::integrate_improper(&f, t_end, tol)?;
            v.value.ok_or_else(|| Error::Domain(format!("not convergent: {:?}", v.class)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_err(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        let diff = (a - b).norm();
        diff / b.norm()
    }

    #[test]
    fn fd_metric_flat_is_identity() {
        let m = RadialMetric::new(Profile::family1(1.0).unwrap(), 1, 0.0).unwrap();
        let h = fd_metric(&m, &[c(0.5, 0.0)], 1e-3).unwrap();
        assert!((h[(0, 0)].re - 1.0).abs() < 1e-6, "{:?}", h[(0, 0)]);
    }

    #[test]
    fn fd_metric_matches_closed_form_at_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let profiles = [
            Profile::family1(0.8).unwrap(),
            Profile::family2(1.2).unwrap(),
            Profile::family3(2.0).unwrap(),
        ];
        let mut checked = 0;
        while checked < 20 {
            let p = &profiles[rng.gen_range(0..profiles.len())];
            let n = rng.gen_range(1..=3u32);
            let eps = if rng.gen_bool(0.5) { 0.0 } else { 0.1 };
            let m = RadialMetric::new(p.clone(), n, eps).unwrap();
            let z: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)))
                .collect();
            let rho2: f64 = z.iter().map(|v| v.norm_sqr()).sum::<f64>() + eps * eps;
            if rho2 < 1e-3 || m.profile().check_in_window(rho2.ln()).is_err() {
                continue;
            }
            let exact = m.metric_matrix(&z).unwrap();
            let fd = fd_metric(&m, &z, 1e-3 * rho2.sqrt()).unwrap();
            let err = rel_err(&fd, &exact);
            assert!(err < 1e-5, "rel err {err} for {} n={n} eps={eps}", p.name());
            checked += 1;
        }
    }

    #[test]
    fn fd_metric_center_is_isotropic() {
        let m = RadialMetric::new(Profile::family2(1.0).unwrap(), 2, 0.1).unwrap();
        let h = fd_metric(&m, &[c(0.0, 0.0), c(0.0, 0.0)], 1e-4).unwrap();
        assert_relative_eq!(h[(0, 0)].re, h[(1, 1)].re, max_relative = 1e-8);
        assert!(h[(0, 1)].norm() < 1e-8 * h[(0, 0)].re);
    }

    #[test]
    fn richardson_error_ratio_is_fourth_order_like() {
        // fd_metric uses an h, h/2 Richardson pair of an O(h^2) scheme;
        // the combined error drops ~16x when h halves (order 4). Accept a
        // broad band around the asymptotic ratio.
        let m = RadialMetric::new(Profile::family2(1.0).unwrap(), 2, 0.0).unwrap();
        let z = [c(0.4, 0.1), c(-0.2, 0.3)];
        let exact = m.metric_matrix(&z).unwrap();
        let e1 = rel_err(&fd_metric(&m, &z, 4e-2).unwrap(), &exact);
        let e2 = rel_err(&fd_metric(&m, &z, 2e-2).unwrap(), &exact);
        let ratio = e1 / e2;
        assert!(ratio > 8.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn plain_central_scheme_error_ratio_is_four() {
        // the raw (non-Richardson) complex Hessian is the order-2 scheme:
        // halving h divides the error by 4 +- 0.5
        let m = RadialMetric::new(Profile::family2(1.0).unwrap(), 2, 0.0).unwrap();
        let z = [c(0.4, 0.1), c(-0.2, 0.3)];
        let exact = m.metric_matrix(&z).unwrap();
        let e1 = rel_err(&complex_hessian_fd(&m, &z, 2e-2).unwrap(), &exact);
        let e2 = rel_err(&complex_hessian_fd(&m, &z, 1e-2).unwrap(), &exact);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn fd_ricci_family1_recovers_constants() {
        // (lambda, mu) = (n(1-alpha), 0)
        let m = RadialMetric::new(Profile::family1(0.5).unwrap(), 2, 0.0).unwrap();
        let (l, mu) = fd_ricci(&m, 0.4, 1e-2).unwrap();
        assert!((l - 1.0).abs() < 1e-4, "lambda {l}");
        assert!(mu.abs() < 1e-4, "mu {mu}");
    }

    #[test]
    fn fd_ricci_family2_closed_form() {
        // mu = -(n alpha + n + 1)/t^2 at n=2, alpha=1
        let m = RadialMetric::new(Profile::family2(1.0).unwrap(), 2, 0.0).unwrap();
        let t = -10.0f64;
        let r = (t / 2.0).exp();
        let (l, mu) = fd_ricci(&m, r, 1e-2).unwrap();
        let p = crate::curvature::ricci_point(&m, t).unwrap();
        assert!((l - p.lambda).abs() / p.lambda.abs() < 1e-3, "{l} vs {}", p.lambda);
        assert!((mu - p.mu).abs() / p.mu.abs() < 1e-3, "{mu} vs {}", p.mu);
        assert!((mu - (-5.0 / (t * t))).abs() / (5.0 / (t * t)) < 1e-3);
    }

    #[test]
    fn fd_ricci_degenerate_profile_is_ill_conditioned() {
        // chi(t) = t gives chi'' = 0: det H = 0 on the slice
        let p = Profile::parse("t", std::collections::BTreeMap::new()).unwrap();
        let m = RadialMetric::new_unchecked(p, 2, 0.0);
        match fd_ricci(&m, 0.3, 1e-2) {
            Err(Error::IllConditioned(_)) => {}
            other => panic!("expected IllConditioned, got {other:?}"),
        }
    }

    #[test]
    fn graph_geodesic_collinear_matches_radial_distance() {
        let m = RadialMetric::new(Profile::family3(2.0).unwrap(), 2, 0.0).unwrap();
        let (r1, r2) = (0.02, 0.2);
        let exact = m.radial_distance(r1, r2, 1e-10).unwrap();
        let mesh = AnnulusMesh::new(&m, r1, r2, 4).unwrap();
        let a = mesh.nearest_node(r1, 0.0);
        let b = mesh.nearest_node(r2, 0.0);
        let d = graph_geodesic(&mesh, a, b).unwrap();
        assert!(
            (d - exact).abs() / exact < 0.02,
            "graph {d} vs exact {exact}"
        );
    }

    #[test]
    fn graph_geodesic_flat_collinear() {
        // family1(1): ray length in this normalization is 2 (r2 - r1)
        let m = RadialMetric::new(Profile::family1(1.0).unwrap(), 2, 0.0).unwrap();
        let (r1, r2) = (0.1, 0.5);
        let mesh = AnnulusMesh::new(&m, r1, r2, 3).unwrap();
        let d = graph_geodesic(
            &mesh,
            mesh.nearest_node(r1, 0.0),
            mesh.nearest_node(r2, 0.0),
        )
        .unwrap();
        assert!((d - 0.8).abs() / 0.8 < 0.01, "d = {d}");
        let same = mesh.nearest_node(0.3, 1.0);
        assert_eq!(graph_geodesic(&mesh, same, same).unwrap(), 0.0);
    }

    #[test]
    fn mesh_error_decreases_under_refinement() {
        let m = RadialMetric::new(Profile::family3(2.0).unwrap(), 2, 0.0).unwrap();
        let (r1, r2) = (0.02, 0.2);
        let exact = m.radial_distance(r1, r2, 1e-10).unwrap();
        let mut prev = f64::INFINITY;
        for level in 0..=3u32 {
            let mesh = AnnulusMesh::new(&m, r1, r2, level).unwrap();
            let d = graph_geodesic(
                &mesh,
                mesh.nearest_node(r1, 0.0),
                mesh.nearest_node(r2, 0.0),
            )
            .unwrap();
            let err = (d - exact).abs();
            assert!(err <= prev + 1e-12, "level {level}: {err} > {prev}");
            prev = err;
        }
    }

    #[test]
    fn path_upper_bounds_graph_geodesic() {
        // the composite-path bound cannot undercut the mesh geodesic by more
        // than the mesh error
        let m = RadialMetric::new(Profile::family2(1.0).unwrap(), 2, 0.0).unwrap();
        let (r1, r2) = (0.05, 0.3);
        let mesh = AnnulusMesh::new(&m, r1, 0.9, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let phi = rng.gen_range(0.0..std::f64::consts::PI);
            let x = [c(r1, 0.0), c(0.0, 0.0)];
            let y = [c(r2 * phi.cos(), 0.0), c(r2 * phi.sin(), 0.0)];
            let upper = m.path_distance_upper(&x, &y).unwrap();
            let d = graph_geodesic(
                &mesh,
                mesh.nearest_node(r1, 0.0),
                mesh.nearest_node(r2, phi),
            )
            .unwrap();
            assert!(upper >= d - 0.05 * d, "upper {upper} vs graph {d}");
        }
    }

    #[test]
    fn quad_reference_values() {
        assert_relative_eq!(quad_reference(QuadCase::Family1Ray { alpha: 3.0 }).unwrap(), 2.0);
        assert_relative_eq!(
            quad_reference(QuadCase::DiniOfPower { alpha: 1.0, r: 1.0 }).unwrap(),
            2.0
        );
        // (2/(alpha-1)) (log(-T))^{-(alpha-1)/2} at alpha=3, T=-e^10 -> 0.1
        let v = quad_reference(QuadCase::Family3Tail {
            alpha: 3.0,
            t_end: -(10f64).exp(),
        })
        .unwrap();
        assert_relative_eq!(v, 0.1, max_relative = 1e-14);
        assert!(quad_reference(QuadCase::Family3Tail { alpha: 0.5, t_end: -10.0 }).is_err());
    }

    #[test]
    fn engine_agrees_with_registry() {
        let cases = [
            QuadCase::Family1Ray { alpha: 0.5 },
            QuadCase::Family1Ray { alpha: 3.0 },
            QuadCase::DiniOfPower { alpha: 1.0, r: 1.0 },
            QuadCase::DiniOfPower { alpha: 2.0, r: 0.5 },
            QuadCase::Family3Tail {
                alpha: 3.0,
                t_end: -(10f64).exp(),
            },
            QuadCase::Family3Tail {
                alpha: 2.0,
                t_end: -(8f64).exp(),
            },
        ];
        for case in cases {
            let reference = quad_reference(case).unwrap();
            let engine = quad_case_via_engine(case, 1e-9).unwrap();
            assert!(
                (engine - reference).abs() / reference.abs() < 1e-8,
                "{case:?}: engine {engine} vs reference {reference}"
            );
        }
    }
}
