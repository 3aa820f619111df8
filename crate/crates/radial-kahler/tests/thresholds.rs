//! Threshold-location behavior on the example families: brackets land on
//! the known flip points and near-threshold parameters stay honest.

use radial_kahler::geometry::{dini_transform, ModulusConvention, RadialMetric};
use radial_kahler::integrability::{condition_k_radial, HWeight};
use radial_kahler::profile::Profile;
use radial_kahler::quadrature::{find_threshold, FlipDirection, VerdictClass, DEFAULT_TOL};

#[test]
fn family3_diameter_near_threshold_is_never_divergent() {
    // alpha = 1.02 converges (barely); the classifier may say Inconclusive
    // near the threshold but must not claim divergence
    let m = RadialMetric::new(Profile::family3(1.02).unwrap(), 2, 0.0).unwrap();
    let v = m.diameter(DEFAULT_TOL).unwrap();
    assert_ne!(v.class, VerdictClass::Divergent, "{v:?}");
}

#[test]
fn family2_dini_threshold_bracket() {
    let est = find_threshold(
        "alpha",
        |alpha| {
            let m = RadialMetric::new(Profile::family2(alpha)?, 2, 0.0)?;
            dini_transform(&m.modulus_fn(ModulusConvention::LogR)?, 0.5, DEFAULT_TOL)
        },
        1.0,
        4.0,
        0.05,
    )
    .unwrap();
    assert!(
        est.bracket.0 <= 2.0 && 2.0 <= est.bracket.1,
        "bracket {:?}",
        est.bracket
    );
    assert!(est.inconclusive_band.1 - est.inconclusive_band.0 <= 0.2);
    assert_eq!(est.flip, FlipDirection::ConvergesAbove);
}

#[test]
fn family3_diameter_threshold_bracket() {
    let est = find_threshold(
        "alpha",
        |alpha| RadialMetric::new(Profile::family3(alpha)?, 2, 0.0)?.diameter(DEFAULT_TOL),
        0.5,
        2.0,
        0.05,
    )
    .unwrap();
    assert!(
        est.bracket.0 <= 1.0 && 1.0 <= est.bracket.1,
        "bracket {:?}",
        est.bracket
    );
}

#[test]
fn family3_condition_k_threshold_bracket() {
    // flips at alpha = 1/n = 0.5 in dimension two
    let est = find_threshold(
        "alpha",
        |alpha| {
            condition_k_radial(
                &Profile::family3(alpha)?,
                2,
                &HWeight::default_power(),
                DEFAULT_TOL,
            )
        },
        0.1,
        2.0,
        0.05,
    )
    .unwrap();
    assert!(
        est.bracket.0 <= 0.5 && 0.5 <= est.bracket.1,
        "bracket {:?}",
        est.bracket
    );
}
