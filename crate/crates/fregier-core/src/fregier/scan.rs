//! Parameter sweeps locating singular members of the closed-form locus
//! families.
//!
//! The determinant of the closed-form locus conic is evaluated over a grid.
//! Odd-multiplicity roots produce sign changes and are bisected; roots of
//! even multiplicity never change sign and are instead detected as local
//! minima of `|det|`, then refined by minimizing the smallest/largest
//! singular-value ratio of the locus matrix, which vanishes exactly at a
//! rank drop and behaves quadratically around it.

use nalgebra::Matrix3;
use rayon::prelude::*;

use super::families::FamilySpec;
use crate::{Error, Result};

/// Sweep request: which parameter to vary and the inclusive grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Parameter name (must belong to the family).
    pub param: String,
    /// Grid start.
    pub lo: f64,
    /// Grid end (inclusive up to rounding).
    pub hi: f64,
    /// Grid spacing (positive).
    pub step: f64,
}

/// One grid sample of the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    /// Parameter value.
    pub value: f64,
    /// Determinant of the closed-form locus conic there.
    pub det: f64,
    /// True when the value lies within one grid step of a refined root.
    pub singular: bool,
}

/// A refined root of the locus determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRoot {
    /// Refined parameter value.
    pub value: f64,
    /// False when the root falls outside the family's parameter domain.
    pub admissible: bool,
    /// True when the determinant does not change sign across the root.
    pub even_multiplicity: bool,
}

/// Rows plus refined roots of one sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    /// Grid samples in sweep order.
    pub rows: Vec<ScanRow>,
    /// Refined roots, ascending.
    pub roots: Vec<ScanRoot>,
}

fn sigma_ratio(m: &Matrix3<f64>) -> f64 {
    let sv = m.svd(false, false).singular_values;
    if sv[0] <= 1e-300 {
        return 0.0; // identically zero matrix: fully degenerate
    }
    sv[2] / sv[0]
}

/// Sweeps one parameter of a family and reports the (refined) parameter
/// values where the closed-form locus becomes singular. Roots outside the
/// family's admissible domain are reported with `admissible = false`. The
/// fixed parameters are domain-checked; the swept values are not restricted
/// (the determinant is a polynomial, evaluable everywhere).
pub fn singular_scan(spec: &FamilySpec, sweep: &SweepSpec) -> Result<ScanResult> {
    if !sweep.lo.is_finite() || !sweep.hi.is_finite() || !sweep.step.is_finite() {
        return Err(Error::DomainViolation("sweep bounds must be finite".into()));
    }
    if sweep.step <= 0.0 || sweep.lo >= sweep.hi {
        return Err(Error::DomainViolation(
            "sweep requires lo < hi and a positive step".into(),
        ));
    }
    if !spec.param_names().contains(&sweep.param.as_str()) {
        return Err(Error::DomainViolation(format!(
            "family {:?} takes no parameter {:?}",
            spec.family_name(),
            sweep.param
        )));
    }
    spec.domain_check(Some(&sweep.param))?;

    let count = ((sweep.hi - sweep.lo) / sweep.step + 1e-9).floor() as usize + 1;
    let values: Vec<f64> = (0..count).map(|k| sweep.lo + k as f64 * sweep.step).collect();
    let det_at = |v: f64| -> f64 {
        spec.with_param(&sweep.param, v)
            .expect("validated parameter name")
            .closed_form_matrix()
            .determinant()
    };
    let ratio_at = |v: f64| -> f64 {
        sigma_ratio(
            &spec
                .with_param(&sweep.param, v)
                .expect("validated parameter name")
                .closed_form_matrix(),
        )
    };
    let dets: Vec<f64> = values.par_iter().map(|&v| det_at(v)).collect();
    let scale = dets.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-300);

    // Odd-multiplicity roots: bisection on sign changes.
    let mut odd_roots: Vec<f64> = Vec::new();
    for i in 0..values.len() - 1 {
        let (d1, d2) = (dets[i], dets[i + 1]);
        if d1 == 0.0 || d2 == 0.0 || d1.signum() == d2.signum() {
            continue;
        }
        let (mut a, mut b) = (values[i], values[i + 1]);
        let mut fa = d1;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break; // interval at floating-point resolution
            }
            let fm = det_at(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fa.signum() == fm.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        odd_roots.push(0.5 * (a + b));
    }

    // Even-multiplicity roots (and exact grid hits): local minima of |det|
    // below threshold, refined on the singular-value ratio.
    let cand_thresh = 1e-6 * scale;
    let mut even_roots: Vec<f64> = Vec::new();
    for i in 0..values.len() {
        let d = dets[i].abs();
        let left_ok = i == 0 || d <= dets[i - 1].abs();
        let right_ok = i + 1 == values.len() || d <= dets[i + 1].abs();
        if !(left_ok && right_ok && d <= cand_thresh) {
            continue;
        }
        // Golden-section minimization of the singular-value ratio.
        let phi = 0.5 * (5.0f64.sqrt() - 1.0);
        let (mut a, mut b) = (values[i] - sweep.step, values[i] + sweep.step);
        let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
        let (mut f1, mut f2) = (ratio_at(x1), ratio_at(x2));
        for _ in 0..120 {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = ratio_at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = ratio_at(x2);
            }
        }
        let mut v0 = 0.5 * (a + b);
        // Parabola-vertex polish: the ratio is locally quadratic in the
        // parameter, so the fitted vertex localizes the root more tightly
        // than the golden-section bracket.
        for delta in [1e-5, 1e-7, 1e-9] {
            let (gm, g0, gp) = (ratio_at(v0 - delta), ratio_at(v0), ratio_at(v0 + delta));
            let denom = gp - 2.0 * g0 + gm;
            if denom.abs() > 1e-300 {
                let shift = 0.5 * delta * (gm - gp) / denom;
                if shift.abs() < delta * 2.0 {
                    v0 += shift;
                }
            }
        }
        // The grid sample frequently IS the root (families built from small
        // integers go exactly singular there); keep whichever localization
        // has the smaller ratio rather than trusting refinement blindly.
        let (rv, rg) = (ratio_at(v0), ratio_at(values[i]));
        let (v_best, r_best) = if rg <= rv { (values[i], rg) } else { (v0, rv) };
        if r_best <= 1e-8 {
            even_roots.push(v_best);
        }
    }

    // Merge, preferring bisection roots (tighter) over ratio-refined ones.
    let mut roots: Vec<(f64, bool)> = Vec::new(); // (value, from_bisection)
    for r in odd_roots {
        roots.push((r, true));
    }
    for r in even_roots {
        roots.push((r, false));
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < roots.len() {
        let mut j = i;
        let mut best = roots[i];
        while j + 1 < roots.len() && roots[j + 1].0 - roots[i].0 <= 1e-6 * (1.0 + roots[i].0.abs())
        {
            j += 1;
            if roots[j].1 && !best.1 {
                best = roots[j];
            }
        }
        if best.0 >= sweep.lo - 1e-9 && best.0 <= sweep.hi + 1e-9 {
            merged.push(best.0);
        }
        i = j + 1;
    }

    let roots: Vec<ScanRoot> = merged
        .into_iter()
        .map(|r| {
            let bound = spec.with_param(&sweep.param, r).expect("validated parameter name");
            let margin_ok = spec
                .excluded_values(&sweep.param)
                .iter()
                .all(|e| (r - e).abs() > 1e-6);
            let admissible = bound.validate().is_ok() && margin_ok;
            let before = det_at(r - sweep.step);
            let after = det_at(r + sweep.step);
            let even_multiplicity =
                before != 0.0 && after != 0.0 && before.signum() == after.signum();
            ScanRoot { value: r, admissible, even_multiplicity }
        })
        .collect();

    let rows: Vec<ScanRow> = values
        .iter()
        .zip(&dets)
        .map(|(&v, &d)| ScanRow {
            value: v,
            det: d,
            singular: roots.iter().any(|r| (v - r.value).abs() <= sweep.step),
        })
        .collect();

    Ok(ScanResult { rows, roots })
}
