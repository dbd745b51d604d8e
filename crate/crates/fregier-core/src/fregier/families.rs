//! Canonical conic families with closed-form Frégier loci.
//!
//! Each family fixes a geometry, a one- or two-parameter canonical conic,
//! and the closed-form coefficients of its Frégier locus. The closed forms
//! are validated against [`locus_fit`](super::locus_fit) by the test suite;
//! several published versions of these formulas contain typographical
//! errors, and the forms below are the oracle-confirmed ones (see the
//! repository's ERRATA document).

use std::collections::BTreeMap;

use nalgebra::Matrix3;

use super::{degenerate_shape, real_range, LocusResult, LocusShape, LocusSource, FIT_TOL};
use crate::conic::{rank_classify, Conic};
use crate::metric::Geometry;
use crate::projective::Tol;
use crate::{Error, Result};

/// A canonical family member: tag plus bound parameter values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilySpec {
    /// Euclidean central conic `b·x1² + a·x2² = x0²`.
    EuGeneral { a: f64, b: f64 },
    /// Euclidean parabola `x0·x2 = a·x1²`.
    EuParabola { a: f64 },
    /// Hyperbolic conic `x1²/a² + x2²/b² = x0²` (semi-axes `a`, `b`).
    HyGeneral { a: f64, b: f64 },
    /// Hyperbolic conic with simple contact to the absolute at `[1,−1,0]`:
    /// `λ·(x1²+x2²−x0²) + (x0+x1)·(μ·(x0+x1) + x1)`.
    HyParabola { lambda: f64, mu: f64 },
    /// Hyperbolic conic osculating the absolute:
    /// `λ·(x1²+x2²−x0²) + (x0+x1)·x2`.
    HyOscParabola { lambda: f64 },
    /// Hyperbolic circle with real tangency points `[1,±1,0]`:
    /// `λ·(x1²+x2²−x0²) + x1² − x0²`.
    HyCircleReal { lambda: f64 },
    /// Hyperbolic circle with complex tangency points:
    /// `λ·(x1²+x2²−x0²) + x1² + x2²`.
    HyCircleComplex { lambda: f64 },
    /// Horocycle, hyperosculating the absolute at `[1,0,1]`:
    /// `λ·(x1²+x2²−x0²) + (x2−x0)²`.
    HyHorocycle { lambda: f64 },
    /// Elliptic conic `x1²/a² + x2²/b² = x0²` (semi-axes `a`, `b`).
    ElGeneral { a: f64, b: f64 },
}

/// Family tags in a fixed order, as accepted by [`FamilySpec::from_name`].
pub const FAMILY_NAMES: [&str; 9] = [
    "eu_general",
    "eu_parabola",
    "hy_general",
    "hy_parabola",
    "hy_osc_parabola",
    "hy_circle_real",
    "hy_circle_complex",
    "hy_horocycle",
    "el_general",
];

fn need(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::DomainViolation(format!("missing parameter {key:?}")))
}

impl FamilySpec {
    /// Builds a family member from its tag and a parameter map. Every
    /// parameter the family uses must be present; unknown keys are rejected.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<FamilySpec> {
        let spec = match name {
            "eu_general" => FamilySpec::EuGeneral { a: need(params, "a")?, b: need(params, "b")? },
            "eu_parabola" => FamilySpec::EuParabola { a: need(params, "a")? },
            "hy_general" => FamilySpec::HyGeneral { a: need(params, "a")?, b: need(params, "b")? },
            "hy_parabola" => FamilySpec::HyParabola {
                lambda: need(params, "lambda")?,
                mu: need(params, "mu")?,
            },
            "hy_osc_parabola" => FamilySpec::HyOscParabola { lambda: need(params, "lambda")? },
            "hy_circle_real" => FamilySpec::HyCircleReal { lambda: need(params, "lambda")? },
            "hy_circle_complex" => FamilySpec::HyCircleComplex { lambda: need(params, "lambda")? },
            "hy_horocycle" => FamilySpec::HyHorocycle { lambda: need(params, "lambda")? },
            "el_general" => FamilySpec::ElGeneral { a: need(params, "a")?, b: need(params, "b")? },
            other => {
                return Err(Error::DomainViolation(format!("unknown family {other:?}")));
            }
        };
        for key in params.keys() {
            if !spec.param_names().contains(&key.as_str()) {
                return Err(Error::DomainViolation(format!(
                    "family {name:?} takes no parameter {key:?}"
                )));
            }
        }
        Ok(spec)
    }

    /// The family's tag.
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilySpec::EuGeneral { .. } => "eu_general",
            FamilySpec::EuParabola { .. } => "eu_parabola",
            FamilySpec::HyGeneral { .. } => "hy_general",
            FamilySpec::HyParabola { .. } => "hy_parabola",
            FamilySpec::HyOscParabola { .. } => "hy_osc_parabola",
            FamilySpec::HyCircleReal { .. } => "hy_circle_real",
            FamilySpec::HyCircleComplex { .. } => "hy_circle_complex",
            FamilySpec::HyHorocycle { .. } => "hy_horocycle",
            FamilySpec::ElGeneral { .. } => "el_general",
        }
    }

    /// Names of the parameters this family takes.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FamilySpec::EuGeneral { .. }
            | FamilySpec::HyGeneral { .. }
            | FamilySpec::ElGeneral { .. } => &["a", "b"],
            FamilySpec::EuParabola { .. } => &["a"],
            FamilySpec::HyParabola { .. } => &["lambda", "mu"],
            FamilySpec::HyOscParabola { .. }
            | FamilySpec::HyCircleReal { .. }
            | FamilySpec::HyCircleComplex { .. }
            | FamilySpec::HyHorocycle { .. } => &["lambda"],
        }
    }

    /// Current parameter bindings in declaration order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            FamilySpec::EuGeneral { a, b } => vec![("a", a), ("b", b)],
            FamilySpec::EuParabola { a } => vec![("a", a)],
            FamilySpec::HyGeneral { a, b } => vec![("a", a), ("b", b)],
            FamilySpec::HyParabola { lambda, mu } => vec![("lambda", lambda), ("mu", mu)],
            FamilySpec::HyOscParabola { lambda } => vec![("lambda", lambda)],
            FamilySpec::HyCircleReal { lambda } => vec![("lambda", lambda)],
            FamilySpec::HyCircleComplex { lambda } => vec![("lambda", lambda)],
            FamilySpec::HyHorocycle { lambda } => vec![("lambda", lambda)],
            FamilySpec::ElGeneral { a, b } => vec![("a", a), ("b", b)],
        }
    }

    /// Copy of this spec with one parameter rebound (used by sweeps).
    pub fn with_param(&self, name: &str, value: f64) -> Result<FamilySpec> {
        let mut map: BTreeMap<String, f64> =
            self.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        if !map.contains_key(name) {
            return Err(Error::DomainViolation(format!(
                "family {:?} takes no parameter {name:?}",
                self.family_name()
            )));
        }
        map.insert(name.to_string(), value);
        FamilySpec::from_name(self.family_name(), &map)
    }

    /// Parameter values excluded from the family's domain, per parameter.
    /// Sign conditions that couple both parameters are handled by
    /// [`FamilySpec::validate`].
    pub fn excluded_values(&self, param: &str) -> Vec<f64> {
        match (self, param) {
            (FamilySpec::EuGeneral { .. }, "a" | "b") => vec![0.0],
            (FamilySpec::EuParabola { .. }, "a") => vec![0.0],
            (FamilySpec::HyGeneral { .. }, "a" | "b") => vec![0.0],
            (FamilySpec::HyParabola { .. }, "lambda") => vec![0.0, -0.5],
            (FamilySpec::HyParabola { .. }, "mu") => vec![],
            (FamilySpec::HyOscParabola { .. }, "lambda") => vec![0.0],
            (FamilySpec::HyCircleReal { .. }, "lambda") => vec![0.0, -1.0],
            (FamilySpec::HyCircleComplex { .. }, "lambda") => vec![0.0, -1.0],
            (FamilySpec::HyHorocycle { .. }, "lambda") => vec![0.0],
            (FamilySpec::ElGeneral { .. }, "a" | "b") => vec![0.0],
            _ => vec![],
        }
    }

    /// Domain check. With `skip`, conditions involving that parameter are
    /// not enforced (used to pre-validate the fixed parameters of a sweep).
    pub(crate) fn domain_check(&self, skip: Option<&str>) -> Result<()> {
        let active = |p: &str| skip != Some(p);
        let nonzero = |p: &str, v: f64| -> Result<()> {
            if active(p) && v == 0.0 {
                Err(Error::DomainViolation(format!(
                    "{}: parameter {p} must be nonzero",
                    self.family_name()
                )))
            } else {
                Ok(())
            }
        };
        let not_value = |p: &str, v: f64, bad: f64| -> Result<()> {
            if active(p) && v == bad {
                Err(Error::DomainViolation(format!(
                    "{}: parameter {p} = {bad} is excluded",
                    self.family_name()
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            FamilySpec::EuGeneral { a, b } => {
                nonzero("a", a)?;
                nonzero("b", b)?;
                if active("a") && active("b") && a < 0.0 && b < 0.0 {
                    return Err(Error::DomainViolation(
                        "eu_general: a and b both negative leaves no real points".into(),
                    ));
                }
                Ok(())
            }
            FamilySpec::EuParabola { a } => nonzero("a", a),
            FamilySpec::HyGeneral { a, b } => {
                nonzero("a", a)?;
                nonzero("b", b)?;
                if active("a") && active("b") && a.abs() == 1.0 && b.abs() == 1.0 {
                    return Err(Error::DomainViolation(
                        "hy_general: |a| = |b| = 1 makes the conic coincide with the absolute"
                            .into(),
                    ));
                }
                Ok(())
            }
            FamilySpec::HyParabola { lambda, .. } => {
                nonzero("lambda", lambda)?;
                not_value("lambda", lambda, -0.5)
            }
            FamilySpec::HyOscParabola { lambda } => nonzero("lambda", lambda),
            FamilySpec::HyCircleReal { lambda } | FamilySpec::HyCircleComplex { lambda } => {
                nonzero("lambda", lambda)?;
                not_value("lambda", lambda, -1.0)
            }
            FamilySpec::HyHorocycle { lambda } => nonzero("lambda", lambda),
            FamilySpec::ElGeneral { a, b } => {
                nonzero("a", a)?;
                nonzero("b", b)
            }
        }
    }

    /// Checks the parameter values against the family's domain.
    pub fn validate(&self) -> Result<()> {
        self.domain_check(None)
    }

    /// The geometry this family lives in.
    pub fn geometry(&self) -> Geometry {
        match self {
            FamilySpec::EuGeneral { .. } | FamilySpec::EuParabola { .. } => Geometry::Euclidean,
            FamilySpec::ElGeneral { .. } => Geometry::Elliptic,
            _ => Geometry::Hyperbolic,
        }
    }

    /// The family's canonical conic (domain-checked).
    pub fn conic(&self) -> Result<Conic> {
        self.validate()?;
        let w = match *self {
            FamilySpec::EuGeneral { a, b } => [-1.0, b, a, 0.0, 0.0, 0.0],
            FamilySpec::EuParabola { a } => [0.0, a, 0.0, 0.0, -0.5, 0.0],
            FamilySpec::HyGeneral { a, b } | FamilySpec::ElGeneral { a, b } => {
                [-1.0, 1.0 / (a * a), 1.0 / (b * b), 0.0, 0.0, 0.0]
            }
            FamilySpec::HyParabola { lambda, mu } => {
                [mu - lambda, lambda + mu + 1.0, lambda, mu + 0.5, 0.0, 0.0]
            }
            FamilySpec::HyOscParabola { lambda } => [-lambda, lambda, lambda, 0.0, 0.5, 0.5],
            FamilySpec::HyCircleReal { lambda } => {
                [-lambda - 1.0, lambda + 1.0, lambda, 0.0, 0.0, 0.0]
            }
            FamilySpec::HyCircleComplex { lambda } => {
                [-lambda, lambda + 1.0, lambda + 1.0, 0.0, 0.0, 0.0]
            }
            FamilySpec::HyHorocycle { lambda } => {
                [1.0 - lambda, lambda, lambda + 1.0, 0.0, -1.0, 0.0]
            }
        };
        Conic::new(w[0], w[1], w[2], w[3], w[4], w[5])
    }

    /// Closed-form Frégier locus coefficients as a raw symmetric matrix,
    /// evaluable at any parameter values (polynomial in the parameters).
    pub(crate) fn closed_form_matrix(&self) -> Matrix3<f64> {
        let w: [f64; 6] = match *self {
            FamilySpec::EuGeneral { a, b } => {
                let d = a - b;
                let s = a + b;
                [-(d * d), b * s * s, a * s * s, 0.0, 0.0, 0.0]
            }
            FamilySpec::EuParabola { a } => [1.0 / a, a, 0.0, 0.0, -0.5, 0.0],
            FamilySpec::HyGeneral { a, b } => {
                let (a2, b2) = (a * a, b * b);
                let s = a2 * b2 - a2 - b2;
                let u = a2 * b2 + a2 - b2;
                let v = a2 * b2 - a2 + b2;
                [
                    -a2 * b2 * u * u * v * v,
                    b2 * s * s * v * v,
                    a2 * s * s * u * u,
                    0.0,
                    0.0,
                    0.0,
                ]
            }
            FamilySpec::ElGeneral { a, b } => {
                let (a2, b2) = (a * a, b * b);
                let u = a2 * b2 + a2 - b2;
                let v = a2 * b2 - a2 + b2;
                let p = a2 * b2 + a2 + b2;
                [
                    -a2 * b2 * u * u * v * v,
                    b2 * u * u * p * p,
                    a2 * v * v * p * p,
                    0.0,
                    0.0,
                    0.0,
                ]
            }
            FamilySpec::HyParabola { lambda, mu } => {
                let l = lambda;
                let q = (l + 1.0) * (l + 1.0);
                [
                    -2.0 * q * (l * l - 5.0 * l * mu - 2.0 * l - 2.0 * mu - 1.0),
                    2.0 * q * (l * l + 5.0 * l * mu + 3.0 * l + 2.0 * mu + 1.0),
                    2.0 * l * l * l * l,
                    q * (5.0 * l + 2.0) * (2.0 * mu + 1.0),
                    0.0,
                    0.0,
                ]
            }
            FamilySpec::HyOscParabola { lambda } => {
                let l2 = 2.0 * lambda * lambda;
                [-l2 + 8.0, l2 + 8.0, l2, 8.0, 5.0 * lambda, 5.0 * lambda]
            }
            FamilySpec::HyCircleReal { lambda } => {
                let l3 = lambda * lambda * lambda;
                let s = 5.0 * lambda * lambda + 8.0 * lambda + 4.0;
                [-l3 - s, l3 + s, l3, 0.0, 0.0, 0.0]
            }
            FamilySpec::HyCircleComplex { lambda } => {
                let l3 = lambda * lambda * lambda;
                let s = 5.0 * lambda * lambda + 8.0 * lambda + 4.0;
                [-l3, l3 + s, l3 + s, 0.0, 0.0, 0.0]
            }
            FamilySpec::HyHorocycle { lambda } => {
                [5.0 - lambda, lambda, lambda + 5.0, 0.0, -5.0, 0.0]
            }
        };
        Matrix3::new(w[0], w[3], w[4], w[3], w[1], w[5], w[4], w[5], w[2])
    }

    /// The closed-form Frégier locus conic (domain-checked).
    pub fn closed_form(&self) -> Result<Conic> {
        self.validate()?;
        Conic::from_matrix(&self.closed_form_matrix())
    }

    /// Full closed-form locus result: conic, rank classification, and shape.
    /// For a segment-shaped locus the real range is filled by deterministic
    /// sampling of the family's conic when it has real points.
    pub fn closed_form_locus(&self, tol: Tol) -> Result<LocusResult> {
        let conic = self.closed_form()?.normalized();
        let rank = rank_classify(&conic, FIT_TOL);
        let mut shape = degenerate_shape(&conic, &rank, tol)?;
        if let LocusShape::Segment { carrier, chart, real_range: rr } = &mut shape {
            if let Ok(c) = self.conic() {
                if let Ok((ch, ivs)) = real_range(self.geometry(), &c, carrier, 64, tol) {
                    *chart = ch;
                    *rr = ivs;
                }
            }
        }
        Ok(LocusResult { source: LocusSource::ClosedForm, conic, rank, shape })
    }
}
