//! Cayley–Klein absolutes and the perpendicularity they induce, isotropic
//! lines through a point, and conic normals, for the four supported plane
//! geometries.
//!
//! Each geometry is defined by its *dual absolute*: a symmetric 3×3 form `D`
//! acting on line coordinates. Two lines `L`, `M` are perpendicular when
//! `Lᵀ·D·M = 0`; a line is isotropic (self-perpendicular) when `Lᵀ·D·L = 0`.
//! The Euclidean and pseudo-Euclidean duals are rank 2 and have no regular
//! primal counterpart, which is why the dual forms are stored explicitly.

use nalgebra::{Matrix3, Vector3};

use crate::conic::{intersect_line_c, Conic};
use crate::projective::{normalize3, ProjLine, ProjLineC, ProjPoint, ProjPointC, Tol, C64};
use crate::{Error, Result};

/// One of the four supported Cayley–Klein plane geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Degenerate dual `diag(0,1,1)`; circular points `[0,1,±i]`.
    Euclidean,
    /// Degenerate dual `diag(0,1,−1)`; real absolute points `[0,1,±1]`.
    PseudoEuclidean,
    /// Absolute conic `x0²+x1²+x2²` (no real points); dual is the same form.
    Elliptic,
    /// Absolute conic `x1²+x2²−x0²` (the unit circle); dual `diag(−1,1,1)`.
    Hyperbolic,
}

impl Geometry {
    /// All four geometries, in a fixed order.
    pub const ALL: [Geometry; 4] = [
        Geometry::Euclidean,
        Geometry::PseudoEuclidean,
        Geometry::Elliptic,
        Geometry::Hyperbolic,
    ];

    /// Canonical lowercase name (`pseudo-euclidean` with a hyphen).
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean",
            Geometry::PseudoEuclidean => "pseudo-euclidean",
            Geometry::Elliptic => "elliptic",
            Geometry::Hyperbolic => "hyperbolic",
        }
    }

    /// Symmetric form on line coordinates defining perpendicularity.
    pub fn dual_absolute(&self) -> Matrix3<f64> {
        match self {
            Geometry::Euclidean => Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, 1.0)),
            Geometry::PseudoEuclidean => Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, -1.0)),
            Geometry::Elliptic => Matrix3::identity(),
            Geometry::Hyperbolic => Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 1.0)),
        }
    }

    /// Absolute point conic, where one exists (elliptic/hyperbolic). The
    /// Euclidean and pseudo-Euclidean absolutes are point pairs on `x0 = 0`
    /// and carry no regular primal form.
    pub fn primal_absolute(&self) -> Option<Conic> {
        match self {
            Geometry::Euclidean | Geometry::PseudoEuclidean => None,
            Geometry::Elliptic => Some(Conic::diagonal(1.0, 1.0, 1.0).expect("valid")),
            Geometry::Hyperbolic => Some(Conic::diagonal(-1.0, 1.0, 1.0).expect("valid")),
        }
    }

    /// The absolute point pair for the degenerate geometries: `[0,1,±i]`
    /// (Euclidean) or `[0,1,±1]` (pseudo-Euclidean).
    pub fn absolute_points(&self) -> Option<(ProjPointC, ProjPointC)> {
        let pair = |im: f64, re: f64| {
            let mk = |s: f64| {
                ProjPointC::new(
                    C64::new(0.0, 0.0),
                    C64::new(1.0, 0.0),
                    C64::new(s * re, s * im),
                )
                .expect("valid")
            };
            (mk(1.0), mk(-1.0))
        };
        match self {
            Geometry::Euclidean => Some(pair(1.0, 0.0)),
            Geometry::PseudoEuclidean => Some(pair(0.0, 1.0)),
            Geometry::Elliptic | Geometry::Hyperbolic => None,
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Geometry::Euclidean),
            "pseudo-euclidean" | "pseudo_euclidean" => Ok(Geometry::PseudoEuclidean),
            "elliptic" => Ok(Geometry::Elliptic),
            "hyperbolic" => Ok(Geometry::Hyperbolic),
            other => Err(Error::DomainViolation(format!(
                "unknown geometry {other:?}; expected euclidean | pseudo-euclidean | elliptic | hyperbolic"
            ))),
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// True when the two lines are perpendicular in `g`: `Lᵀ·D·M ≈ 0` after
/// normalizing both lines, scale-free in `D`.
pub fn perpendicular(g: Geometry, l: &ProjLine, m: &ProjLine, tol: Tol) -> bool {
    let d = g.dual_absolute();
    let ln = normalize3(&l.0);
    let mn = normalize3(&m.0);
    (ln.transpose() * d * mn)[0].abs() / d.norm() <= tol.threshold(1.0)
}

/// True when the line is self-perpendicular in `g`. Perpendicularity against
/// an isotropic line is degenerate; callers report the flag rather than fail.
pub fn is_isotropic(g: Geometry, l: &ProjLine, tol: Tol) -> bool {
    perpendicular(g, l, l, tol)
}

/// The two isotropic lines through `p`: the joins to the absolute points
/// (Euclidean/pseudo-Euclidean) or the tangents from `p` to the absolute
/// conic (elliptic/hyperbolic). Complex output covers both situations; the
/// pair is closed under conjugation for real `p`.
///
/// Uniform computation by duality: lines through `p` are the points of the
/// dual plane on the line `p`, and isotropy is the dual quadratic `D`, so the
/// pair is the intersection of the "conic" `D` with the "line" `p` in the
/// dual plane.
pub fn isotropic_lines(g: Geometry, p: &ProjPoint, tol: Tol) -> Result<(ProjLineC, ProjLineC)> {
    let d = Conic::from_matrix(&g.dual_absolute()).expect("absolute forms are nonzero");
    let dual_line = ProjLineC(p.0.map(|x| C64::new(x, 0.0)));
    let (a, b) = match intersect_line_c(&d, &dual_line, tol) {
        Ok(pair) => pair,
        // The whole pencil through p isotropic cannot happen for real p; a
        // degenerate report still means no two distinct lines exist.
        Err(Error::LineOnConic) => return Err(Error::OnAbsolute),
        Err(e) => return Err(e),
    };
    let (la, lb) = (ProjLineC(a.0), ProjLineC(b.0));
    if la.approx_eq(&lb, tol) {
        return Err(Error::OnAbsolute);
    }
    Ok((la, lb))
}

/// Normal line of the conic `C` at a point `p` on it: the line through `p`
/// perpendicular (in `g`) to the tangent `polar(C, p)`.
///
/// With `T = C·p` the tangent and `D` the dual absolute, the normal is
/// `(D·T) × p`: it passes through `p` by construction and satisfies
/// `Tᵀ·D·((D·T)×p) = (D·T)·((D·T)×p) = 0`. The construction collapses when
/// the tangent is isotropic (`Tᵀ·D·T ≈ 0`) or `D·T` is parallel to `p`.
pub fn normal_line(g: Geometry, c: &Conic, p: &ProjPoint, tol: Tol) -> Result<ProjLine> {
    let t = c.polar(p)?;
    if is_isotropic(g, &t, tol) {
        return Err(Error::IsotropicTangent);
    }
    let u = g.dual_absolute() * normalize3(&t.0);
    let m = u.cross(&normalize3(&p.0));
    if m.norm() <= tol.threshold(u.norm()) {
        return Err(Error::IsotropicTangent);
    }
    Ok(ProjLine(m).normalized())
}
