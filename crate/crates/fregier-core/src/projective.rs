//! Homogeneous points and lines of the real projective plane, with a parallel
//! complex coordinate type, join/meet, collinearity, and the tolerance policy
//! shared by the whole crate.
//!
//! All comparisons are scale-free: vectors are normalized so that their
//! largest-magnitude coordinate becomes 1 before tolerances apply, and
//! equality up to scale is measured through the cross product, which is
//! insensitive to which coordinate happens to be largest.

use nalgebra::{Complex, Vector3};

use crate::{Error, Result};

/// Complex scalar used by the parallel coordinate types.
pub type C64 = Complex<f64>;

// ── Tolerance ──────────────────────────────────────────────────────────────

/// Relative/absolute tolerance pair passed explicitly to every operation that
/// makes a numerical decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol {
    /// Relative tolerance, applied to normalized quantities.
    pub eps_rel: f64,
    /// Absolute floor, guarding quantities that are legitimately tiny.
    pub eps_abs: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { eps_rel: 1e-9, eps_abs: 1e-12 }
    }
}

impl Tol {
    /// Builds a tolerance pair, rejecting non-positive values.
    pub fn new(eps_rel: f64, eps_abs: f64) -> Result<Self> {
        if eps_rel > 0.0 && eps_rel.is_finite() && eps_abs > 0.0 && eps_abs.is_finite() {
            Ok(Tol { eps_rel, eps_abs })
        } else {
            Err(Error::InvalidTolerance)
        }
    }

    /// Combined threshold for a quantity of the given magnitude scale.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.eps_rel * scale + self.eps_abs
    }
}

// ── Real point and line ────────────────────────────────────────────────────

/// Point of the real projective plane, `[x0, x1, x2]` up to nonzero scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint(pub Vector3<f64>);

/// Line of the real projective plane; a point `x` is incident iff `L · x = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjLine(pub Vector3<f64>);

/// Point with complex homogeneous coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPointC(pub Vector3<C64>);

/// Line with complex homogeneous coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjLineC(pub Vector3<C64>);

fn finite_nonzero(v: &Vector3<f64>) -> bool {
    v.iter().all(|x| x.is_finite()) && v.iter().any(|x| *x != 0.0)
}

fn finite_nonzero_c(v: &Vector3<C64>) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
        && v.iter().any(|z| z.re != 0.0 || z.im != 0.0)
}

/// Index of the largest-magnitude coordinate (first index on ties).
fn argmax_abs(v: &Vector3<f64>) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

fn argmax_abs_c(v: &Vector3<C64>) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i].norm_sqr() > v[best].norm_sqr() {
            best = i;
        }
    }
    best
}

/// Divides by the largest-magnitude coordinate, which becomes exactly 1.
/// Negative zeros are flushed so normalized output is byte-reproducible.
pub fn normalize3(v: &Vector3<f64>) -> Vector3<f64> {
    let pivot = v[argmax_abs(v)];
    let mut out = v / pivot;
    for x in out.iter_mut() {
        if *x == 0.0 {
            *x = 0.0; // collapse -0.0
        }
    }
    out
}

/// Complex counterpart of [`normalize3`]; the pivot coordinate becomes `1+0i`,
/// which also fixes the overall phase.
pub fn normalize3_c(v: &Vector3<C64>) -> Vector3<C64> {
    let pivot = v[argmax_abs_c(v)];
    let mut out = v.map(|z| z / pivot);
    for z in out.iter_mut() {
        if z.re == 0.0 {
            z.re = 0.0;
        }
        if z.im == 0.0 {
            z.im = 0.0;
        }
    }
    out
}

/// Scale-free distance between two homogeneous vectors:
/// `‖u × v‖ / (‖u‖·‖v‖)`, zero exactly when they agree up to scale.
pub fn chordal(u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    u.cross(v).norm() / (u.norm() * v.norm())
}

/// Complex counterpart of [`chordal`].
pub fn chordal_c(u: &Vector3<C64>, v: &Vector3<C64>) -> f64 {
    let cross = Vector3::new(
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    );
    cross.norm() / (u.norm() * v.norm())
}

impl ProjPoint {
    /// Validating constructor: coordinates must be finite and not all zero.
    pub fn new(x0: f64, x1: f64, x2: f64) -> Result<Self> {
        let v = Vector3::new(x0, x1, x2);
        if finite_nonzero(&v) {
            Ok(ProjPoint(v))
        } else {
            Err(Error::InvalidCoordinates)
        }
    }

    /// Representative with the largest-magnitude coordinate fixed to 1.
    pub fn normalized(&self) -> Self {
        ProjPoint(normalize3(&self.0))
    }

    /// Equality up to scale within tolerance.
    pub fn approx_eq(&self, other: &Self, tol: Tol) -> bool {
        chordal(&self.0, &other.0) <= tol.threshold(1.0)
    }

    /// Lift to complex coordinates.
    pub fn complexify(&self) -> ProjPointC {
        ProjPointC(self.0.map(|x| C64::new(x, 0.0)))
    }
}

impl ProjLine {
    /// Validating constructor: coefficients must be finite and not all zero.
    pub fn new(l0: f64, l1: f64, l2: f64) -> Result<Self> {
        let v = Vector3::new(l0, l1, l2);
        if finite_nonzero(&v) {
            Ok(ProjLine(v))
        } else {
            Err(Error::InvalidCoordinates)
        }
    }

    /// Representative with the largest-magnitude coefficient fixed to 1.
    pub fn normalized(&self) -> Self {
        ProjLine(normalize3(&self.0))
    }

    /// Equality up to scale within tolerance.
    pub fn approx_eq(&self, other: &Self, tol: Tol) -> bool {
        chordal(&self.0, &other.0) <= tol.threshold(1.0)
    }

    /// Scale-free incidence residual `|L·p| / (‖L‖·‖p‖)`.
    pub fn incidence(&self, p: &ProjPoint) -> f64 {
        (self.0.dot(&p.0)).abs() / (self.0.norm() * p.0.norm())
    }

    /// Lift to complex coefficients.
    pub fn complexify(&self) -> ProjLineC {
        ProjLineC(self.0.map(|x| C64::new(x, 0.0)))
    }
}

impl ProjPointC {
    /// Validating constructor for complex coordinates.
    pub fn new(x0: C64, x1: C64, x2: C64) -> Result<Self> {
        let v = Vector3::new(x0, x1, x2);
        if finite_nonzero_c(&v) {
            Ok(ProjPointC(v))
        } else {
            Err(Error::InvalidCoordinates)
        }
    }

    /// Representative with the pivot coordinate fixed to `1+0i`.
    pub fn normalized(&self) -> Self {
        ProjPointC(normalize3_c(&self.0))
    }

    /// Equality up to (complex) scale within tolerance.
    pub fn approx_eq(&self, other: &Self, tol: Tol) -> bool {
        chordal_c(&self.0, &other.0) <= tol.threshold(1.0)
    }
}

impl ProjLineC {
    /// Validating constructor for complex coefficients.
    pub fn new(l0: C64, l1: C64, l2: C64) -> Result<Self> {
        let v = Vector3::new(l0, l1, l2);
        if finite_nonzero_c(&v) {
            Ok(ProjLineC(v))
        } else {
            Err(Error::InvalidCoordinates)
        }
    }

    /// Representative with the pivot coefficient fixed to `1+0i`.
    pub fn normalized(&self) -> Self {
        ProjLineC(normalize3_c(&self.0))
    }

    /// Equality up to (complex) scale within tolerance.
    pub fn approx_eq(&self, other: &Self, tol: Tol) -> bool {
        chordal_c(&self.0, &other.0) <= tol.threshold(1.0)
    }

    /// Scale-free incidence residual against a complex point.
    pub fn incidence(&self, p: &ProjPointC) -> f64 {
        self.0.dot(&p.0).norm() / (self.0.norm() * p.0.norm())
    }
}

// ── Join, meet, collinearity ───────────────────────────────────────────────

/// Line through two distinct points.
pub fn join(p: &ProjPoint, q: &ProjPoint, tol: Tol) -> Result<ProjLine> {
    if chordal(&p.0, &q.0) <= tol.threshold(1.0) {
        return Err(Error::CoincidentPoints);
    }
    Ok(ProjLine(p.0.cross(&q.0)).normalized())
}

/// Intersection point of two distinct lines.
pub fn meet(l: &ProjLine, m: &ProjLine, tol: Tol) -> Result<ProjPoint> {
    if chordal(&l.0, &m.0) <= tol.threshold(1.0) {
        return Err(Error::CoincidentLines);
    }
    Ok(ProjPoint(l.0.cross(&m.0)).normalized())
}

fn cross_c(u: &Vector3<C64>, v: &Vector3<C64>) -> Vector3<C64> {
    Vector3::new(
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
}

/// Line through two distinct complex points.
pub fn join_c(p: &ProjPointC, q: &ProjPointC, tol: Tol) -> Result<ProjLineC> {
    if chordal_c(&p.0, &q.0) <= tol.threshold(1.0) {
        return Err(Error::CoincidentPoints);
    }
    Ok(ProjLineC(cross_c(&p.0, &q.0)).normalized())
}

/// Intersection point of two distinct complex lines.
pub fn meet_c(l: &ProjLineC, m: &ProjLineC, tol: Tol) -> Result<ProjPointC> {
    if chordal_c(&l.0, &m.0) <= tol.threshold(1.0) {
        return Err(Error::CoincidentLines);
    }
    Ok(ProjPointC(cross_c(&l.0, &m.0)).normalized())
}

/// True iff the three points lie on a common line: the determinant of their
/// normalized coordinate rows is below tolerance.
pub fn collinear(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint, tol: Tol) -> bool {
    let a = normalize3(&p.0);
    let b = normalize3(&q.0);
    let c = normalize3(&r.0);
    let det = a.dot(&b.cross(&c));
    det.abs() <= tol.threshold(1.0)
}

// ── Realification ──────────────────────────────────────────────────────────

fn realify_vec(v: &Vector3<C64>, tol: Tol) -> Result<Vector3<f64>> {
    let n = normalize3_c(v);
    let worst_im = n.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst_im > tol.threshold(1.0) {
        return Err(Error::NotReal);
    }
    Ok(normalize3(&n.map(|z| z.re)))
}

/// Real representative of a complex point, if one exists up to scale.
/// After normalization the imaginary parts must all fall below tolerance.
pub fn realify(p: &ProjPointC, tol: Tol) -> Result<ProjPoint> {
    Ok(ProjPoint(realify_vec(&p.0, tol)?))
}

/// Real representative of a complex line, if one exists up to scale.
pub fn realify_line(l: &ProjLineC, tol: Tol) -> Result<ProjLine> {
    Ok(ProjLine(realify_vec(&l.0, tol)?))
}

// ── Tests ──────────────────────────────────────────────────────────────────
