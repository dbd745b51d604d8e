//! Conics as symmetric 3×3 quadratic forms: evaluation, pole/polar duality,
//! line intersection, rank classification, degenerate splitting, and seeded
//! point sampling.
//!
//! The coefficient order used everywhere (construction, serialization) is
//! `[m00, m11, m22, m01, m02, m12]` for the form
//! `m00·x0² + m11·x1² + m22·x2² + 2·m01·x0·x1 + 2·m02·x0·x2 + 2·m12·x1·x2`.

use nalgebra::{Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::projective::{
    chordal, chordal_c, join_c, normalize3, normalize3_c, ProjLine, ProjLineC, ProjPoint,
    ProjPointC, Tol, C64,
};
use crate::{Error, Result};

// ── ConicMatrix ────────────────────────────────────────────────────────────

/// Real symmetric 3×3 quadratic form representing a conic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conic {
    m: Matrix3<f64>,
}

impl Conic {
    /// Builds a conic from its six coefficients in wire order
    /// `[m00, m11, m22, m01, m02, m12]`.
    pub fn new(m00: f64, m11: f64, m22: f64, m01: f64, m02: f64, m12: f64) -> Result<Self> {
        let m = Matrix3::new(m00, m01, m02, m01, m11, m12, m02, m12, m22);
        if m.iter().all(|x| x.is_finite()) && m.iter().any(|x| *x != 0.0) {
            Ok(Conic { m })
        } else {
            Err(Error::InvalidCoordinates)
        }
    }

    /// Builds a conic from an arbitrary matrix by taking its symmetric part.
    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        let s = (m + m.transpose()) * 0.5;
        Conic::new(s[(0, 0)], s[(1, 1)], s[(2, 2)], s[(0, 1)], s[(0, 2)], s[(1, 2)])
    }

    /// Diagonal conic `d0·x0² + d1·x1² + d2·x2²`.
    pub fn diagonal(d0: f64, d1: f64, d2: f64) -> Result<Self> {
        Conic::new(d0, d1, d2, 0.0, 0.0, 0.0)
    }

    /// Coefficients in wire order `[m00, m11, m22, m01, m02, m12]`.
    pub fn coeffs(&self) -> [f64; 6] {
        [
            self.m[(0, 0)],
            self.m[(1, 1)],
            self.m[(2, 2)],
            self.m[(0, 1)],
            self.m[(0, 2)],
            self.m[(1, 2)],
        ]
    }

    /// The underlying symmetric matrix.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    /// Determinant of the form.
    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    /// Adjugate (transposed cofactor) matrix; the dual conic when regular.
    pub fn adjugate(&self) -> Matrix3<f64> {
        adjugate3(&self.m)
    }

    /// Representative with unit Frobenius norm and a sign convention (first
    /// nonzero wire coefficient positive), for stable serialization.
    pub fn normalized(&self) -> Conic {
        let f = self.m.norm();
        let mut m = self.m / f;
        let c = [m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(0, 1)], m[(0, 2)], m[(1, 2)]];
        if let Some(first) = c.iter().find(|x| x.abs() > 1e-14) {
            if *first < 0.0 {
                m = -m;
            }
        }
        for x in m.iter_mut() {
            if *x == 0.0 {
                *x = 0.0; // collapse -0.0
            }
        }
        Conic { m }
    }

    /// Value of the quadratic form at `p` (not scale-normalized).
    pub fn evaluate(&self, p: &ProjPoint) -> f64 {
        (p.0.transpose() * self.m * p.0)[0]
    }

    /// Scale-free containment: the form at `p`, after normalizing both the
    /// conic and the point, falls below tolerance.
    pub fn contains(&self, p: &ProjPoint, tol: Tol) -> bool {
        let n = normalize3(&p.0);
        let v = (n.transpose() * self.m * n)[0].abs() / self.m.norm();
        v <= tol.threshold(1.0)
    }

    /// Polar line of a point. For `p` on the conic this is the tangent at `p`.
    pub fn polar(&self, p: &ProjPoint) -> Result<ProjLine> {
        let v = self.m * p.0;
        if v.norm() <= 1e-14 * self.m.norm() * p.0.norm() {
            // p spans the kernel of a singular form; no polar line exists.
            return Err(Error::SingularConic);
        }
        Ok(ProjLine(v).normalized())
    }

    /// Pole of a line with respect to a regular conic.
    pub fn pole(&self, l: &ProjLine, tol: Tol) -> Result<ProjPoint> {
        if rank_classify(self, tol).rank < 3 {
            return Err(Error::SingularConic);
        }
        Ok(ProjPoint(self.adjugate() * l.0).normalized())
    }

    /// Pole of a complex line with respect to a regular conic.
    pub fn pole_c(&self, l: &ProjLineC, tol: Tol) -> Result<ProjPointC> {
        if rank_classify(self, tol).rank < 3 {
            return Err(Error::SingularConic);
        }
        let adj = self.adjugate();
        Ok(ProjPointC(adj.map(|x| C64::new(x, 0.0)) * l.0).normalized())
    }
}

/// Adjugate of a 3×3 matrix (satisfies `A · adj(A) = det(A)·I`).
pub fn adjugate3(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c = |i: usize, j: usize| -> f64 {
        let (r0, r1) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c0, c1) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let minor = m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    // adj(A) = cofactor(A)ᵀ; transposition is a no-op for symmetric inputs.
    Matrix3::new(
        c(0, 0),
        c(1, 0),
        c(2, 0),
        c(0, 1),
        c(1, 1),
        c(2, 1),
        c(0, 2),
        c(1, 2),
        c(2, 2),
    )
}

/// Scale-free distance between two conics: Frobenius-normalize both, take the
/// smaller entrywise max-difference over the two sign choices.
pub fn conic_match(a: &Conic, b: &Conic) -> f64 {
    let na = a.m / a.m.norm();
    let nb = b.m / b.m.norm();
    let d_plus = (na - nb).amax();
    let d_minus = (na + nb).amax();
    d_plus.min(d_minus)
}

// ── Rank classification ────────────────────────────────────────────────────

/// Degeneracy category of a conic by rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConicClass {
    /// Rank 3: a regular conic.
    Regular,
    /// Rank 2: two distinct lines (possibly a complex-conjugate pair).
    LinePair,
    /// Rank 1: one line counted twice.
    DoubleLine,
}

impl ConicClass {
    /// Lowercase tag used in serialized output.
    pub fn tag(&self) -> &'static str {
        match self {
            ConicClass::Regular => "regular",
            ConicClass::LinePair => "line_pair",
            ConicClass::DoubleLine => "double_line",
        }
    }
}

/// Rank classification of a conic: rank, determinant, category.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConicRank {
    /// Number of singular values above the relative threshold (1..=3).
    pub rank: u8,
    /// Determinant of the form as given (not normalized).
    pub det: f64,
    /// Category implied by the rank.
    pub class: ConicClass,
}

/// Rank via singular values with a relative threshold; the raw determinant
/// alone scales cubically and misclassifies near-degenerate forms.
pub fn rank_classify(c: &Conic, tol: Tol) -> ConicRank {
    let sv = c.m.svd(false, false).singular_values;
    let top = sv[0];
    let rank = sv.iter().filter(|s| **s > tol.threshold(top)).count().max(1) as u8;
    let class = match rank {
        3 => ConicClass::Regular,
        2 => ConicClass::LinePair,
        _ => ConicClass::DoubleLine,
    };
    ConicRank { rank, det: c.det(), class }
}

/// Smallest/largest singular-value ratio of the form; a scale-free measure of
/// how close the conic is to degeneracy (0 exactly at rank drop).
pub fn singularity_ratio(c: &Conic) -> f64 {
    let sv = c.m.svd(false, false).singular_values;
    sv[2] / sv[0]
}

// ── Line intersection ──────────────────────────────────────────────────────

/// Homogeneous-quadratic roots (α:β) of `A·α² + 2B·αβ + C·β²`, paired for
/// numerical stability (the larger of `−B ± √disc` first, its Vieta partner
/// second). Returns `None` when all three coefficients vanish.
fn quadratic_roots_hom(a: C64, b: C64, c: C64, scale: f64, tol: Tol) -> Option<[(C64, C64); 2]> {
    let thr = tol.threshold(scale);
    if a.norm() <= thr && b.norm() <= thr && c.norm() <= thr {
        return None;
    }
    let disc = b * b - a * c;
    let s = disc.sqrt();
    let w = if (-b - s).norm() >= (-b + s).norm() { -b - s } else { -b + s };
    if w.norm() <= 1e-300 {
        // b = 0 and a·c = 0 with not all coefficients zero.
        if a.norm() > c.norm() {
            // aα² = 0: double root α = 0.
            return Some([(C64::new(0.0, 0.0), C64::new(1.0, 0.0)); 2]);
        }
        // cβ² = 0: double root β = 0.
        return Some([(C64::new(1.0, 0.0), C64::new(0.0, 0.0)); 2]);
    }
    Some([(w, a), (c, w)])
}

/// Both intersection points of a conic with a complex line. A tangency
/// returns the contact point twice.
pub fn intersect_line_c(c: &Conic, l: &ProjLineC, tol: Tol) -> Result<(ProjPointC, ProjPointC)> {
    let ln = normalize3_c(&l.0);
    // Two independent points spanning the line: L × e_i for the two axes
    // other than the dominant coefficient.
    let pivot = {
        let mut best = 0;
        for i in 1..3 {
            if ln[i].norm_sqr() > ln[best].norm_sqr() {
                best = i;
            }
        }
        best
    };
    let mut axes = [(pivot + 1) % 3, (pivot + 2) % 3];
    axes.sort_unstable();
    let e = |i: usize| {
        let mut v = Vector3::from_element(C64::new(0.0, 0.0));
        v[i] = C64::new(1.0, 0.0);
        v
    };
    let p = normalize3_c(&cross_c_vec(&ln, &e(axes[0])));
    let q = normalize3_c(&cross_c_vec(&ln, &e(axes[1])));
    let mc = c.m.map(|x| C64::new(x, 0.0));
    let a = (p.transpose() * mc * p)[0];
    let b = (p.transpose() * mc * q)[0];
    let cc = (q.transpose() * mc * q)[0];
    let roots = quadratic_roots_hom(a, b, cc, c.m.norm() * 3.0, tol).ok_or(Error::LineOnConic)?;
    let mk = |(al, be): (C64, C64)| ProjPointC(p * al + q * be).normalized();
    Ok((mk(roots[0]), mk(roots[1])))
}

/// Both intersection points of a conic with a real line (complex output: the
/// points may form a conjugate pair).
pub fn intersect_line(c: &Conic, l: &ProjLine, tol: Tol) -> Result<(ProjPointC, ProjPointC)> {
    intersect_line_c(c, &l.complexify(), tol)
}

fn cross_c_vec(u: &Vector3<C64>, v: &Vector3<C64>) -> Vector3<C64> {
    Vector3::new(
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
}

// ── Degenerate splitting ───────────────────────────────────────────────────

/// Splits a degenerate conic into its two lines (equal for rank 1). The
/// product of the two returned linear forms reproduces the conic up to scale.
///
/// For rank 2 the singular point is the kernel vector; a probe line that
/// avoids it crosses the pair in one point per component line, and joining
/// those points to the singular point recovers the lines. This is numerically
/// tamer than closed-form discriminant factoring.
pub fn split_line_pair(c: &Conic, tol: Tol) -> Result<(ProjLineC, ProjLineC)> {
    let rk = rank_classify(c, tol);
    match rk.rank {
        3 => Err(Error::NotDegenerate),
        1 => {
            // c = ±l·lᵀ: any dominant column is proportional to l.
            let svd = c.m.svd(true, false);
            let u = svd.u.as_ref().expect("requested U");
            let l = ProjLineC(u.column(0).into_owned().map(|x| C64::new(x, 0.0))).normalized();
            Ok((l, l))
        }
        _ => {
            let svd = c.m.svd(true, false);
            let u = svd.u.as_ref().expect("requested U");
            let s: Vector3<f64> = u.column(2).into_owned(); // kernel of the symmetric form
            let sc = ProjPointC(s.map(|x| C64::new(x, 0.0)));
            // Probe lines: coordinate axes ordered by distance from s, then a
            // fixed generic fallback in case an axis is a component line.
            let mut order = [0usize, 1, 2];
            order.sort_by(|&i, &j| s[j].abs().partial_cmp(&s[i].abs()).unwrap());
            let mut probes: Vec<ProjLine> = order
                .iter()
                .map(|&i| {
                    let mut v = Vector3::zeros();
                    v[i] = 1.0;
                    ProjLine(v)
                })
                .collect();
            probes.push(ProjLine(Vector3::new(0.924_305, -0.617_215, 1.338_042)));
            for g in probes {
                if g.0.dot(&s).abs() <= 1e-9 * s.norm() {
                    continue; // probe passes through the singular point
                }
                match intersect_line(c, &g, tol) {
                    Ok((x1, x2)) => {
                        if chordal_c(&x1.0, &x2.0) <= tol.threshold(1.0) {
                            continue; // grazed the pair too close to the node
                        }
                        let l1 = join_c(&sc, &x1, tol)?;
                        let l2 = join_c(&sc, &x2, tol)?;
                        return Ok((l1, l2));
                    }
                    Err(Error::LineOnConic) => continue, // probe was a component line
                    Err(e) => return Err(e),
                }
            }
            Err(Error::NotDegenerate)
        }
    }
}

// ── Point sampling ─────────────────────────────────────────────────────────

/// Deterministically samples `n` distinct real points on a conic with real
/// points.
///
/// A first point is produced from the eigendecomposition: for an indefinite
/// form with eigenpairs `(λmax, umax)`, `(λmin, umin)` the combination
/// `√(−λmin)·umax + √(λmax)·umin` lies exactly on the conic. A definite form
/// has no real points. Further points are second intersections of chords
/// through the first point in seeded random directions; random 3-space
/// directions keep the sweep projectively generic even when the first point
/// is ideal.
pub fn sample_points(c: &Conic, n: usize, seed: u64) -> Result<Vec<ProjPoint>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let eig = nalgebra::SymmetricEigen::new(c.m);
    let (mut imax, mut imin) = (0usize, 0usize);
    for i in 1..3 {
        if eig.eigenvalues[i] > eig.eigenvalues[imax] {
            imax = i;
        }
        if eig.eigenvalues[i] < eig.eigenvalues[imin] {
            imin = i;
        }
    }
    let (lmax, lmin) = (eig.eigenvalues[imax], eig.eigenvalues[imin]);
    if lmin >= 0.0 || lmax <= 0.0 {
        // All eigenvalues share a sign: definite (or semidefinite) form with
        // no real solutions beyond a possible kernel.
        return Err(Error::NoRealPoints);
    }
    let mut seed_pt: Vector3<f64> = eig.eigenvectors.column(imax).into_owned() * (-lmin).sqrt()
        + eig.eigenvectors.column(imin).into_owned() * lmax.sqrt();

    // Newton projection onto the quadric. The eigen-built seed (and the
    // chord formula below, which amplifies the seed residual by (dᵀCd)²)
    // would otherwise leave points ~1e-10 off the conic, which is too
    // coarse for downstream collinearity checks at 1e-8.
    let polish = |x: &Vector3<f64>| -> Vector3<f64> {
        let mut y = *x;
        for _ in 0..2 {
            let grad = c.m * y * 2.0;
            let g2 = grad.norm_squared();
            if g2 <= 0.0 {
                break;
            }
            let val = (y.transpose() * c.m * y)[0];
            y -= grad * (val / g2);
        }
        y
    };
    seed_pt = polish(&seed_pt);

    let mut rng = StdRng::seed_from_u64(seed);
    let mut pts: Vec<ProjPoint> = Vec::with_capacity(n);
    for _ in 0..64 * n {
        if pts.len() >= n {
            break;
        }
        let d = Vector3::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        if d.norm() < 1e-3 {
            continue;
        }
        // Second intersection of the chord through seed_pt and d:
        // x = (dᵀCd)·s − 2(sᵀCd)·d, exact for s on the conic.
        let dcd = (d.transpose() * c.m * d)[0];
        let scd = (seed_pt.transpose() * c.m * d)[0];
        let x = seed_pt * dcd - d * (2.0 * scd);
        if x.norm() <= 1e-9 * (seed_pt.norm() * c.m.norm()) {
            continue;
        }
        let cand = ProjPoint(normalize3(&polish(&x)));
        if pts.iter().all(|p| chordal(&p.0, &cand.0) > 1e-10) {
            pts.push(cand);
        }
    }
    if pts.len() < n {
        return Err(Error::SamplingExhausted);
    }
    Ok(pts)
}

// ── Tests ──────────────────────────────────────────────────────────────────
