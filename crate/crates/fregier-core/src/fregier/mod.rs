//! Frégier points and Frégier loci.
//!
//! For a point `p` on a conic `C`, every pair of chords through `p` that are
//! perpendicular (in the ambient Cayley–Klein geometry) meets `C` again in
//! two points whose join passes through one fixed point: the *Frégier point*
//! `f` of `p`. As `p` varies over `C`, the Frégier points sweep out the
//! *Frégier locus*, generically again a conic, which may degenerate to a
//! point, a crossed line pair, or a double line carrying a projective
//! segment.
//!
//! Two independent constructions are provided: the chord construction works
//! in real arithmetic only and serves as the reference; the isotropic
//! construction (pole of the chord of isotropic second intersections) is the
//! production path used by sampling and fitting.

pub mod families;
pub mod scan;

use nalgebra::{DMatrix, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::conic::{rank_classify, sample_points, split_line_pair, Conic, ConicRank};
use crate::metric::{is_isotropic, isotropic_lines, Geometry};
use crate::projective::{
    chordal, chordal_c, join, join_c, meet, normalize3, normalize3_c, realify, realify_line,
    ProjLine, ProjLineC, ProjPoint, ProjPointC, Tol, C64,
};
use crate::{Error, Result};

/// Rank decisions on fitted or closed-form locus conics use this relative
/// threshold, matching the singular-value ratio test of the fit itself.
pub(crate) const FIT_TOL: Tol = Tol { eps_rel: 1e-6, eps_abs: 1e-12 };

/// Seed for the deterministic internal sampling of [`real_range`].
const RANGE_SEED: u64 = 2026_0825;

// ── Second intersections ───────────────────────────────────────────────────

/// Second intersection with `C` of a line through the on-conic point `p`,
/// or `None` when the line is tangent at `p`. Uses the exact identity
/// `x = (dᵀCd)·p − 2(pᵀCd)·d` for any second span point `d` of the line,
/// which keeps the arithmetic rational (no square roots).
fn second_intersection(c: &Conic, p: &ProjPoint, l: &ProjLine) -> Option<ProjPoint> {
    let ln = normalize3(&l.0);
    let pn = normalize3(&p.0);
    let mut d: Option<Vector3<f64>> = None;
    let mut best = 0.0;
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = 1.0;
        let cand = ln.cross(&e);
        if cand.norm() < 1e-9 {
            continue;
        }
        let score = chordal(&cand, &pn);
        if score > best {
            best = score;
            d = Some(cand / cand.norm());
        }
    }
    let d = d?;
    if best < 1e-9 {
        return None; // every span point coincides with p
    }
    let dcd = (d.transpose() * c.matrix() * d)[0];
    let pcd = (pn.transpose() * c.matrix() * d)[0];
    let x = pn * dcd - d * (2.0 * pcd);
    if x.norm() < 1e-12 || chordal(&x, &pn) < 1e-9 {
        return None; // tangent: the second intersection is p itself
    }
    Some(ProjPoint(normalize3(&x)))
}

/// Complex counterpart of [`second_intersection`].
fn second_intersection_c(c: &Conic, p: &ProjPointC, l: &ProjLineC) -> Option<ProjPointC> {
    let ln = normalize3_c(&l.0);
    let pn = normalize3_c(&p.0);
    let mc = c.matrix().map(|x| C64::new(x, 0.0));
    let mut d: Option<Vector3<C64>> = None;
    let mut best = 0.0;
    for k in 0..3 {
        let mut e = Vector3::from_element(C64::new(0.0, 0.0));
        e[k] = C64::new(1.0, 0.0);
        let cand = Vector3::new(
            ln[1] * e[2] - ln[2] * e[1],
            ln[2] * e[0] - ln[0] * e[2],
            ln[0] * e[1] - ln[1] * e[0],
        );
        if cand.norm() < 1e-9 {
            continue;
        }
        let score = chordal_c(&cand, &pn);
        if score > best {
            best = score;
            d = Some(cand / C64::new(cand.norm(), 0.0));
        }
    }
    let d = d?;
    if best < 1e-9 {
        return None;
    }
    let dcd = (d.transpose() * mc * d)[0];
    let pcd = (pn.transpose() * mc * d)[0];
    let x = pn * dcd - d * (C64::new(2.0, 0.0) * pcd);
    if x.norm() < 1e-12 || chordal_c(&x, &pn) < 1e-9 {
        return None;
    }
    Some(ProjPointC(normalize3_c(&x)))
}

/// Precondition check used by the constructions: `p` must lie on `C`. The
/// tolerance is loosened to 1e-6 relative so that coordinates entered with
/// 8 significant digits still qualify.
fn ensure_on_conic(c: &Conic, p: &ProjPoint, tol: Tol) -> Result<()> {
    let loose = Tol { eps_rel: tol.eps_rel.max(1e-6), eps_abs: tol.eps_abs };
    if c.contains(p, loose) {
        Ok(())
    } else {
        Err(Error::DomainViolation("point does not lie on the conic".into()))
    }
}

// ── Frégier point: chord construction ──────────────────────────────────────

/// Frégier point of `p` on `C` by the right-angle chord construction, in
/// real arithmetic only.
///
/// Several perpendicular chord pairs through `p` are erected in generic
/// directions; each pair's second intersections are joined into a
/// hypotenuse, and the hypotenuses are intersected. A third hypotenuse
/// validates that the result is independent of the chosen pairs.
pub fn fregier_point_chords(g: Geometry, c: &Conic, p: &ProjPoint, tol: Tol) -> Result<ProjPoint> {
    ensure_on_conic(c, p, tol)?;
    if rank_classify(c, tol).rank < 3 {
        return Err(Error::SingularConic);
    }
    let tangent = c.polar(p)?;
    if is_isotropic(g, &tangent, tol) {
        return Err(Error::IsotropicTangent);
    }
    let d = g.dual_absolute();
    let pn = normalize3(&p.0);
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    let mut hyps: Vec<ProjLine> = Vec::new();
    for _ in 0..64 {
        if hyps.len() >= 3 {
            break;
        }
        let dir = Vector3::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        let l = pn.cross(&dir);
        if l.norm() < 1e-6 {
            continue;
        }
        let lp = (d * l).cross(&pn);
        if lp.norm() < 1e-9 * l.norm() || chordal(&l, &lp) < 1e-6 {
            continue; // chord (numerically) isotropic: the pair collapses
        }
        let (Some(q), Some(r)) = (
            second_intersection(c, p, &ProjLine(l)),
            second_intersection(c, p, &ProjLine(lp)),
        ) else {
            continue; // tangent chord: try another direction
        };
        if chordal(&q.0, &r.0) < 1e-8 {
            continue; // hypotenuse degenerates
        }
        let h = match join(&q, &r, tol) {
            Ok(h) => h,
            Err(_) => continue,
        };
        if hyps.iter().any(|x| chordal(&x.0, &h.0) < 1e-6) {
            continue; // need transverse hypotenuses to intersect
        }
        hyps.push(h);
    }
    if hyps.len() < 2 {
        return Err(Error::DegenerateChord);
    }
    let f = meet(&hyps[0], &hyps[1], tol)?;
    if let Some(h3) = hyps.get(2) {
        if h3.incidence(&f) > 1e-6 {
            // Fall back to the least-squares common point of all hypotenuses.
            let a = DMatrix::from_fn(hyps.len(), 3, |i, j| normalize3(&hyps[i].0)[j]);
            let svd = a.svd(false, true);
            let vt = svd.v_t.as_ref().expect("requested V^T");
            let fv = Vector3::new(vt[(2, 0)], vt[(2, 1)], vt[(2, 2)]);
            let f2 = ProjPoint(normalize3(&fv));
            if hyps.iter().any(|h| h.incidence(&f2) > 1e-6) {
                return Err(Error::FitUnstable);
            }
            return Ok(f2);
        }
    }
    Ok(f.normalized())
}

// ── Frégier point: isotropic construction ──────────────────────────────────

/// Frégier point of `p` on `C` via isotropic lines: the two isotropic lines
/// through `p` meet `C` again in a conjugate pair of points; the Frégier
/// point is the pole of their join.
pub fn fregier_point_isotropic(
    g: Geometry,
    c: &Conic,
    p: &ProjPoint,
    tol: Tol,
) -> Result<ProjPoint> {
    ensure_on_conic(c, p, tol)?;
    if rank_classify(c, tol).rank < 3 {
        return Err(Error::SingularConic);
    }
    let (l1, l2) = isotropic_lines(g, p, tol)?;
    let pc = p.complexify();
    let i1 = second_intersection_c(c, &pc, &l1).ok_or(Error::IsotropicTangent)?;
    let i2 = second_intersection_c(c, &pc, &l2).ok_or(Error::IsotropicTangent)?;
    let k = match join_c(&i1, &i2, tol) {
        Ok(k) => k,
        Err(Error::CoincidentPoints) => return Err(Error::DegenerateChord),
        Err(e) => return Err(e),
    };
    let fc = c.pole_c(&k, tol)?;
    let f = realify(&fc, Tol { eps_rel: tol.eps_rel.max(1e-7), eps_abs: tol.eps_abs })?;
    Ok(f.normalized())
}

// ── Involution on the conic ────────────────────────────────────────────────

/// Image of `q` under the right-angle involution centered at `p`: the second
/// intersection with `C` of the line through `p` perpendicular to `p ∨ q`.
/// The map is an involution of `C`, and `q`, its image, and the Frégier
/// point of `p` are collinear.
pub fn involution_image(
    g: Geometry,
    c: &Conic,
    p: &ProjPoint,
    q: &ProjPoint,
    tol: Tol,
) -> Result<ProjPoint> {
    ensure_on_conic(c, p, tol)?;
    ensure_on_conic(c, q, tol)?;
    let chord = join(&p.normalized(), &q.normalized(), tol)?; // CoincidentPoints if q = p
    let m = (g.dual_absolute() * chord.0).cross(&normalize3(&p.0));
    if m.norm() < 1e-9 * chord.0.norm() {
        return Err(Error::DegenerateChord); // chord isotropic: no perpendicular
    }
    second_intersection(c, p, &ProjLine(m)).ok_or(Error::DegenerateChord)
}

// ── Locus results ──────────────────────────────────────────────────────────

/// How a [`LocusResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocusSource {
    /// Least-squares conic through sampled Frégier points.
    Fitted,
    /// Closed-form conic attached to a canonical family.
    ClosedForm,
}

/// Geometric shape of a Frégier locus.
#[derive(Clone, Debug, PartialEq)]
pub enum LocusShape {
    /// Rank 3: a regular conic.
    Regular,
    /// All Frégier points coincide (or the conic is a complex line pair
    /// whose only real point is this one).
    Point(ProjPoint),
    /// Rank 2 with two real lines.
    CrossedLines(ProjLine, ProjLine),
    /// Rank 1: a double line carrying a projective segment of real points.
    Segment {
        /// The carrier line of the degenerate locus.
        carrier: ProjLine,
        /// Affine chart on the carrier: `t = x[num] / x[den]`, indices chosen
        /// as the two dominant coordinates of the sampled points.
        chart: (usize, usize),
        /// Merged parameter intervals covered by real Frégier points.
        real_range: Vec<(f64, f64)>,
    },
}

/// A Frégier locus: the conic, its rank classification, and its shape.
#[derive(Clone, Debug, PartialEq)]
pub struct LocusResult {
    /// Fit or closed form.
    pub source: LocusSource,
    /// The locus conic (normalized representative).
    pub conic: Conic,
    /// Rank classification at the fitting tolerance.
    pub rank: ConicRank,
    /// Point / crossed-lines / segment structure for degenerate loci.
    pub shape: LocusShape,
}

/// Rank-2/rank-1 shape analysis shared by the fitted and closed-form paths.
/// For rank 2, the two dominant eigenvalues decide between a real crossed
/// pair (opposite signs) and a complex pair with a single real point (equal
/// signs, the kernel vector). For rank 1 the carrier is returned with an
/// empty range for the caller to fill.
pub(crate) fn degenerate_shape(locus: &Conic, rank: &ConicRank, tol: Tol) -> Result<LocusShape> {
    match rank.rank {
        3 => Ok(LocusShape::Regular),
        2 => {
            let eig = nalgebra::SymmetricEigen::new(*locus.matrix());
            let mut idx = [0usize, 1, 2];
            idx.sort_by(|&i, &j| {
                eig.eigenvalues[j].abs().partial_cmp(&eig.eigenvalues[i].abs()).unwrap()
            });
            let (top, mid, small) = (idx[0], idx[1], idx[2]);
            if eig.eigenvalues[top] * eig.eigenvalues[mid] > 0.0 {
                let k: Vector3<f64> = eig.eigenvectors.column(small).into_owned();
                Ok(LocusShape::Point(ProjPoint(normalize3(&k))))
            } else {
                let (l1, l2) = split_line_pair(locus, tol)?;
                let loose = Tol { eps_rel: 1e-6, eps_abs: 1e-9 };
                let r1 = realify_line(&l1, loose)?;
                let r2 = realify_line(&l2, loose)?;
                Ok(LocusShape::CrossedLines(r1, r2))
            }
        }
        _ => {
            let (l, _) = split_line_pair(locus, tol)?;
            let carrier = realify_line(&l, Tol { eps_rel: 1e-6, eps_abs: 1e-9 })?;
            Ok(LocusShape::Segment { carrier, chart: (0, 1), real_range: Vec::new() })
        }
    }
}

/// Rank-2 conic whose only real point is `f`: the sum `l1·l1ᵀ + l2·l2ᵀ` over
/// two independent lines through `f` vanishes exactly at `f`.
fn point_conic(f: &ProjPoint) -> Conic {
    let fv = normalize3(&f.0);
    let mut lines: Vec<Vector3<f64>> = Vec::new();
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = 1.0;
        let l = fv.cross(&e);
        if l.norm() > 1e-6 {
            lines.push(l / l.norm());
        }
        if lines.len() == 2 {
            break;
        }
    }
    let m = lines[0] * lines[0].transpose() + lines[1] * lines[1].transpose();
    Conic::from_matrix(&m).expect("two independent lines yield a nonzero form").normalized()
}

// ── Real range on a carrier line ───────────────────────────────────────────

/// Affine-chart projection and interval merging for points accumulated on a
/// carrier line. The chart is `t = x[num]/x[den]` with `den` the globally
/// dominant coordinate of the samples and `num` the runner-up, which keeps
/// the data away from the chart's infinity. Sorted parameters are split into
/// intervals at gaps exceeding `max(0.25·span, 10·span/count)`.
pub(crate) fn range_from_points(
    carrier: &ProjLine,
    points: &[Vector3<f64>],
) -> ((usize, usize), Vec<(f64, f64)>) {
    let mut weight = [0.0f64; 3];
    let mut kept: Vec<Vector3<f64>> = Vec::new();
    for x in points {
        let n = normalize3(x);
        if carrier.0.dot(&n).abs() / (carrier.0.norm() * n.norm()) > 1e-6 {
            continue; // defensive: off-carrier outlier
        }
        for i in 0..3 {
            weight[i] += n[i].abs();
        }
        kept.push(n);
    }
    let den = (0..3).max_by(|&i, &j| weight[i].partial_cmp(&weight[j]).unwrap()).unwrap();
    let num = (0..3)
        .filter(|&i| i != den)
        .max_by(|&i, &j| weight[i].partial_cmp(&weight[j]).unwrap())
        .unwrap();
    let mut ts: Vec<f64> = kept
        .iter()
        .filter(|x| x[den].abs() > 1e-9)
        .map(|x| x[num] / x[den])
        .collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if ts.is_empty() {
        return ((den, num), Vec::new());
    }
    let span = ts[ts.len() - 1] - ts[0];
    if span < 1e-12 {
        return ((den, num), vec![(ts[0], ts[ts.len() - 1])]);
    }
    let gap_limit = (0.25 * span).max(10.0 * span / ts.len() as f64);
    let mut intervals = Vec::new();
    let mut lo = ts[0];
    let mut prev = ts[0];
    for &t in &ts[1..] {
        if t - prev > gap_limit {
            intervals.push((lo, prev));
            lo = t;
        }
        prev = t;
    }
    intervals.push((lo, prev));
    ((den, num), intervals)
}

/// Parameter intervals of the real Frégier points of `C` on a degenerate
/// locus's carrier line. Sampling is deterministic (internal fixed seed);
/// sample points whose construction degenerates are skipped.
pub fn real_range(
    g: Geometry,
    c: &Conic,
    carrier: &ProjLine,
    n: usize,
    tol: Tol,
) -> Result<((usize, usize), Vec<(f64, f64)>)> {
    let pts = sample_points(c, n, RANGE_SEED)?;
    let mut fs: Vec<Vector3<f64>> = Vec::new();
    for p in &pts {
        if let Ok(f) = fregier_point_isotropic(g, c, p, tol) {
            fs.push(normalize3(&f.0));
        }
    }
    if fs.len() < (n / 2).max(4) {
        return Err(Error::SamplingExhausted);
    }
    Ok(range_from_points(carrier, &fs))
}

// ── Locus fitting ──────────────────────────────────────────────────────────

/// Fits the Frégier locus of `C` from `n` deterministic samples.
///
/// Frégier points are computed by the isotropic construction (points where
/// it degenerates are skipped; at least `max(8, n/2)` successes are
/// required). A staged singular-value analysis decides the shape: if the
/// normalized points span only one direction, the locus is a single point;
/// if they span a plane, it is a segment on a carrier line; otherwise a
/// six-column second-Veronese design matrix is solved for the conic, whose
/// smallest singular value must be isolated from the next by a factor 1e-6.
pub fn locus_fit(g: Geometry, c: &Conic, n: usize, seed: u64, tol: Tol) -> Result<LocusResult> {
    if n < 8 {
        return Err(Error::DomainViolation(format!("need at least 8 samples, got {n}")));
    }
    if rank_classify(c, tol).rank < 3 {
        return Err(Error::SingularConic);
    }
    let pts = sample_points(c, n, seed)?;
    let mut fs: Vec<Vector3<f64>> = Vec::new();
    for p in &pts {
        if let Ok(f) = fregier_point_isotropic(g, c, p, tol) {
            fs.push(normalize3(&f.0));
        }
    }
    if fs.len() < (n / 2).max(8) {
        return Err(Error::SamplingExhausted);
    }

    // Stage 1/2: do the Frégier points span a line, a plane, or all of space?
    let m3 = DMatrix::from_fn(fs.len(), 3, |i, j| fs[i][j]);
    let svd3 = m3.svd(false, true);
    let mut s3: Vec<f64> = svd3.singular_values.iter().copied().collect();
    s3.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let vt3 = svd3.v_t.as_ref().expect("requested V^T");
    let row_of = |target: f64| -> Vector3<f64> {
        // Row of V^T whose singular value equals the target (sorted copy).
        let k = svd3
            .singular_values
            .iter()
            .position(|s| *s == target)
            .expect("value from the same decomposition");
        Vector3::new(vt3[(k, 0)], vt3[(k, 1)], vt3[(k, 2)])
    };
    if s3[1] <= 1e-6 * s3[0] {
        let f = ProjPoint(normalize3(&row_of(s3[0])));
        let conic = point_conic(&f);
        let rank = rank_classify(&conic, FIT_TOL);
        return Ok(LocusResult { source: LocusSource::Fitted, conic, rank, shape: LocusShape::Point(f) });
    }
    if s3[2] <= 1e-6 * s3[0] {
        let cv = row_of(s3[2]);
        let carrier = ProjLine(normalize3(&cv));
        let m = cv * cv.transpose();
        let conic = Conic::from_matrix(&m).expect("nonzero").normalized();
        let rank = rank_classify(&conic, FIT_TOL);
        let (chart, real_range) = range_from_points(&carrier, &fs);
        return Ok(LocusResult {
            source: LocusSource::Fitted,
            conic,
            rank,
            shape: LocusShape::Segment { carrier, chart, real_range },
        });
    }

    // Stage 3: Veronese fit of a conic through the points.
    let a = DMatrix::from_fn(fs.len(), 6, |i, j| {
        let x = &fs[i];
        match j {
            0 => x[0] * x[0],
            1 => x[1] * x[1],
            2 => x[2] * x[2],
            3 => 2.0 * x[0] * x[1],
            4 => 2.0 * x[0] * x[2],
            _ => 2.0 * x[1] * x[2],
        }
    });
    let svd6 = a.svd(false, true);
    let mut s6: Vec<f64> = svd6.singular_values.iter().copied().collect();
    s6.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if s6[5] > 1e-6 * s6[4] {
        return Err(Error::FitUnstable);
    }
    let vt6 = svd6.v_t.as_ref().expect("requested V^T");
    let k = svd6
        .singular_values
        .iter()
        .position(|s| *s == s6[5])
        .expect("value from the same decomposition");
    let cvec: Vec<f64> = (0..6).map(|j| vt6[(k, j)]).collect();
    let conic =
        Conic::new(cvec[0], cvec[1], cvec[2], cvec[3], cvec[4], cvec[5])?.normalized();
    let rank = rank_classify(&conic, FIT_TOL);
    let mut shape = degenerate_shape(&conic, &rank, tol)?;
    if let LocusShape::Segment { carrier, chart, real_range } = &mut shape {
        let (ch, rr) = range_from_points(carrier, &fs);
        *chart = ch;
        *real_range = rr;
    }
    Ok(LocusResult { source: LocusSource::Fitted, conic, rank, shape })
}

// ── Tests ──────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::normal_line;
    use crate::projective::collinear;

    fn pt(x0: f64, x1: f64, x2: f64) -> ProjPoint {
        ProjPoint::new(x0, x1, x2).unwrap()
    }

    fn unit_circle() -> Conic {
        Conic::diagonal(-1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn chords_on_circle_give_center() {
        let t = Tol::default();
        let f = fregier_point_chords(Geometry::Euclidean, &unit_circle(), &pt(1.0, 1.0, 0.0), t)
            .unwrap();
        assert!(f.approx_eq(&pt(1.0, 0.0, 0.0), Tol { eps_rel: 1e-8, eps_abs: 1e-11 }));
    }

    #[test]
    fn chords_on_ellipse_vertex() {
        // Vertex [1,2,0] of x1²/4 + x2² = x0² maps to [1, 6/5, 0]: the
        // whole locus is the conic shrunk by 3/5 about the center.
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 0.25, 1.0).unwrap();
        let f = fregier_point_chords(Geometry::Euclidean, &c, &pt(1.0, 2.0, 0.0), t).unwrap();
        assert!(f.approx_eq(&pt(1.0, 1.2, 0.0), Tol { eps_rel: 1e-8, eps_abs: 1e-11 }));
    }

    #[test]
    fn chords_hyperbolic_circle_point() {
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 1.0, 2.0).unwrap(); // x1² + 2x2² = x0²
        let p = pt(1.0, 0.0, std::f64::consts::FRAC_1_SQRT_2);
        let f = fregier_point_chords(Geometry::Hyperbolic, &c, &p, t).unwrap();
        assert!(f.approx_eq(&pt(1.0, 0.0, 0.0), Tol { eps_rel: 1e-8, eps_abs: 1e-11 }));
    }

    #[test]
    fn isotropic_on_circle_gives_center() {
        let t = Tol::default();
        let f = fregier_point_isotropic(Geometry::Euclidean, &unit_circle(), &pt(1.0, 0.0, 1.0), t)
            .unwrap();
        assert!(f.approx_eq(&pt(1.0, 0.0, 0.0), Tol { eps_rel: 1e-8, eps_abs: 1e-11 }));
    }

    #[test]
    fn constructions_agree_across_geometries() {
        let t = Tol::default();
        let agree = Tol { eps_rel: 1e-8, eps_abs: 1e-11 };
        let cases = [
            (Geometry::Euclidean, Conic::diagonal(-1.0, 0.25, 1.0).unwrap()),
            (Geometry::PseudoEuclidean, Conic::diagonal(-1.0, 0.25, 1.0).unwrap()),
            (Geometry::Elliptic, Conic::diagonal(-1.0, 0.5, 2.0).unwrap()),
            (Geometry::Hyperbolic, Conic::diagonal(-1.0, 1.0, 2.0).unwrap()),
        ];
        for (g, c) in cases {
            let mut checked = 0;
            for p in sample_points(&c, 12, 21).unwrap() {
                let fc = fregier_point_chords(g, &c, &p, t);
                let fi = fregier_point_isotropic(g, &c, &p, t);
                match (fc, fi) {
                    (Ok(a), Ok(b)) => {
                        assert!(a.approx_eq(&b, agree), "{g}: constructions disagree");
                        checked += 1;
                    }
                    _ => {} // degenerate sample; skipping is part of the contract
                }
            }
            assert!(checked >= 6, "{g}: too few comparable samples");
        }
    }

    #[test]
    fn pseudo_euclidean_example_agrees() {
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 0.25, 1.0).unwrap();
        let p = pt(1.0, 0.0, 1.0);
        let a = fregier_point_chords(Geometry::PseudoEuclidean, &c, &p, t).unwrap();
        let b = fregier_point_isotropic(Geometry::PseudoEuclidean, &c, &p, t).unwrap();
        assert!(a.approx_eq(&b, Tol { eps_rel: 1e-8, eps_abs: 1e-11 }));
    }

    #[test]
    fn fregier_point_on_normal() {
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 0.25, 1.0).unwrap();
        for g in Geometry::ALL {
            for p in sample_points(&c, 10, 33).unwrap() {
                let (Ok(f), Ok(n)) =
                    (fregier_point_isotropic(g, &c, &p, t), normal_line(g, &c, &p, t))
                else {
                    continue;
                };
                assert!(n.incidence(&f) < 1e-8, "{g}: Frégier point off the normal");
            }
        }
    }

    #[test]
    fn involution_examples() {
        let t = Tol::default();
        let c = unit_circle();
        let r = involution_image(Geometry::Euclidean, &c, &pt(1.0, 0.0, 1.0), &pt(1.0, 1.0, 0.0), t)
            .unwrap();
        assert!(r.approx_eq(&pt(1.0, -1.0, 0.0), Tol { eps_rel: 1e-9, eps_abs: 1e-12 }));
    }

    #[test]
    fn involution_is_involutive_and_collinear_with_f() {
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 0.25, 1.0).unwrap();
        let g = Geometry::Euclidean;
        let p = sample_points(&c, 1, 7).unwrap()[0];
        let f = fregier_point_isotropic(g, &c, &p, t).unwrap();
        let mut tested = 0;
        for q in sample_points(&c, 50, 99).unwrap() {
            if chordal(&q.0, &p.0) < 1e-6 {
                continue;
            }
            let Ok(r) = involution_image(g, &c, &p, &q, t) else { continue };
            let Ok(back) = involution_image(g, &c, &p, &r, t) else { continue };
            assert!(back.approx_eq(&q, Tol { eps_rel: 1e-7, eps_abs: 1e-10 }));
            assert!(collinear(&f, &q, &r, Tol { eps_rel: 1e-7, eps_abs: 1e-10 }));
            tested += 1;
        }
        assert!(tested >= 40);
    }

    #[test]
    fn locus_of_circle_is_its_center() {
        let t = Tol::default();
        let res = locus_fit(Geometry::Euclidean, &unit_circle(), 16, 1, t).unwrap();
        match res.shape {
            LocusShape::Point(f) => {
                assert!(f.approx_eq(&pt(1.0, 0.0, 0.0), Tol { eps_rel: 1e-8, eps_abs: 1e-11 }))
            }
            other => panic!("expected point locus, got {other:?}"),
        }
        assert_eq!(res.rank.rank, 2);
    }

    #[test]
    fn locus_of_ellipse_is_scaled_copy() {
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 0.25, 1.0).unwrap(); // a = 1, b = 1/4
        let res = locus_fit(Geometry::Euclidean, &c, 32, 5, t).unwrap();
        assert_eq!(res.shape, LocusShape::Regular);
        // Scaling by s = (a−b)/(a+b) = 3/5 about the center turns
        // b·x1² + a·x2² = x0² into b·x1² + a·x2² = s²·x0².
        let s = 0.6;
        let expect = Conic::diagonal(-s * s, 0.25, 1.0).unwrap();
        assert!(crate::conic::conic_match(&res.conic, &expect) < 1e-6);
    }

    #[test]
    fn locus_of_right_hyperbola_is_ideal_segment() {
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 1.0, -1.0).unwrap(); // x1² − x2² = x0²
        let res = locus_fit(Geometry::Euclidean, &c, 48, 3, t).unwrap();
        match res.shape {
            LocusShape::Segment { carrier, chart, real_range } => {
                assert!(carrier.approx_eq(&ProjLine::new(1.0, 0.0, 0.0).unwrap(), t));
                assert_eq!(chart, (1, 2));
                assert!(!real_range.is_empty());
                // Ideal points of normals: t = x2/x1 stays strictly inside
                // (−1, 1), excluding the asymptote directions t = ±1.
                for (lo, hi) in real_range {
                    assert!(lo > -1.0 && hi < 1.0, "range [{lo}, {hi}] hits asymptotes");
                }
            }
            other => panic!("expected segment, got {other:?}"),
        }
        assert_eq!(res.rank.rank, 1);
    }

    #[test]
    fn locus_fit_rejects_small_n_and_singular_conics() {
        let t = Tol::default();
        assert!(matches!(
            locus_fit(Geometry::Euclidean, &unit_circle(), 4, 1, t),
            Err(Error::DomainViolation(_))
        ));
        let pair = Conic::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(
            locus_fit(Geometry::Euclidean, &pair, 16, 1, t),
            Err(Error::SingularConic)
        );
    }

    #[test]
    fn real_range_circle_case_inside_unit_interval() {
        // x1² + 2x2² = x0² in hyperbolic geometry: locus degenerates onto
        // x2 = 0, covering a segment strictly inside the absolute.
        let t = Tol::default();
        let c = Conic::diagonal(-1.0, 1.0, 2.0).unwrap();
        let carrier = ProjLine::new(0.0, 0.0, 1.0).unwrap();
        let ((den, num), ivs) = real_range(Geometry::Hyperbolic, &c, &carrier, 64, t).unwrap();
        assert_eq!((den, num), (0, 1));
        assert!(!ivs.is_empty());
        for (lo, hi) in ivs {
            assert!(-1.0 < lo && hi < 1.0, "[{lo}, {hi}] leaves the absolute");
        }
    }

    #[test]
    fn second_intersection_rational_identity() {
        let c = Conic::diagonal(-1.0, 0.25, 1.0).unwrap();
        let p = sample_points(&c, 1, 17).unwrap()[0];
        let l = ProjLine(normalize3(&p.0).cross(&Vector3::new(0.3, 0.9, -0.2)));
        let q = second_intersection(&c, &p, &l).unwrap();
        assert!(c.contains(&q, Tol::default()));
        assert!(l.incidence(&q) < 1e-12);
    }
}
