//! Pencils spanned by a conic and the absolute conic: singular members,
//! base points, and the five-way contact classification.
//!
//! The pencil `u·C + v·N` contains exactly three singular members counted
//! with multiplicity (the roots of a cubic determinant). The four base
//! points, shared by all members, are recovered by splitting a singular
//! member into lines and intersecting those with `N`; the multiset of base
//! point multiplicities determines how `C` touches `N`.

use nalgebra::{Matrix3, Vector3};

use crate::conic::{
    conic_match, intersect_line_c, rank_classify, split_line_pair, Conic,
};
use crate::projective::{chordal_c, normalize3_c, ProjLineC, ProjPointC, Tol, C64};
use crate::{Error, Result};

/// Contact class of a pencil, by the multiset of base-point multiplicities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PencilClassKind {
    /// Four distinct base points: {1,1,1,1}.
    General,
    /// One tangency: {2,1,1}.
    SimpleContact,
    /// Two tangencies: {2,2}.
    Bitangent,
    /// Three coinciding base points: {3,1}.
    Osculating,
    /// All four base points coincide: {4}.
    Hyperosculating,
}

impl PencilClassKind {
    /// Lowercase tag used in serialized output.
    pub fn tag(&self) -> &'static str {
        match self {
            PencilClassKind::General => "general",
            PencilClassKind::SimpleContact => "simple_contact",
            PencilClassKind::Bitangent => "bitangent",
            PencilClassKind::Osculating => "osculating",
            PencilClassKind::Hyperosculating => "hyperosculating",
        }
    }
}

/// A singular member of the pencil, possibly with complex parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilMember {
    /// Homogeneous pencil parameter `(u : v)` for `u·C + v·N`, normalized.
    pub param: (C64, C64),
    /// The member's matrix (real when the parameter is real).
    pub form: MemberForm,
    /// Rank of the member (1 or 2 for singular members).
    pub rank: u8,
    /// Multiplicity of the parameter as a root of the determinant cubic.
    pub multiplicity: u8,
}

/// Real or complex member matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum MemberForm {
    /// Member at a real pencil parameter.
    Real(Conic),
    /// Member at a complex parameter (conjugate pairs occur together).
    Complex(Matrix3<C64>),
}

/// Full classification record: class, base points, singular members.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilClass {
    /// The contact class.
    pub kind: PencilClassKind,
    /// Base points with multiplicities (sum 4), possibly complex.
    pub base_points: Vec<(ProjPointC, u8)>,
    /// Singular members with root multiplicities (sum 3).
    pub singular_members: Vec<PencilMember>,
}

/// Rank of a complex symmetric 3×3 matrix by largest-minor magnitudes on the
/// max-normalized matrix (adequate here: members come from polished roots,
/// so rank gaps are far larger than the 1e-8 cutoff).
fn complex_rank(m: &Matrix3<C64>) -> u8 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale <= 1e-300 {
        return 0;
    }
    let n = m.map(|z| z / C64::new(scale, 0.0));
    let det = n[(0, 0)] * (n[(1, 1)] * n[(2, 2)] - n[(1, 2)] * n[(2, 1)])
        - n[(0, 1)] * (n[(1, 0)] * n[(2, 2)] - n[(1, 2)] * n[(2, 0)])
        + n[(0, 2)] * (n[(1, 0)] * n[(2, 1)] - n[(1, 1)] * n[(2, 0)]);
    if det.norm() > 1e-8 {
        return 3;
    }
    let mut max_minor = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
            let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
            let minor = n[(r0, c0)] * n[(r1, c1)] - n[(r0, c1)] * n[(r1, c0)];
            max_minor = max_minor.max(minor.norm());
        }
    }
    if max_minor > 1e-8 {
        2
    } else {
        1
    }
}

/// Determinant-cubic coefficients of `det(u·C + v·N)` for Frobenius-normalized
/// forms: `a3·u³ + a2·u²·v + a1·u·v² + a0·v³`.
fn pencil_cubic(cm: &Matrix3<f64>, nm: &Matrix3<f64>) -> [f64; 4] {
    let adj_c = crate::conic::adjugate3(cm);
    let adj_n = crate::conic::adjugate3(nm);
    [
        cm.determinant(),
        (adj_c * nm).trace(),
        (adj_n * cm).trace(),
        nm.determinant(),
    ]
}

fn eval_cubic(c: &[f64; 4], z: C64) -> C64 {
    ((C64::new(c[0], 0.0) * z + C64::new(c[1], 0.0)) * z + C64::new(c[2], 0.0)) * z
        + C64::new(c[3], 0.0)
}

fn eval_cubic_d1(c: &[f64; 4], z: C64) -> C64 {
    (C64::new(3.0 * c[0], 0.0) * z + C64::new(2.0 * c[1], 0.0)) * z + C64::new(c[2], 0.0)
}

fn eval_cubic_d2(c: &[f64; 4], z: C64) -> C64 {
    C64::new(6.0 * c[0], 0.0) * z + C64::new(2.0 * c[1], 0.0)
}

/// Roots of a complex-coefficient polynomial of degree ≤ 3 given by real
/// coefficients `coeffs[0]·z^d + … + coeffs[d]` with `coeffs[0] ≠ 0`.
fn poly_roots(coeffs: &[f64]) -> Vec<C64> {
    match coeffs.len() {
        2 => vec![C64::new(-coeffs[1] / coeffs[0], 0.0)],
        3 => {
            let (a, b, c) = (coeffs[0], coeffs[1], coeffs[2]);
            let disc = C64::new(b * b - 4.0 * a * c, 0.0);
            let s = disc.sqrt();
            let w = if (-C64::new(b, 0.0) - s).norm() >= (-C64::new(b, 0.0) + s).norm() {
                -C64::new(b, 0.0) - s
            } else {
                -C64::new(b, 0.0) + s
            };
            if w.norm() <= 1e-300 {
                // b = 0 and a·c = 0 ⇒ double root at the origin.
                return vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
            }
            vec![w / C64::new(2.0 * a, 0.0), C64::new(2.0 * c, 0.0) / w]
        }
        4 => {
            // Companion-matrix eigenvalues of the monic cubic.
            let (c2, c1, c0) = (
                coeffs[1] / coeffs[0],
                coeffs[2] / coeffs[0],
                coeffs[3] / coeffs[0],
            );
            let comp = Matrix3::new(0.0, 0.0, -c0, 1.0, 0.0, -c1, 0.0, 1.0, -c2);
            comp.complex_eigenvalues().iter().copied().collect()
        }
        _ => Vec::new(),
    }
}

/// Finds all singular members of the pencil `u·C + v·N` with multiplicities.
///
/// The cubic is solved with explicit handling of roots at infinity (leading
/// coefficients vanishing), raw roots are clustered into multiplicity
/// groups, and each group is polished: Newton on the cubic for simple
/// roots, Newton on the derivative for double roots, and the exact inflexion
/// formula for a triple root.
pub fn singular_members(c: &Conic, n: &Conic, tol: Tol) -> Result<Vec<PencilMember>> {
    if conic_match(c, n) <= 1e-9 {
        return Err(Error::ProportionalConics);
    }
    let cm = c.matrix() / c.matrix().norm();
    let nm = n.matrix() / n.matrix().norm();
    let cubic = pencil_cubic(&cm, &nm);
    let scale = cubic.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale <= 1e-14 {
        return Err(Error::DomainViolation(
            "every member of the pencil is singular".into(),
        ));
    }

    // Leading zeros of (a3, a2, a1) put roots at infinity, i.e. at C itself.
    let mut inf_mult = 0usize;
    for k in 0..3 {
        if cubic[k].abs() > 1e-12 * scale {
            break;
        }
        inf_mult += 1;
    }
    let finite: Vec<C64> = if inf_mult < 3 {
        poly_roots(&cubic[inf_mult..])
    } else {
        Vec::new()
    };

    // Cluster raw finite roots; the radius absorbs the eigenvalue solver's
    // O(ε^(1/m)) smearing of an m-fold root.
    let mut remaining: Vec<C64> = finite;
    let mut groups: Vec<(C64, usize)> = Vec::new();
    while let Some(seed) = remaining.pop() {
        let mut members = vec![seed];
        remaining.retain(|r| {
            if (r - seed).norm() <= 2e-4 * (1.0 + seed.norm()) {
                members.push(*r);
                false
            } else {
                true
            }
        });
        let mean = members.iter().sum::<C64>() / C64::new(members.len() as f64, 0.0);
        groups.push((mean, members.len()));
    }

    // Polish each group to the accuracy its multiplicity allows.
    for (root, mult) in groups.iter_mut() {
        match *mult {
            1 => {
                for _ in 0..4 {
                    let d = eval_cubic_d1(&cubic, *root);
                    if d.norm() <= 1e-300 {
                        break;
                    }
                    *root -= eval_cubic(&cubic, *root) / d;
                }
            }
            2 => {
                for _ in 0..4 {
                    let d = eval_cubic_d2(&cubic, *root);
                    if d.norm() <= 1e-300 {
                        break;
                    }
                    *root -= eval_cubic_d1(&cubic, *root) / d;
                }
            }
            _ => {
                if cubic[0].abs() > 1e-12 * scale {
                    *root = C64::new(-cubic[1] / (3.0 * cubic[0]), 0.0);
                }
            }
        }
        if root.im.abs() <= 1e-8 * (1.0 + root.re.abs()) {
            *root = C64::new(root.re, 0.0);
        }
    }

    // Polishing may have collapsed two groups onto the same point.
    groups.sort_by(|a, b| {
        (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap()
    });
    let mut merged: Vec<(C64, usize)> = Vec::new();
    for (root, mult) in groups {
        if let Some(last) = merged.last_mut() {
            if (last.0 - root).norm() <= 1e-8 * (1.0 + root.norm()) {
                last.1 += mult;
                continue;
            }
        }
        merged.push((root, mult));
    }

    // Roots were found for the normalized pair; rescale them so that
    // `u·C + v·N` refers to the matrices as supplied by the caller.
    let to_caller = n.matrix().norm() / c.matrix().norm();
    let mut members: Vec<PencilMember> = Vec::new();
    for (root, mult) in merged {
        let (u, v) = (root * C64::new(to_caller, 0.0), C64::new(1.0, 0.0));
        members.push(build_member(c, n, u, v, mult as u8, tol));
    }
    if inf_mult > 0 {
        members.push(build_member(
            c,
            n,
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            inf_mult as u8,
            tol,
        ));
    }
    Ok(members)
}

fn build_member(c: &Conic, n: &Conic, u: C64, v: C64, multiplicity: u8, tol: Tol) -> PencilMember {
    // Normalize the parameter so its pivot is 1 (fixes scale and phase).
    let pv = Vector3::new(u, v, C64::new(0.0, 0.0));
    let pn = normalize3_c(&pv);
    let (u, v) = (pn[0], pn[1]);
    let real = u.im.abs() <= 1e-9 && v.im.abs() <= 1e-9;
    if real {
        let m = c.matrix() * u.re + n.matrix() * v.re;
        let conic = Conic::from_matrix(&m).expect("pencil member of independent forms");
        let rank = rank_classify(&conic, Tol { eps_rel: 1e-7, eps_abs: tol.eps_abs }).rank;
        PencilMember { param: (u, v), form: MemberForm::Real(conic), rank, multiplicity }
    } else {
        let m = c.matrix().map(|x| C64::new(x, 0.0) * u) + n.matrix().map(|x| C64::new(x, 0.0) * v);
        let rank = complex_rank(&m);
        PencilMember { param: (u, v), form: MemberForm::Complex(m), rank, multiplicity }
    }
}

/// Base points of the pencil through `C` and `N`, with multiplicities
/// summing to 4.
///
/// A real rank-2 singular member is split into its two lines and each line
/// is intersected with `N` (a tangency yields the contact point twice).
/// When the pencil has no real rank-2 member, a rank-1 member's carrier is
/// intersected with `N` and every intersection counts twice.
pub fn base_points(c: &Conic, n: &Conic, tol: Tol) -> Result<Vec<(ProjPointC, u8)>> {
    let members = singular_members(c, n, tol)?;
    let real_conic = |m: &PencilMember| match &m.form {
        MemberForm::Real(c) => Some(*c),
        MemberForm::Complex(_) => None,
    };
    let splitter = members
        .iter()
        .find(|m| m.rank == 2 && matches!(m.form, MemberForm::Real(_)))
        .or_else(|| members.iter().find(|m| m.rank == 1 && matches!(m.form, MemberForm::Real(_))));
    let Some(member) = splitter else {
        return Err(Error::ClassificationAmbiguous(
            "no real singular member to split".into(),
        ));
    };
    let conic = real_conic(member).expect("filtered to real members");
    let weight = if member.rank == 2 { 1u8 } else { 2u8 };
    let (l1, l2) = split_line_pair(&conic, Tol { eps_rel: 1e-7, eps_abs: tol.eps_abs })?;
    let lines: Vec<ProjLineC> = if member.rank == 2 { vec![l1, l2] } else { vec![l1] };
    let adj = crate::conic::adjugate3(&n.matrix()).map(|x| C64::new(x, 0.0));
    let adj_scale = adj.norm();
    let mut raw: Vec<ProjPointC> = Vec::new();
    for line in lines {
        // A line tangent to `n` meets it in a double point that plain root
        // extraction only localizes to √ε; the pole of the line is that
        // contact point exactly, so detect tangency and use the pole.
        let ln = normalize3_c(&line.0);
        let pole = adj * ln;
        let contact = (ln.transpose() * pole)[0].norm();
        let tangent = adj_scale > 1e-300
            && pole.norm() > 1e-9 * adj_scale
            && contact <= 1e-9 * adj_scale * ln.norm() * ln.norm();
        let (x1, x2) = if tangent {
            let p = ProjPointC(pole).normalized();
            (p, p)
        } else {
            intersect_line_c(n, &line, tol)?
        };
        for _ in 0..weight {
            raw.push(x1);
            raw.push(x2);
        }
    }

    // Cluster coincident points (relative radius 1e-6).
    let mut clusters: Vec<(ProjPointC, u8)> = Vec::new();
    'outer: for p in raw {
        for (rep, mult) in clusters.iter_mut() {
            if chordal_c(&rep.0, &p.0) <= 1e-6 {
                *mult += 1;
                continue 'outer;
            }
        }
        clusters.push((p.normalized(), 1));
    }
    clusters.sort_by(|a, b| {
        let key = |p: &ProjPointC| {
            let n = normalize3_c(&p.0);
            [n[0].re, n[0].im, n[1].re, n[1].im, n[2].re, n[2].im]
        };
        b.1.cmp(&a.1).then_with(|| key(&a.0).partial_cmp(&key(&b.0)).unwrap())
    });
    debug_assert_eq!(clusters.iter().map(|c| c.1 as u32).sum::<u32>(), 4);
    Ok(clusters)
}

/// Classifies the contact of `C` with `N` into the five pencil classes.
///
/// The class is read off the multiset of base-point multiplicities and
/// cross-checked against the root/rank pattern of the singular members
/// (a repeated root with a rank-2 member means one tangency; with a rank-1
/// member, two tangencies or a four-fold contact). A mismatch between the
/// two signals raises [`Error::ClassificationAmbiguous`] rather than
/// guessing.
pub fn classify(c: &Conic, n: &Conic, tol: Tol) -> Result<PencilClass> {
    if rank_classify(c, tol).rank < 3 || rank_classify(n, tol).rank < 3 {
        return Err(Error::SingularConic);
    }
    let singular_members = singular_members(c, n, tol)?;
    let base_points = base_points(c, n, tol)?;

    let mut mults: Vec<u8> = base_points.iter().map(|b| b.1).collect();
    mults.sort_unstable_by(|a, b| b.cmp(a));
    let from_points = match mults.as_slice() {
        [1, 1, 1, 1] => PencilClassKind::General,
        [2, 1, 1] => PencilClassKind::SimpleContact,
        [2, 2] => PencilClassKind::Bitangent,
        [3, 1] => PencilClassKind::Osculating,
        [4] => PencilClassKind::Hyperosculating,
        other => {
            return Err(Error::ClassificationAmbiguous(format!(
                "base-point multiplicities {other:?} match no contact class"
            )));
        }
    };

    let repeated = singular_members.iter().find(|m| m.multiplicity >= 2);
    let from_roots = match repeated {
        None => PencilClassKind::General,
        Some(m) => match (m.multiplicity, m.rank) {
            (2, 2) => PencilClassKind::SimpleContact,
            (2, 1) => PencilClassKind::Bitangent,
            (3, 2) => PencilClassKind::Osculating,
            (3, 1) => PencilClassKind::Hyperosculating,
            (mult, rank) => {
                return Err(Error::ClassificationAmbiguous(format!(
                    "singular member with multiplicity {mult} and rank {rank} matches no contact class"
                )));
            }
        },
    };
    if from_points != from_roots {
        return Err(Error::ClassificationAmbiguous(format!(
            "base points give {} but singular members give {}",
            from_points.tag(),
            from_roots.tag()
        )));
    }
    Ok(PencilClass { kind: from_points, base_points, singular_members })
}
