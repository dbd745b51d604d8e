//! Scene assembly and SVG 1.1 output.
//!
//! Projective elements are drawn in the affine chart `x = x1/x0`,
//! `y = x2/x0`, clipped to a caller-chosen viewport. Conics are traced by a
//! rational chord parameterization (no trigonometric point placement), so a
//! hyperbola naturally splits into branch polylines where the trace crosses
//! the line at infinity. The line at infinity itself, when it carries
//! content (the euclidean absolute, or a degenerate locus with carrier
//! `x0 = 0`), is shown as a dashed border annotation just inside the
//! viewport edge. All numbers are formatted with three decimals, making the
//! output byte-stable for fixed inputs.

use fregier_core::conic::{sample_points, Conic};
use fregier_core::fregier::{fregier_point_chords, LocusResult, LocusShape};
use fregier_core::metric::Geometry;
use fregier_core::projective::{chordal, normalize3, Tol};
use fregier_core::Result;
use nalgebra::Vector3;

/// Affine window of the rendering chart.
#[derive(Clone, Copy)]
pub struct Viewport {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Viewport {
    /// Parses `xmin:xmax:ymin:ymax`; both ranges must be nonempty.
    pub fn parse(raw: &str) -> Option<Viewport> {
        let parts: Vec<&str> = raw.split(':').collect();
        let [x0, x1, y0, y1] = parts.as_slice() else {
            return None;
        };
        let p = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
        let vp = Viewport { x0: p(x0)?, x1: p(x1)?, y0: p(y0)?, y1: p(y1)? };
        (vp.x0 < vp.x1 && vp.y0 < vp.y1).then_some(vp)
    }

    fn x_span(&self) -> f64 {
        self.x1 - self.x0
    }

    fn y_span(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Everything needed to draw one configuration.
pub struct Scene<'a> {
    pub geometry: Geometry,
    pub conic: &'a Conic,
    pub show_absolute: bool,
    pub locus: Option<&'a LocusResult>,
    pub triangles: usize,
    pub viewport: Viewport,
    pub size: u32,
    pub seed: u64,
    pub tol: Tol,
}

// ── Canvas ─────────────────────────────────────────────────────────────────

struct Canvas {
    vp: Viewport,
    w: f64,
    h: f64,
    body: String,
}

impl Canvas {
    fn new(vp: Viewport, size: u32) -> Canvas {
        let w = f64::from(size);
        let h = (w * vp.y_span() / vp.x_span()).round().max(1.0);
        Canvas { vp, w, h, body: String::new() }
    }

    fn px(&self, x: f64) -> f64 {
        (x - self.vp.x0) / self.vp.x_span() * self.w
    }

    fn py(&self, y: f64) -> f64 {
        (self.vp.y1 - y) / self.vp.y_span() * self.h
    }

    fn fmt(v: f64) -> String {
        // Flush values that would print as "-0.000".
        let v = if v.abs() < 5e-4 { 0.0 } else { v };
        format!("{v:.3}")
    }

    fn polyline(&mut self, pts: &[(f64, f64)], style: &str) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", Self::fmt(self.px(x)), Self::fmt(self.py(y))))
            .collect();
        self.body
            .push_str(&format!("<polyline fill=\"none\" {style} points=\"{}\"/>\n", coords.join(" ")));
    }

    fn segment(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        self.polyline(&[a, b], style);
    }

    fn circle_marker(&mut self, at: (f64, f64), r: f64, style: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {style}/>\n",
            Self::fmt(self.px(at.0)),
            Self::fmt(self.py(at.1)),
            Self::fmt(r)
        ));
    }

    /// Dashed rectangle just inside the viewport edge, standing in for the
    /// line at infinity.
    fn border_annotation(&mut self, inset: f64, style: &str) {
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" {style}/>\n",
            Self::fmt(inset),
            Self::fmt(inset),
            Self::fmt(self.w - 2.0 * inset),
            Self::fmt(self.h - 2.0 * inset)
        ));
    }

    fn comment(&mut self, text: &str) {
        self.body.push_str(&format!("<!-- {text} -->\n"));
    }

    fn finish(self) -> String {
        let w = self.w as u32;
        let h = self.h as u32;
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
             width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n\
             {}</svg>\n",
            self.body
        )
    }
}

// ── Geometry helpers ───────────────────────────────────────────────────────

/// Second intersection of the line spanned by `pn` (on the conic) and the
/// line `l` through it, by the exact chord identity.
fn second_intersection(c: &Conic, pn: &Vector3<f64>, l: &Vector3<f64>) -> Option<Vector3<f64>> {
    let d = l.cross(pn);
    if d.norm() < 1e-12 * l.norm() {
        return None;
    }
    let dcd = (d.transpose() * c.matrix() * d)[0];
    let pcd = (pn.transpose() * c.matrix() * d)[0];
    let x = pn * dcd - d * (2.0 * pcd);
    if x.norm() < 1e-12 || chordal(&x, pn) < 1e-9 {
        return None;
    }
    Some(x)
}

fn affine(x: &Vector3<f64>) -> Option<(f64, f64)> {
    if x[0].abs() < 1e-12 * x.norm() {
        return None;
    }
    Some((x[1] / x[0], x[2] / x[0]))
}

/// Traces a conic as affine polyline runs. A fresh run starts wherever the
/// trace leaves a generous bounding box around the viewport or jumps across
/// the line at infinity (hyperbola branches).
fn conic_polylines(c: &Conic, vp: &Viewport) -> Result<Vec<Vec<(f64, f64)>>> {
    const STEPS: usize = 2048;
    let s = sample_points(c, 1, 9)?[0];
    let sn = normalize3(&s.0);
    // The two standard basis vectors least aligned with the trace seed span,
    // together with it, all lines through it.
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| sn[i].abs().partial_cmp(&sn[j].abs()).unwrap());
    let mut e1 = Vector3::zeros();
    e1[idx[0]] = 1.0;
    let mut e2 = Vector3::zeros();
    e2[idx[1]] = 1.0;
    let l1 = sn.cross(&e1);
    let l2 = sn.cross(&e2);

    let reach = 25.0 * (vp.x_span() + vp.y_span());
    let cx = (vp.x0 + vp.x1) / 2.0;
    let cy = (vp.y0 + vp.y1) / 2.0;
    let jump = 10.0 * (vp.x_span() + vp.y_span());

    let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    for k in 0..=STEPS {
        let th = std::f64::consts::PI * k as f64 / STEPS as f64;
        let l = l1 * th.cos() + l2 * th.sin();
        let d = l.cross(&sn);
        let dcd = (d.transpose() * c.matrix() * d)[0];
        let scd = (sn.transpose() * c.matrix() * d)[0];
        let x = sn * dcd - d * (2.0 * scd);
        let pt = if x.norm() > 1e-12 { affine(&x) } else { None };
        let pt = pt.filter(|&(ax, ay)| (ax - cx).abs() < reach && (ay - cy).abs() < reach);
        match pt {
            Some(p) => {
                if let Some(&prev) = current.last() {
                    if (p.0 - prev.0).abs() + (p.1 - prev.1).abs() > jump {
                        runs.push(std::mem::take(&mut current));
                    }
                }
                current.push(p);
            }
            None => {
                if !current.is_empty() {
                    runs.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs.retain(|r| r.len() >= 2);
    Ok(runs)
}

/// True when the (normalized) line is numerically the line at infinity.
fn is_line_at_infinity(l: &Vector3<f64>) -> bool {
    let n = normalize3(l);
    n[1].abs() <= 1e-9 && n[2].abs() <= 1e-9
}

/// Clips the affine trace `l0 + l1·x + l2·y = 0` of a projective line to the
/// viewport; `None` when the line misses it (or is the line at infinity).
fn clip_line(l: &Vector3<f64>, vp: &Viewport) -> Option<((f64, f64), (f64, f64))> {
    if is_line_at_infinity(l) {
        return None;
    }
    let n = normalize3(l);
    let (c, a, b) = (n[0], n[1], n[2]);
    let eps = 1e-9 * (vp.x_span() + vp.y_span());
    let mut hits: Vec<(f64, f64)> = Vec::new();
    if b.abs() > 1e-12 {
        for x in [vp.x0, vp.x1] {
            let y = -(c + a * x) / b;
            if y >= vp.y0 - eps && y <= vp.y1 + eps {
                hits.push((x, y));
            }
        }
    }
    if a.abs() > 1e-12 {
        for y in [vp.y0, vp.y1] {
            let x = -(c + b * y) / a;
            if x >= vp.x0 - eps && x <= vp.x1 + eps {
                hits.push((x, y));
            }
        }
    }
    hits.dedup_by(|p, q| (p.0 - q.0).abs() + (p.1 - q.1).abs() < eps);
    if hits.len() < 2 {
        return None;
    }
    // Farthest pair, robust against corner duplicates.
    let mut best = (hits[0], hits[1], -1.0);
    for i in 0..hits.len() {
        for j in i + 1..hits.len() {
            let d = (hits[i].0 - hits[j].0).abs() + (hits[i].1 - hits[j].1).abs();
            if d > best.2 {
                best = (hits[i], hits[j], d);
            }
        }
    }
    (best.2 > eps).then_some((best.0, best.1))
}

// ── Styles ─────────────────────────────────────────────────────────────────

const STYLE_CONIC: &str = "stroke=\"#1f77b4\" stroke-width=\"2\"";
const STYLE_ABSOLUTE: &str = "stroke=\"#999999\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"";
const STYLE_LOCUS: &str = "stroke=\"#d62728\" stroke-width=\"1.5\"";
const STYLE_LOCUS_FAINT: &str = "stroke=\"#d62728\" stroke-width=\"0.75\" stroke-dasharray=\"2 3\"";
const STYLE_LOCUS_BORDER: &str = "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"";
const STYLE_LEG: &str = "stroke=\"#2ca02c\" stroke-width=\"1\"";
const STYLE_HYPOTENUSE: &str = "stroke=\"#ff7f0e\" stroke-width=\"1.5\"";
const MARKER_FREGIER: &str = "fill=\"#d62728\" stroke=\"none\"";
const MARKER_BASE: &str = "fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\"";

// ── Scene assembly ─────────────────────────────────────────────────────────

fn draw_absolute(canvas: &mut Canvas, scene: &Scene) -> Result<()> {
    match scene.geometry {
        Geometry::Hyperbolic => {
            let absolute = scene.geometry.primal_absolute().expect("regular absolute");
            for run in conic_polylines(&absolute, &canvas.vp)? {
                canvas.polyline(&run, STYLE_ABSOLUTE);
            }
        }
        Geometry::Elliptic => {
            canvas.comment("elliptic absolute has no real points");
        }
        Geometry::Euclidean => {
            canvas.border_annotation(2.0, STYLE_ABSOLUTE);
        }
        Geometry::PseudoEuclidean => {
            canvas.border_annotation(2.0, STYLE_ABSOLUTE);
            // The two real isotropic directions, anchored at the origin.
            let vp = canvas.vp;
            for slope in [1.0, -1.0] {
                let lo = vp.x0.max(slope * if slope > 0.0 { vp.y0 } else { vp.y1 });
                let hi = vp.x1.min(slope * if slope > 0.0 { vp.y1 } else { vp.y0 });
                if lo < hi {
                    canvas.segment((lo, slope * lo), (hi, slope * hi), STYLE_ABSOLUTE);
                }
            }
        }
    }
    Ok(())
}

fn draw_locus(canvas: &mut Canvas, locus: &LocusResult, vp: &Viewport) -> Result<()> {
    match &locus.shape {
        LocusShape::Regular => {
            for run in conic_polylines(&locus.conic, vp)? {
                canvas.polyline(&run, STYLE_LOCUS);
            }
        }
        LocusShape::Point(p) => {
            if let Some(at) = affine(&normalize3(&p.0)) {
                canvas.circle_marker(at, 4.0, MARKER_FREGIER);
            }
        }
        LocusShape::CrossedLines(l1, l2) => {
            for l in [l1, l2] {
                if is_line_at_infinity(&l.0) {
                    canvas.border_annotation(6.0, STYLE_LOCUS_BORDER);
                } else if let Some((a, b)) = clip_line(&l.0, vp) {
                    canvas.segment(a, b, STYLE_LOCUS);
                }
            }
        }
        LocusShape::Segment { carrier, chart, real_range } => {
            if is_line_at_infinity(&carrier.0) {
                canvas.border_annotation(6.0, STYLE_LOCUS_BORDER);
                return Ok(());
            }
            if let Some((a, b)) = clip_line(&carrier.0, vp) {
                canvas.segment(a, b, STYLE_LOCUS_FAINT);
            }
            // Real sub-ranges, drawn solid over the faint carrier. The point
            // with chart value t has x[den] = 1, x[num] = t, and the third
            // coordinate solved from the carrier equation.
            let (den, num) = *chart;
            let k = 3 - den - num;
            let ln = normalize3(&carrier.0);
            if ln[k].abs() < 1e-9 {
                return Ok(());
            }
            for &(lo, hi) in real_range {
                let pts: Vec<(f64, f64)> = (0..=64)
                    .filter_map(|i| {
                        let t = lo + (hi - lo) * i as f64 / 64.0;
                        let mut x = Vector3::zeros();
                        x[den] = 1.0;
                        x[num] = t;
                        x[k] = -(ln[den] + t * ln[num]) / ln[k];
                        affine(&x)
                    })
                    .collect();
                canvas.polyline(&pts, STYLE_LOCUS);
            }
        }
    }
    Ok(())
}

fn draw_triangles(canvas: &mut Canvas, scene: &Scene) -> Result<()> {
    let c = scene.conic;
    let samples = sample_points(c, 8, scene.seed)?;
    // Prefer a base point that is visible in the viewport.
    let visible = |p: &Vector3<f64>| {
        affine(&normalize3(p)).is_some_and(|(x, y)| {
            x >= canvas.vp.x0 && x <= canvas.vp.x1 && y >= canvas.vp.y0 && y <= canvas.vp.y1
        })
    };
    let p = samples.iter().find(|p| visible(&p.0)).unwrap_or(&samples[0]);
    let f = fregier_point_chords(scene.geometry, c, p, scene.tol)?;
    let pn = normalize3(&p.0);
    let dual = scene.geometry.dual_absolute();

    let mut drawn = 0usize;
    let mut attempt = 0usize;
    while drawn < scene.triangles && attempt < 16 * scene.triangles + 16 {
        attempt += 1;
        // Deterministic direction sweep: golden-angle steps stay well
        // distributed for any triangle count.
        let th = 2.399963229728653 * attempt as f64 + 0.35;
        let probe = Vector3::new(th.cos(), th.sin(), (2.0 * th).sin() * 0.6 + 0.2);
        let leg1 = pn.cross(&probe);
        if leg1.norm() < 1e-9 {
            continue;
        }
        let leg2 = (dual * leg1).cross(&pn);
        if leg2.norm() < 1e-9 * leg1.norm() || chordal(&leg1, &leg2) < 1e-6 {
            continue; // isotropic chord: the right angle degenerates
        }
        let (Some(q), Some(r)) = (
            second_intersection(c, &pn, &leg1),
            second_intersection(c, &pn, &leg2),
        ) else {
            continue;
        };
        let (Some(ap), Some(aq), Some(ar)) =
            (affine(&pn), affine(&normalize3(&q)), affine(&normalize3(&r)))
        else {
            continue;
        };
        canvas.segment(ap, aq, STYLE_LEG);
        canvas.segment(ap, ar, STYLE_LEG);
        canvas.segment(aq, ar, STYLE_HYPOTENUSE);
        drawn += 1;
    }
    if let Some(af) = affine(&normalize3(&f.0)) {
        canvas.circle_marker(af, 3.5, MARKER_FREGIER);
    }
    if let Some(ap) = affine(&pn) {
        canvas.circle_marker(ap, 3.0, MARKER_BASE);
    }
    Ok(())
}

/// Renders the scene to a complete SVG document.
pub fn render_scene(scene: &Scene) -> Result<String> {
    let mut canvas = Canvas::new(scene.viewport, scene.size);
    if scene.show_absolute {
        draw_absolute(&mut canvas, scene)?;
    }
    for run in conic_polylines(scene.conic, &scene.viewport)? {
        canvas.polyline(&run, STYLE_CONIC);
    }
    if let Some(locus) = scene.locus {
        draw_locus(&mut canvas, locus, &scene.viewport)?;
    }
    if scene.triangles > 0 {
        draw_triangles(&mut canvas, scene)?;
    }
    Ok(canvas.finish())
}
