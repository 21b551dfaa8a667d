//! Hand-written SVG figures: the zeros, the real locus of `h`, the image of
//! the fundamental domain under `h`, and the circles the zeros sit on.
//!
//! Data coordinates map affinely onto a plot rectangle with `y` pointing up.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eisenstein::SQRT3_OVER_2;
use crate::equivariant;
use crate::error::{Error, Result};
use crate::zerofinder::{ZeroRecord, STRIP_EPS, V0};

const MARGIN: f64 = 56.0;
const MARKER_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    ZerosScatter,
    RealLocus,
    HImage,
    Circles,
}

impl Figure {
    pub fn name(&self) -> &'static str {
        match self {
            Figure::ZerosScatter => "zeros_scatter",
            Figure::RealLocus => "real_locus",
            Figure::HImage => "h_image",
            Figure::Circles => "circles",
        }
    }

    pub fn parse(name: &str) -> Option<Figure> {
        match name {
            "zeros_scatter" => Some(Figure::ZerosScatter),
            "real_locus" => Some(Figure::RealLocus),
            "h_image" => Some(Figure::HImage),
            "circles" => Some(Figure::Circles),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotSpec {
    pub figure: Figure,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub width_px: u32,
    pub height_px: u32,
    /// `y = (π/(6d²)) x²` for `d = 1..4` on the zeros scatter.
    pub parabolas: bool,
    /// Dashed lines at `6/π ± .000283` on the real-locus figure.
    pub strip_lines: bool,
    /// Samples per traced curve.
    pub samples: usize,
    /// Top of the vertical sides of `D` traced for the `h` image.
    pub y_max: f64,
}

impl PlotSpec {
    pub fn default_for(figure: Figure) -> Self {
        let (x_range, y_range) = match figure {
            Figure::ZerosScatter => ((-0.5, 0.5), (0.002, 0.022)),
            Figure::RealLocus => ((-0.5, 0.5), (V0 - 0.0004, V0 + 0.0004)),
            Figure::HImage => ((-0.75, 0.75), (-1.1, 2.3)),
            Figure::Circles => ((-0.5, 0.5), (0.0, 0.56)),
        };
        PlotSpec {
            figure,
            x_range,
            y_range,
            width_px: 720,
            height_px: 480,
            parabolas: true,
            strip_lines: true,
            samples: 1000,
            y_max: 4.0,
        }
    }

    pub fn validate(&self, expected: Figure) -> Result<()> {
        if self.figure != expected {
            return Err(Error::InvalidPlotSpec(format!(
                "figure {} passed to the {} renderer",
                self.figure.name(),
                expected.name()
            )));
        }
        let nonempty = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        if !nonempty(self.x_range) || !nonempty(self.y_range) {
            return Err(Error::InvalidPlotSpec("ranges must be nonempty".into()));
        }
        if self.width_px < 64 || self.height_px < 64 {
            return Err(Error::InvalidPlotSpec("pixel dimensions must be at least 64".into()));
        }
        if self.samples < 2 {
            return Err(Error::InvalidPlotSpec("at least two samples per curve".into()));
        }
        Ok(())
    }
}

struct Canvas {
    spec: PlotSpec,
    body: String,
}

impl Canvas {
    fn new(spec: PlotSpec, title: &str) -> Self {
        let mut canvas = Canvas {
            spec,
            body: String::new(),
        };
        canvas.frame(title);
        canvas
    }

    fn plot_width(&self) -> f64 {
        self.spec.width_px as f64 - 2.0 * MARGIN
    }

    fn plot_height(&self) -> f64 {
        self.spec.height_px as f64 - 2.0 * MARGIN
    }

    fn px(&self, x: f64) -> f64 {
        let (x0, x1) = self.spec.x_range;
        MARGIN + (x - x0) / (x1 - x0) * self.plot_width()
    }

    fn py(&self, y: f64) -> f64 {
        let (y0, y1) = self.spec.y_range;
        MARGIN + (1.0 - (y - y0) / (y1 - y0)) * self.plot_height()
    }

    fn scale(&self) -> (f64, f64) {
        let (x0, x1) = self.spec.x_range;
        let (y0, y1) = self.spec.y_range;
        (self.plot_width() / (x1 - x0), self.plot_height() / (y1 - y0))
    }

    fn in_range(&self, x: f64, y: f64) -> bool {
        let (x0, x1) = self.spec.x_range;
        let (y0, y1) = self.spec.y_range;
        (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
    }

    fn frame(&mut self, title: &str) {
        let (w, h) = (self.plot_width(), self.plot_height());
        let _ = writeln!(
            self.body,
            r#"<defs><clipPath id="plot-area"><rect x="{MARGIN}" y="{MARGIN}" width="{w:.2}" height="{h:.2}"/></clipPath></defs>"#
        );
        let _ = writeln!(
            self.body,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black" stroke-width="1"/>"#
        );
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
            self.spec.width_px as f64 / 2.0,
            MARGIN / 2.0,
            escape(title)
        );
        let (x0, x1) = self.spec.x_range;
        let (y0, y1) = self.spec.y_range;
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let x = x0 + t * (x1 - x0);
            let y = y0 + t * (y1 - y0);
            let (px, py) = (self.px(x), self.py(y));
            let bottom = MARGIN + h;
            let _ = writeln!(
                self.body,
                r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="10">{}</text>"#,
                bottom + 4.0,
                bottom + 16.0,
                tick_label(x)
            );
            let _ = writeln!(
                self.body,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">{}</text>"#,
                MARGIN - 4.0,
                MARGIN - 6.0,
                py + 3.0,
                tick_label(y)
            );
        }
    }

    fn polyline(&mut self, class: &str, points: &[(f64, f64)], stroke: &str, dashed: bool) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<polyline class="{class}" clip-path="url(#plot-area)" fill="none" stroke="{stroke}" stroke-width="1"{dash} points="{}"/>"#,
            coords.join(" ")
        );
    }

    fn hline(&mut self, class: &str, y: f64, stroke: &str) {
        let (x0, x1) = self.spec.x_range;
        self.polyline(class, &[(x0, y), (x1, y)], stroke, true);
    }

    fn marker(&mut self, class: &str, x: f64, y: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{MARKER_RADIUS}" fill="{fill}"/>"#,
            self.px(x),
            self.py(y)
        );
    }

    fn ellipse(&mut self, class: &str, cx: f64, cy: f64, r: f64, stroke: &str) {
        let (sx, sy) = self.scale();
        let _ = writeln!(
            self.body,
            r#"<ellipse class="{class}" clip-path="url(#plot-area)" cx="{:.3}" cy="{:.3}" rx="{:.3}" ry="{:.3}" fill="none" stroke="{stroke}" stroke-width="0.6"/>"#,
            self.px(cx),
            self.py(cy),
            r * sx,
            r * sy
        );
    }

    fn finish(self) -> String {
        let (w, h) = (self.spec.width_px, self.spec.height_px);
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Refined zeros inside the plot window, optionally with the parabolas
/// `y = (π/(6d²)) x²` on which zeros sharing the same `d` lie.
pub fn render_zeros(catalog: &[ZeroRecord], spec: &PlotSpec) -> Result<String> {
    spec.validate(Figure::ZerosScatter)?;
    let mut canvas = Canvas::new(*spec, "Zeros of E2");
    if spec.parabolas {
        let (x0, x1) = spec.x_range;
        for d in 1..=4 {
            let k = PI / (6.0 * (d * d) as f64);
            let points: Vec<(f64, f64)> = (0..spec.samples)
                .map(|i| {
                    let x = x0 + (x1 - x0) * i as f64 / (spec.samples - 1) as f64;
                    (x, k * x * x)
                })
                .collect();
            canvas.polyline(&format!("parabola d{d}"), &points, "#888888", true);
        }
    }
    for r in catalog {
        if canvas.in_range(r.refined.re, r.refined.im) {
            canvas.marker("zero", r.refined.re, r.refined.im, "black");
        }
    }
    Ok(canvas.finish())
}

/// Heights of the real locus of `h` at `samples` points of `[-1/2, 1/2]`.
pub fn real_locus_curve(samples: usize) -> Result<Vec<(f64, f64)>> {
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let x = -0.5 + k as f64 / (samples.max(2) - 1) as f64;
            Ok((x, equivariant::real_locus_height(x)?))
        })
        .collect()
}

pub fn render_real_locus(spec: &PlotSpec) -> Result<String> {
    spec.validate(Figure::RealLocus)?;
    let curve = real_locus_curve(spec.samples)?;
    let mut canvas = Canvas::new(*spec, "Real locus of h in D");
    if spec.strip_lines {
        canvas.hline("strip upper", V0 + STRIP_EPS, "#888888");
        canvas.hline("strip lower", V0 - STRIP_EPS, "#888888");
    }
    canvas.polyline("locus", &curve, "black", false);
    Ok(canvas.finish())
}

/// `h` along the left side, right side and bottom arc of `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct HImageTraces {
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
    pub arc: Vec<Complex64>,
}

/// Samples `h` on the boundary of `D`; points within the pole threshold are
/// skipped.
pub fn h_image_traces(y_max: f64, samples: usize) -> Result<HImageTraces> {
    let n = samples.max(2);
    let trace = |point: &(dyn Fn(f64) -> Complex64 + Sync)| -> Result<Vec<Complex64>> {
        let values = (0..n)
            .into_par_iter()
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                Ok(equivariant::eval_h(point(t))?.value.finite())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(values.into_iter().flatten().collect())
    };
    let side = |x: f64| move |t: f64| Complex64::new(x, SQRT3_OVER_2 + t * (y_max - SQRT3_OVER_2));
    Ok(HImageTraces {
        left: trace(&side(-0.5))?,
        right: trace(&side(0.5))?,
        arc: trace(&|t: f64| Complex64::from_polar(1.0, PI / 3.0 + t * PI / 3.0))?,
    })
}

pub fn render_h_image(spec: &PlotSpec) -> Result<String> {
    spec.validate(Figure::HImage)?;
    let traces = h_image_traces(spec.y_max, spec.samples)?;
    let mut canvas = Canvas::new(*spec, "Image of D under h");
    let pts = |v: &[Complex64]| v.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>();
    canvas.polyline("image left", &pts(&traces.left), "black", false);
    canvas.polyline("image right", &pts(&traces.right), "black", false);
    canvas.polyline("image arc", &pts(&traces.arc), "black", false);
    canvas.hline("real axis", 0.0, "#888888");
    Ok(canvas.finish())
}

/// For each zero, the circle tangent to the real line at `-d/c` with
/// diameter `1/(c² v0)`, and the zero itself.
pub fn render_circles(catalog: &[ZeroRecord], spec: &PlotSpec) -> Result<String> {
    spec.validate(Figure::Circles)?;
    let mut canvas = Canvas::new(*spec, "Zeros of E2 on the circles of the real locus");
    for r in catalog {
        let c = r.c() as f64;
        let radius = 0.5 / (c * c * V0);
        canvas.ellipse("circle", r.label.value(), radius, radius, "#888888");
    }
    for r in catalog {
        if canvas.in_range(r.refined.re, r.refined.im) {
            canvas.marker("zero", r.refined.re, r.refined.im, "black");
        }
    }
    Ok(canvas.finish())
}

fn write(path: impl AsRef<Path>, svg: String) -> Result<()> {
    fs::write(path, svg)?;
    Ok(())
}

pub fn plot_zeros_svg(catalog: &[ZeroRecord], spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    write(path, render_zeros(catalog, spec)?)
}

pub fn plot_real_locus_svg(spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    write(path, render_real_locus(spec)?)
}

pub fn plot_h_image_svg(spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    write(path, render_h_image(spec)?)
}

pub fn plot_circles_svg(catalog: &[ZeroRecord], spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    write(path, render_circles(catalog, spec)?)
}
