//! Self-contained SVG charts: metric box plots from sweep results, sample
//! scatter plots over the ground-truth layout, and reward histograms.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mog::{GroundTruthSpec, MoGParams, Sampler};
use crate::pipeline::Variant;
use crate::report::{group_by_setting, metric_values, Metric};
use crate::reward::RewardSpec;
use crate::stats::{boxplot_stats, BoxStats};
use crate::sweep::SweepResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Boxplot,
    Scatter,
    Density,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boxplot" => Ok(PlotKind::Boxplot),
            "scatter" => Ok(PlotKind::Scatter),
            "density" => Ok(PlotKind::Density),
            _ => Err(Error::InvalidArgument(format!("unknown plot kind `{s}`"))),
        }
    }
}

const KA_COLOR: &str = "#d62728";
const AK_COLOR: &str = "#1f77b4";
const FONT: &str = "font-family=\"sans-serif\"";

fn variant_color(v: Variant) -> &'static str {
    match v {
        Variant::KA => KA_COLOR,
        Variant::AK => AK_COLOR,
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Linear map from data values to pixel rows (larger values drawn higher).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearAxis {
    pub min: f64,
    pub max: f64,
    pub px_top: f64,
    pub px_bottom: f64,
}

impl LinearAxis {
    fn padded(lo: f64, hi: f64, px_top: f64, px_bottom: f64) -> Self {
        let (lo, hi) = if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        };
        LinearAxis {
            min: lo,
            max: hi,
            px_top,
            px_bottom,
        }
    }

    pub fn to_px(&self, v: f64) -> f64 {
        self.px_bottom - (v - self.min) / (self.max - self.min) * (self.px_bottom - self.px_top)
    }

    pub fn from_px(&self, px: f64) -> f64 {
        self.min + (self.px_bottom - px) / (self.px_bottom - self.px_top) * (self.max - self.min)
    }
}

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );
}

fn draw_box(out: &mut String, axis: &LinearAxis, cx: f64, half: f64, b: &BoxStats, color: &str) {
    let (top, bottom) = (axis.to_px(b.q3), axis.to_px(b.q1));
    let _ = writeln!(
        out,
        "<line class=\"whisker\" x1=\"{cx:.3}\" y1=\"{:.3}\" x2=\"{cx:.3}\" y2=\"{:.3}\" stroke=\"{color}\"/>",
        axis.to_px(b.whisker_high),
        top
    );
    let _ = writeln!(
        out,
        "<line class=\"whisker\" x1=\"{cx:.3}\" y1=\"{:.3}\" x2=\"{cx:.3}\" y2=\"{:.3}\" stroke=\"{color}\"/>",
        bottom,
        axis.to_px(b.whisker_low)
    );
    let _ = writeln!(
        out,
        "<rect class=\"iqr\" x=\"{:.3}\" y=\"{top:.3}\" width=\"{:.3}\" height=\"{:.3}\" \
         fill=\"{color}\" fill-opacity=\"0.25\" stroke=\"{color}\"/>",
        cx - half,
        2.0 * half,
        bottom - top
    );
    let my = axis.to_px(b.median);
    let _ = writeln!(
        out,
        "<line class=\"median\" x1=\"{:.3}\" y1=\"{my:.3}\" x2=\"{:.3}\" y2=\"{my:.3}\" \
         stroke=\"{color}\" stroke-width=\"2\"/>",
        cx - half,
        cx + half
    );
    for o in &b.outliers {
        let _ = writeln!(
            out,
            "<circle class=\"outlier\" cx=\"{cx:.3}\" cy=\"{:.3}\" r=\"2.5\" fill=\"none\" stroke=\"{color}\"/>",
            axis.to_px(*o)
        );
    }
}

/// Box plot of one metric: one group per setting, KA and AK side by side.
/// The plot group declares its axis map in `data-y-*` attributes.
pub fn boxplot_svg(result: &SweepResult, metric: Metric) -> Result<String> {
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument("empty sweep result".into()));
    }
    let groups = group_by_setting(result);
    let mut boxes = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (gi, (setting, rows)) in groups.iter().enumerate() {
        for variant in Variant::BOTH {
            let values = metric_values(rows, variant, metric);
            if values.is_empty() {
                continue;
            }
            for v in &values {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
            boxes.push((gi, setting.label(), variant, boxplot_stats(&values)?));
        }
    }
    if boxes.is_empty() {
        return Err(Error::InvalidArgument(
            "no successful trials to plot".into(),
        ));
    }

    let group_w = 90.0;
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 110.0);
    let width = left + right + group_w * groups.len() as f64;
    let height = 420.0;
    let axis = LinearAxis::padded(lo, hi, top, height - bottom);

    let mut out = String::new();
    svg_open(&mut out, width, height);
    let _ = writeln!(
        out,
        "<text x=\"{:.3}\" y=\"20\" text-anchor=\"middle\" {FONT} font-size=\"14\">{}</text>",
        width / 2.0,
        metric.name()
    );
    let _ = writeln!(
        out,
        "<g id=\"plot\" data-metric=\"{}\" data-y-min=\"{}\" data-y-max=\"{}\" \
         data-px-top=\"{}\" data-px-bottom=\"{}\">",
        metric.name(),
        axis.min,
        axis.max,
        axis.px_top,
        axis.px_bottom
    );
    let _ = writeln!(
        out,
        "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{:.3}\" stroke=\"black\"/>",
        axis.px_bottom
    );
    for i in 0..=4 {
        let v = axis.min + (axis.max - axis.min) * i as f64 / 4.0;
        let y = axis.to_px(v);
        let _ = writeln!(
            out,
            "<line x1=\"{:.3}\" y1=\"{y:.3}\" x2=\"{left}\" y2=\"{y:.3}\" stroke=\"black\"/>\
             <text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"end\" {FONT}>{v:.3}</text>",
            left - 4.0,
            left - 6.0,
            y + 4.0
        );
    }
    for (gi, (setting, _)) in groups.iter().enumerate() {
        let cx = left + group_w * (gi as f64 + 0.5);
        let _ = writeln!(
            out,
            "<text x=\"{cx:.3}\" y=\"{:.3}\" text-anchor=\"end\" transform=\"rotate(-35 {cx:.3} {:.3})\" {FONT}>{}</text>",
            axis.px_bottom + 16.0,
            axis.px_bottom + 16.0,
            escape(&setting.label())
        );
    }
    for (gi, label, variant, stats) in &boxes {
        let offset = match variant {
            Variant::KA => -18.0,
            Variant::AK => 18.0,
        };
        let cx = left + group_w * (*gi as f64 + 0.5) + offset;
        let _ = writeln!(
            out,
            "<g class=\"box\" data-setting=\"{}\" data-variant=\"{variant}\">",
            escape(label)
        );
        draw_box(&mut out, &axis, cx, 12.0, stats, variant_color(*variant));
        out.push_str("</g>\n");
    }
    out.push_str("</g>\n");
    legend(&mut out, width - 150.0, 12.0);
    out.push_str("</svg>\n");
    Ok(out)
}

fn legend(out: &mut String, x: f64, y: f64) {
    for (i, v) in Variant::BOTH.iter().enumerate() {
        let yy = y + 14.0 * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{x}\" y=\"{yy}\" width=\"10\" height=\"10\" fill=\"{}\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" {FONT}>Pipeline {}</text>",
            variant_color(*v),
            x + 14.0,
            yy + 9.0,
            match v {
                Variant::KA => "K-A",
                Variant::AK => "A-K",
            }
        );
    }
}

/// Sample scatter, one panel per model, over the ground-truth modes
/// (circles of radius two standard deviations, target mode in green).
pub fn scatter_svg<R: Rng + ?Sized>(
    models: &[(String, MoGParams)],
    n_points: usize,
    rng: &mut R,
) -> Result<String> {
    if models.is_empty() {
        return Err(Error::InvalidArgument("no models to plot".into()));
    }
    let gt = GroundTruthSpec::default();
    let panel = 300.0;
    let half = 3.0;
    let width = panel * models.len() as f64;
    let height = panel + 30.0;
    let mut out = String::new();
    svg_open(&mut out, width, height);
    for (i, (label, model)) in models.iter().enumerate() {
        let x0 = panel * i as f64;
        let map = |v: f64| (v + half) / (2.0 * half) * (panel - 20.0) + 10.0;
        let px = |x: f64| x0 + map(x);
        let py = |y: f64| 30.0 + (panel - 20.0) - map(y) + 10.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"20\" text-anchor=\"middle\" {FONT} font-size=\"13\">{}</text>",
            x0 + panel / 2.0,
            escape(label)
        );
        let _ = writeln!(out, "<g class=\"panel\" data-label=\"{}\">", escape(label));
        let r_px = 2.0 * gt.variance.sqrt() / (2.0 * half) * (panel - 20.0);
        for (k, m) in gt.modes.iter().enumerate() {
            let (stroke, width) = if k == gt.target_index {
                ("#2ca02c", 2.5)
            } else {
                ("#999999", 1.0)
            };
            let _ = writeln!(
                out,
                "<circle class=\"mode\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"{r_px:.3}\" fill=\"none\" \
                 stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
                px(m.x),
                py(m.y)
            );
        }
        let sampler = Sampler::new(model, 1.0)?;
        for _ in 0..n_points {
            let p = sampler.draw(rng);
            if p.x.abs() > half || p.y.abs() > half {
                continue;
            }
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.2\" fill=\"#1f77b4\" fill-opacity=\"0.35\"/>",
                px(p.x),
                py(p.y)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Histogram of normalized reward for each model's samples, as step lines
/// over `[0, 1]`.
pub fn density_svg<R: Rng + ?Sized>(
    models: &[(String, MoGParams)],
    spec: &RewardSpec,
    n_points: usize,
    bins: usize,
    rng: &mut R,
) -> Result<String> {
    if models.is_empty() || bins == 0 || n_points == 0 {
        return Err(Error::InvalidArgument(
            "density plot needs models, samples and bins".into(),
        ));
    }
    let mut hists = Vec::with_capacity(models.len());
    for (label, model) in models {
        let sampler = Sampler::new(model, 1.0)?;
        let mut counts = vec![0usize; bins];
        for _ in 0..n_points {
            let r = spec.normalized(&sampler.draw(rng));
            let b = ((r * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let density: Vec<f64> = counts
            .iter()
            .map(|c| *c as f64 / n_points as f64 * bins as f64)
            .collect();
        hists.push((label.clone(), density));
    }
    let ymax = hists
        .iter()
        .flat_map(|(_, d)| d.iter().copied())
        .fold(0.0, f64::max)
        .max(1e-9);
    let (left, top, w, h) = (60.0, 30.0, 480.0, 300.0);
    let axis = LinearAxis {
        min: 0.0,
        max: ymax * 1.05,
        px_top: top,
        px_bottom: top + h,
    };
    let palette = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];

    let mut out = String::new();
    svg_open(&mut out, left + w + 160.0, top + h + 40.0);
    let _ = writeln!(
        out,
        "<line x1=\"{left}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\
         <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" {FONT}>normalized reward</text>",
        top + h,
        left + w,
        top + h,
        left + w / 2.0,
        top + h + 30.0
    );
    for (i, (label, density)) in hists.iter().enumerate() {
        let color = palette[i % palette.len()];
        let mut d = format!("M {left:.3} {:.3}", axis.to_px(0.0));
        for (b, v) in density.iter().enumerate() {
            let x0 = left + w * b as f64 / bins as f64;
            let x1 = left + w * (b + 1) as f64 / bins as f64;
            let y = axis.to_px(*v);
            let _ = write!(d, " L {x0:.3} {y:.3} L {x1:.3} {y:.3}");
        }
        let _ = write!(d, " L {:.3} {:.3}", left + w, axis.to_px(0.0));
        let _ = writeln!(
            out,
            "<path class=\"hist\" data-label=\"{}\" d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            escape(label)
        );
        let ly = top + 14.0 * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"{:.1}\" y=\"{ly:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\" {FONT}>{}</text>",
            left + w + 20.0,
            left + w + 34.0,
            ly + 9.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

/// Box-plot SVG of `metric` written to `out_path`.
pub fn emit_boxplot(result: &SweepResult, metric: Metric, out_path: &Path) -> Result<()> {
    write_svg(out_path, &boxplot_svg(result, metric)?)
}
