//! Minimal SVG line plots for experiment outputs.
//!
//! The renderer is deliberately small: solid and dashed polylines, point
//! markers, nice-number ticks. Output bytes are a pure function of the
//! data (fixed canvas, two-decimal pixel coordinates), which keeps repeat
//! runs byte-identical. A plot with no finite points renders to nothing;
//! the caller records a skipped verdict instead of writing a file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 38.0;
const MARGIN_B: f64 = 48.0;

/// Line colors cycle through this palette in curve order.
const COLORS: [&str; 4] = ["#1f6feb", "#d4622a", "#2da44e", "#8250df"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    Solid,
    Dashed,
}

#[derive(Debug, Clone)]
struct Curve {
    points: Vec<(f64, f64)>,
    style: Style,
}

/// A single x-y chart under construction.
#[derive(Debug, Clone)]
pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    curves: Vec<Curve>,
    markers: Vec<(f64, f64, String)>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            curves: Vec::new(),
            markers: Vec::new(),
        }
    }

    pub fn line(mut self, points: &[(f64, f64)]) -> Self {
        self.curves.push(Curve {
            points: points.to_vec(),
            style: Style::Solid,
        });
        self
    }

    /// Dashed overlay, used for fitted or reference curves.
    pub fn dashed(mut self, points: &[(f64, f64)]) -> Self {
        self.curves.push(Curve {
            points: points.to_vec(),
            style: Style::Dashed,
        });
        self
    }

    /// A labeled point, drawn over the curves.
    pub fn marker(mut self, x: f64, y: f64, label: &str) -> Self {
        self.markers.push((x, y, label.to_string()));
        self
    }

    /// The SVG document, or None when no curve has a finite point.
    pub fn render(&self) -> Option<String> {
        let mut finite: Vec<(f64, f64)> = Vec::new();
        for curve in &self.curves {
            finite.extend(curve.points.iter().copied());
        }
        finite.extend(self.markers.iter().map(|&(x, y, _)| (x, y)));
        finite.retain(|(x, y)| x.is_finite() && y.is_finite());
        if finite.is_empty() {
            return None;
        }

        let (x_lo, x_hi) = padded_range(finite.iter().map(|p| p.0));
        let (y_lo, y_hi) = padded_range(finite.iter().map(|p| p.1));
        let to_px = |x: f64, y: f64| -> (f64, f64) {
            let px = MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
            let py = HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);
            (px, py)
        };

        let mut svg = String::new();
        let _ = write!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
        );
        let _ = write!(
            svg,
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
        );
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        );

        // gridlines and tick labels
        let (x_ticks, x_step) = nice_ticks(x_lo, x_hi);
        let (y_ticks, y_step) = nice_ticks(y_lo, y_hi);
        for &t in &x_ticks {
            let (px, _) = to_px(t, y_lo);
            let _ = write!(
                svg,
                "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>\n",
                MARGIN_T,
                HEIGHT - MARGIN_B
            );
            let _ = write!(
                svg,
                "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
                HEIGHT - MARGIN_B + 16.0,
                tick_label(t, x_step)
            );
        }
        for &t in &y_ticks {
            let (_, py) = to_px(x_lo, t);
            let _ = write!(
                svg,
                "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\"/>\n",
                MARGIN_L,
                WIDTH - MARGIN_R
            );
            let _ = write!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
                MARGIN_L - 7.0,
                py + 4.0,
                tick_label(t, y_step)
            );
        }

        // frame
        let _ = write!(
            svg,
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"none\" stroke=\"#444444\"/>\n",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );

        // curves, split at non-finite points so gaps stay gaps
        for (i, curve) in self.curves.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let dash = match curve.style {
                Style::Solid => String::new(),
                Style::Dashed => " stroke-dasharray=\"6 4\"".to_string(),
            };
            let mut segment: Vec<(f64, f64)> = Vec::new();
            let flush = |seg: &mut Vec<(f64, f64)>, svg: &mut String| {
                if seg.len() >= 2 {
                    let pts: Vec<String> = seg
                        .iter()
                        .map(|&(x, y)| {
                            let (px, py) = to_px(x, y);
                            format!("{px:.2},{py:.2}")
                        })
                        .collect();
                    let _ = write!(
                        svg,
                        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"{dash} \
                         points=\"{}\"/>\n",
                        pts.join(" ")
                    );
                }
                seg.clear();
            };
            for &(x, y) in &curve.points {
                if x.is_finite() && y.is_finite() {
                    segment.push((x, y));
                } else {
                    flush(&mut segment, &mut svg);
                }
            }
            flush(&mut segment, &mut svg);
        }

        for (x, y, label) in &self.markers {
            if !(x.is_finite() && y.is_finite()) {
                continue;
            }
            let (px, py) = to_px(*x, *y);
            let _ = write!(
                svg,
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"#c4302b\"/>\n"
            );
            let _ = write!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#c4302b\">{}</text>\n",
                px + 7.0,
                py - 6.0,
                escape(label)
            );
        }

        // axis labels
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
            MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let y_mid = MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0;
        let _ = write!(
            svg,
            "<text x=\"16\" y=\"{y_mid:.2}\" text-anchor=\"middle\" font-size=\"12\" \
             transform=\"rotate(-90 16 {y_mid:.2})\">{}</text>\n",
            escape(&self.y_label)
        );
        svg.push_str("</svg>\n");
        Some(svg)
    }

    /// Writes the SVG and reports true, or reports false without touching
    /// the filesystem when there is nothing to draw.
    pub fn write(&self, path: &Path) -> Result<bool> {
        match self.render() {
            Some(svg) => {
                fs::write(path, svg).map_err(|e| Error::io(path, e))?;
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// Data range with a small pad; degenerate spans widen symmetrically so a
/// constant series still gets a drawable box.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = hi - lo;
    if span <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    (lo - 0.03 * span, hi + 0.03 * span)
}

/// Tick positions at multiples of a 1-2-5 step, and the step itself (the
/// step fixes how many decimals the labels need).
fn nice_ticks(lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let span = hi - lo;
    let raw = span / 5.0;
    let exp = raw.log10().floor();
    let base = 10f64.powf(exp);
    let mantissa = raw / base;
    let step = base
        * if mantissa < 1.5 {
            1.0
        } else if mantissa < 3.5 {
            2.0
        } else if mantissa < 7.5 {
            5.0
        } else {
            10.0
        };
    let mut ticks = Vec::new();
    let mut k = (lo / step).ceil();
    // Nudge off values that round just outside from accumulated error.
    if (k - 1.0) * step >= lo - 1e-9 * span {
        k -= 1.0;
    }
    while k * step <= hi + 1e-9 * span {
        ticks.push(k * step);
        k += 1.0;
    }
    (ticks, step)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let decimals = decimals.min(12);
    format!("{v:.decimals$}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_are_byte_stable() {
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.05;
                (t, 0.3 * (1.0 - (-t).exp()))
            })
            .collect();
        let plot = Plot::new("sup u", "t", "sup u(t)").line(&pts).marker(
            5.0,
            0.3,
            "steady",
        );
        let a = plot.render().unwrap();
        let b = plot.render().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("<polyline"));
        assert!(a.contains("<circle"));
    }

    #[test]
    fn empty_series_skip_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.svg");
        let plot = Plot::new("nothing", "x", "y").line(&[]);
        assert!(!plot.write(&path).unwrap());
        assert!(!path.exists());

        let all_nan = Plot::new("nan", "x", "y").line(&[(f64::NAN, 1.0), (0.5, f64::NAN)]);
        assert!(all_nan.render().is_none());
    }

    #[test]
    fn nan_rows_split_the_polyline() {
        let plot = Plot::new("gap", "x", "y").line(&[
            (0.0, 0.0),
            (1.0, 1.0),
            (2.0, f64::NAN),
            (3.0, 1.0),
            (4.0, 0.0),
        ]);
        let svg = plot.render().unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn dashed_overlays_get_a_dash_pattern() {
        let svg = Plot::new("fit", "lambda", "T")
            .line(&[(1.0, 1.0), (2.0, 0.5)])
            .dashed(&[(1.0, 1.1), (2.0, 0.45)])
            .render()
            .unwrap();
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn ticks_cover_the_range_with_sensible_counts() {
        for (lo, hi) in [(0.0, 0.35), (-2.0, 7.0), (5.0, 5.0 + 1e-11), (0.1, 0.1004)] {
            let (lo, hi) = padded_range([lo, hi].into_iter());
            let (ticks, step) = nice_ticks(lo, hi);
            assert!(step > 0.0);
            assert!(
                (3..=9).contains(&ticks.len()),
                "{} ticks for [{lo}, {hi}]",
                ticks.len()
            );
            assert!(ticks.windows(2).all(|w| w[1] > w[0]));
            assert!(ticks.iter().all(|&t| t >= lo - 1e-9 && t <= hi + 1e-9));
        }
    }
}
