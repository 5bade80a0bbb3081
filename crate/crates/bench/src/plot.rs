//! Log-scale convergence charts as standalone SVG.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::output::read_trace_csv;
use crate::{Error, Result};

/// Gaps below this are drawn at the floor.
pub const GAP_FLOOR: f64 = 1e-16;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// One line of the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub epochs: Vec<usize>,
    pub gaps: Vec<f64>,
}

/// `sdca_seed3.csv` → `sdca`
pub fn series_label(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match stem.rfind("_seed") {
        Some(i) if stem[i + 5..].chars().all(|c| c.is_ascii_digit()) && i + 5 < stem.len() => {
            stem[..i].to_owned()
        }
        _ => stem,
    }
}

/// Reads trace CSVs and averages the gap over files sharing a label.
pub fn load_series(paths: &[PathBuf]) -> Result<Vec<Series>> {
    if paths.is_empty() {
        return Err(Error::Plot("no input traces".into()));
    }
    let mut groups: BTreeMap<String, (Vec<usize>, Vec<f64>, usize)> = BTreeMap::new();
    let mut axis: Option<Vec<usize>> = None;
    for path in paths {
        let t = read_trace_csv(path)?;
        if let Some(a) = &axis {
            if *a != t.epochs {
                return Err(Error::Plot(format!(
                    "{}: epoch grid differs from the other traces",
                    path.display()
                )));
            }
        } else {
            axis = Some(t.epochs.clone());
        }
        let gaps: Vec<f64> = t
            .gap
            .iter()
            .map(|g| {
                g.ok_or_else(|| Error::Plot(format!("{}: trace has no gap column", path.display())))
            })
            .collect::<Result<_>>()?;
        let entry = groups
            .entry(series_label(path))
            .or_insert_with(|| (t.epochs.clone(), vec![0.0; gaps.len()], 0));
        for (s, g) in entry.1.iter_mut().zip(&gaps) {
            *s += g;
        }
        entry.2 += 1;
    }
    Ok(groups
        .into_iter()
        .map(|(label, (epochs, sums, count))| Series {
            label,
            epochs,
            gaps: sums.into_iter().map(|s| s / count as f64).collect(),
        })
        .collect())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(series: &[Series], title: &str) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.epochs.is_empty()) {
        return Err(Error::Plot("nothing to plot".into()));
    }
    let max_epoch = series
        .iter()
        .flat_map(|s| s.epochs.iter().copied())
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let logs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.gaps.iter().map(|&g| g.max(GAP_FLOOR).log10()))
        .collect();
    let mut lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let mut hi = logs
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        .ceil();
    if hi <= lo {
        lo -= 1.0;
        hi += 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let x = |e: f64| LEFT + pw * e / max_epoch;
    let y = |l: f64| TOP + ph * (hi - l) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let step = ((hi - lo) / 8.0).ceil().max(1.0);
    let mut d = lo;
    while d <= hi + 1e-9 {
        let yy = y(d);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            yy + 4.0,
            d as i64
        );
        d += step;
    }
    for k in 0..=5 {
        let e = max_epoch * k as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x(e),
            TOP + ph + 18.0,
            e.round() as i64
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">passes over the data</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">objective gap</text>"#,
        TOP + ph / 2.0
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s
            .epochs
            .iter()
            .zip(&s.gaps)
            .map(|(&e, &g)| format!("{:.2},{:.2}", x(e as f64), y(g.max(GAP_FLOOR).log10())))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-label="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(&s.label),
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders the traces in `paths` to `out`.
pub fn plot_svg(paths: &[PathBuf], out: &Path, title: &str) -> Result<()> {
    let series = load_series(paths)?;
    let svg = render_svg(&series, title)?;
    std::fs::write(out, svg).map_err(|source| Error::File {
        path: out.to_path_buf(),
        source,
    })
}
