//! CSV and SVG writers.
//!
//! Run files start with `#` metadata lines (config, termination, wall-clock
//! timestamp) followed by a plain CSV table. Everything outside the `#`
//! lines is a pure function of the config. Missing values are empty cells.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::complexity::measured_blob;
use crate::config::to_toml;
use crate::error::{Error, Result};
use crate::runner::{EntropyTrace, Sweep, SweepSummary, HISTOGRAM_BINS, HISTOGRAM_RANGE};

pub const TRACE_HEADER: &str =
    "generation,pop_size,h_sum,h_male,h_female,k_bits,delta_k,conditional_k,mean_genome_k";

#[derive(Debug, Clone, Copy, Default)]
pub struct OutputFlags {
    pub plots: bool,
    pub dump_tokens: bool,
    pub spearman: bool,
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

pub fn write_trace_csv<W: Write>(trace: &EntropyTrace, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# generated_unix={}", timestamp())?;
    writeln!(w, "# termination={}", trace.termination)?;
    for line in to_toml(std::slice::from_ref(&trace.config)).lines() {
        if !line.is_empty() {
            writeln!(w, "# {line}")?;
        }
    }
    writeln!(w, "{TRACE_HEADER}")?;
    for r in &trace.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.generation,
            r.pop_size,
            r.h_sum,
            opt(r.h_male),
            opt(r.h_female),
            r.k_bits,
            opt(r.delta_k),
            opt(r.conditional_k),
            r.mean_genome_k
        )?;
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(
    summary: &SweepSummary,
    spearman: bool,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "# generated_unix={}", timestamp())?;
    let extra = if spearman { ",spearman_h_vs_k" } else { "" };
    writeln!(
        w,
        "label,pearson_h_vs_k{extra},autocorr_h_sum_lag1,generations_completed,termination"
    )?;
    for r in &summary.rows {
        let sp = if spearman {
            format!(",{}", opt(r.spearman_h_vs_k))
        } else {
            String::new()
        };
        writeln!(
            w,
            "{},{}{sp},{},{},{}",
            field(&r.label),
            opt(r.pearson_h_vs_k),
            opt(r.autocorr_h_sum_lag1),
            r.generations_completed,
            field(&r.termination.to_string())
        )?;
    }
    Ok(())
}

fn bin_edges() -> impl Iterator<Item = (f64, f64)> {
    let (lo, hi) = HISTOGRAM_RANGE;
    // rounded for display; binning itself uses the unrounded arithmetic
    let edge = move |i: usize| {
        let e = lo + (hi - lo) * i as f64 / HISTOGRAM_BINS as f64;
        (e * 1e12).round() / 1e12
    };
    (0..HISTOGRAM_BINS).map(move |i| (edge(i), edge(i + 1)))
}

pub fn write_histogram_csv<W: Write>(summary: &SweepSummary, mut w: W) -> std::io::Result<()> {
    writeln!(w, "bin_lo,bin_hi,count")?;
    for ((lo, hi), count) in bin_edges().zip(&summary.histogram) {
        writeln!(w, "{lo},{hi},{count}")?;
    }
    Ok(())
}

/// File-name-safe form of a label.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn write_file(
    path: PathBuf,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<PathBuf> {
    let mut f = create(&path)?;
    body(&mut f)
        .and_then(|_| f.flush())
        .map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    Ok(path)
}

/// Writes per-run traces, the sweep summary and histogram, and optional
/// plots and token dumps. Returns the paths written.
pub fn write_outputs(sweep: &Sweep, out_dir: &Path, flags: OutputFlags) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for run in &sweep.runs {
        let trace = &run.trace;
        let stem = file_stem(&trace.config.label);
        written.push(write_file(out_dir.join(format!("{stem}.csv")), |w| {
            write_trace_csv(trace, w)
        })?);
        if flags.plots && !trace.rows.is_empty() {
            written.push(write_file(out_dir.join(format!("{stem}_h_k.svg")), |w| {
                w.write_all(svg::trace_chart(trace).as_bytes())
            })?);
            written.push(write_file(
                out_dir.join(format!("{stem}_by_sex.svg")),
                |w| w.write_all(svg::sex_chart(trace).as_bytes()),
            )?);
        }
        if flags.dump_tokens {
            if let Some(pop) = &run.final_population {
                let blob = measured_blob(pop)?;
                written.push(write_file(
                    out_dir.join(format!("{stem}_tokens.txt")),
                    |w| w.write_all(blob.dump().as_bytes()),
                )?);
            }
        }
    }
    let summary = &sweep.summary;
    written.push(write_file(out_dir.join("summary.csv"), |w| {
        write_summary_csv(summary, flags.spearman, w)
    })?);
    written.push(write_file(out_dir.join("histogram.csv"), |w| {
        write_histogram_csv(summary, w)
    })?);
    if flags.plots {
        written.push(write_file(out_dir.join("histogram.svg"), |w| {
            w.write_all(svg::histogram_chart(summary).as_bytes())
        })?);
    }
    Ok(written)
}

pub mod svg {
    use super::*;

    const W: f64 = 800.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 70.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;

    fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    }

    fn escape(s: &str) -> String {
        s.replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;")
    }

    fn header(title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            W / 2.0,
            escape(title)
        );
        s
    }

    fn polyline(
        s: &mut String,
        xs: &[f64],
        ys: &[f64],
        x_span: (f64, f64),
        y_span: (f64, f64),
        color: &str,
    ) {
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let _ = write!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points=""#
        );
        for (x, y) in xs.iter().zip(ys) {
            let px = LEFT + (x - x_span.0) / (x_span.1 - x_span.0) * pw;
            let py = TOP + ph - (y - y_span.0) / (y_span.1 - y_span.0) * ph;
            let _ = write!(s, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(s, r#""/>"#);
    }

    fn axes(s: &mut String, x_span: (f64, f64), x_label: &str) {
        let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
        let _ = writeln!(
            s,
            r#"<path d="M{x0},{y0} V{y1} H{x1} V{y0}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{x0}" y="{}" text-anchor="start">{}</text>"#,
            y1 + 18.0,
            x_span.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x1}" y="{}" text-anchor="end">{}</text>"#,
            y1 + 18.0,
            x_span.1
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            y1 + 36.0,
            escape(x_label)
        );
    }

    fn y_labels(s: &mut String, span: (f64, f64), right: bool, label: &str, color: &str) {
        let (x, anchor, lx) = if right {
            (W - RIGHT + 5.0, "start", W - 15.0)
        } else {
            (LEFT - 5.0, "end", 15.0)
        };
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}" fill="{color}">{:.4}</text>"#,
            TOP + 4.0,
            span.1
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}" fill="{color}">{:.4}</text>"#,
            H - BOTTOM,
            span.0
        );
        let cy = (TOP + H - BOTTOM) / 2.0;
        let _ = writeln!(
            s,
            r#"<text x="{lx}" y="{cy}" text-anchor="middle" fill="{color}" transform="rotate(-90 {lx} {cy})">{}</text>"#,
            escape(label)
        );
    }

    /// `h_sum` (left axis) and `k_bits` (right axis) against generation.
    pub fn trace_chart(trace: &EntropyTrace) -> String {
        let xs: Vec<f64> = trace.rows.iter().map(|r| r.generation as f64).collect();
        let h: Vec<f64> = trace.rows.iter().map(|r| r.h_sum).collect();
        let k: Vec<f64> = trace.rows.iter().map(|r| r.k_bits as f64).collect();
        let x_span = span(xs.iter().copied());
        let (h_span, k_span) = (span(h.iter().copied()), span(k.iter().copied()));
        let mut s = header(&format!(
            "{}: H(genome) and K(population)",
            trace.config.label
        ));
        axes(&mut s, x_span, "generation");
        y_labels(&mut s, h_span, false, "h_sum (bits)", "#1f77b4");
        y_labels(&mut s, k_span, true, "k_bits", "#d62728");
        polyline(&mut s, &xs, &h, x_span, h_span, "#1f77b4");
        polyline(&mut s, &xs, &k, x_span, k_span, "#d62728");
        s.push_str("</svg>\n");
        s
    }

    /// Male and female summed entropy on a shared axis; gaps where a sex is absent are drawn at 0.
    pub fn sex_chart(trace: &EntropyTrace) -> String {
        let xs: Vec<f64> = trace.rows.iter().map(|r| r.generation as f64).collect();
        let m: Vec<f64> = trace.rows.iter().map(|r| r.h_male.unwrap_or(0.0)).collect();
        let f: Vec<f64> = trace
            .rows
            .iter()
            .map(|r| r.h_female.unwrap_or(0.0))
            .collect();
        let x_span = span(xs.iter().copied());
        let y_span = span(m.iter().chain(&f).copied());
        let mut s = header(&format!("{}: entropy by sex", trace.config.label));
        axes(&mut s, x_span, "generation");
        y_labels(
            &mut s,
            y_span,
            false,
            "bits (blue male, red female)",
            "black",
        );
        polyline(&mut s, &xs, &m, x_span, y_span, "#1f77b4");
        polyline(&mut s, &xs, &f, x_span, y_span, "#d62728");
        s.push_str("</svg>\n");
        s
    }

    pub fn histogram_chart(summary: &SweepSummary) -> String {
        let total: usize = summary.histogram.iter().sum();
        let max = summary.histogram.iter().copied().max().unwrap_or(0).max(1) as f64;
        let mut s = header(&format!("Correlation coefficients (n = {total})"));
        let (lo, hi) = HISTOGRAM_RANGE;
        axes(&mut s, (lo, hi), "Pearson r(h_sum, k_bits)");
        y_labels(&mut s, (0.0, max), false, "experiments", "black");
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let bw = pw / summary.histogram.len() as f64;
        for (i, &c) in summary.histogram.iter().enumerate() {
            let bh = c as f64 / max * ph;
            let _ = writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#7f7f7f" stroke="black"/>"##,
                LEFT + i as f64 * bw,
                TOP + ph - bh,
                bw,
                bh
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
