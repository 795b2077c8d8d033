//! Tabular and SVG renderings of scored corpora.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::corpus::{Corpus, CorpusError};
use crate::ingest::csv_writer;
use crate::scoring::{histogram, summarize_by_candidate, CandidateSummary, ScoreHistogram};

/// Label of the all-candidates block.
pub const OVERALL: &str = "All";

/// One facet of a histogram report: counts for every integer score in the
/// shared range, zeros included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramBlock {
    pub candidate: String,
    pub counts: Vec<(i64, usize)>,
}

impl HistogramBlock {
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&(_, c)| c).sum()
    }
}

/// Overall block first, then one block per candidate in name order. Every
/// block spans the overall `[min, max]` score range.
pub fn histogram_blocks(corpus: &Corpus) -> Result<Vec<HistogramBlock>, CorpusError> {
    if let Some(i) = corpus
        .documents
        .iter()
        .position(|d| d.senti_score.is_none())
    {
        return Err(CorpusError::Unscored(i));
    }
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let hist: ScoreHistogram = histogram(corpus);
    let (lo, hi) = hist.range().expect("non-empty scored corpus");
    let block = |candidate: &str, bins: &std::collections::BTreeMap<i64, usize>| HistogramBlock {
        candidate: candidate.to_string(),
        counts: (lo..=hi)
            .map(|s| (s, bins.get(&s).copied().unwrap_or(0)))
            .collect(),
    };
    let mut blocks = vec![block(OVERALL, &hist.bins)];
    blocks.extend(hist.per_candidate.iter().map(|(c, bins)| block(c, bins)));
    Ok(blocks)
}

/// `candidate,score,count` rows.
pub fn write_histogram_csv<W: Write>(blocks: &[HistogramBlock], out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["candidate", "score", "count"])?;
    for b in blocks {
        for &(score, count) in &b.counts {
            w.write_record([b.candidate.as_str(), &score.to_string(), &count.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn fmt_stat(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        format!("{v:.4}")
    }
}

/// `candidate,tweets,median,mean,stddev,min,max` rows. A single-tweet
/// candidate has stddev `NA`.
pub fn write_summary_csv<W: Write>(summaries: &[CandidateSummary], out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "candidate",
        "tweets",
        "median",
        "mean",
        "stddev",
        "min",
        "max",
    ])?;
    for s in summaries {
        w.write_record([
            s.candidate.clone(),
            s.tweets.to_string(),
            fmt_stat(s.median),
            fmt_stat(s.mean),
            fmt_stat(s.std_dev),
            s.min.to_string(),
            s.max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn summary_table(corpus: &Corpus, exclude_neutral: bool) -> Vec<CandidateSummary> {
    summarize_by_candidate(corpus, exclude_neutral)
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const PANEL_W: f64 = 260.0;
const PANEL_H: f64 = 160.0;
const MARGIN: f64 = 30.0;
const COLUMNS: usize = 3;

/// Faceted bar chart, one panel per block, bars and axis labels only.
pub fn write_histogram_svg<W: Write>(blocks: &[HistogramBlock], mut out: W) -> io::Result<()> {
    let rows = blocks.len().div_ceil(COLUMNS).max(1);
    let cols = blocks.len().clamp(1, COLUMNS);
    let width = cols as f64 * (PANEL_W + MARGIN) + MARGIN;
    let height = rows as f64 * (PANEL_H + 2.0 * MARGIN) + MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    for (i, block) in blocks.iter().enumerate() {
        let x0 = MARGIN + (i % COLUMNS) as f64 * (PANEL_W + MARGIN);
        let y0 = MARGIN + (i / COLUMNS) as f64 * (PANEL_H + 2.0 * MARGIN);
        let peak = block
            .counts
            .iter()
            .map(|&(_, c)| c)
            .max()
            .unwrap_or(0)
            .max(1) as f64;
        let bar_w = PANEL_W / block.counts.len().max(1) as f64;
        let _ = writeln!(svg, r#"<g>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            x0 + PANEL_W / 2.0,
            y0 - 8.0,
            escape_xml(&block.candidate)
        );
        let base = y0 + PANEL_H;
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
            x0 + PANEL_W
        );
        for (j, &(score, count)) in block.counts.iter().enumerate() {
            let h = PANEL_H * count as f64 / peak;
            let x = x0 + j as f64 * bar_w;
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="steelblue"><title>{score}: {count}</title></rect>"#,
                base - h,
                (bar_w - 1.0).max(0.5)
            );
        }
        if let (Some(first), Some(last)) = (block.counts.first(), block.counts.last()) {
            let _ = writeln!(
                svg,
                r#"<text x="{x0}" y="{}">{}</text>"#,
                base + 12.0,
                first.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                x0 + PANEL_W,
                base + 12.0,
                last.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            x0 - 2.0,
            y0 + 8.0,
            peak as usize
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    out.write_all(svg.as_bytes())
}
