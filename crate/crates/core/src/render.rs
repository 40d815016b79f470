//! Bifurcation-diagram rendering over a parameter sweep.
//!
//! A sweep runs one tower per column. The attracting class is drawn as a
//! gray density histogram of the post-transient critical orbit (the critical
//! point lies in the basin of the attractor at every `mu` in range, so its
//! tail samples the attracting class and nothing else). Repelling nodes are
//! overlaid as marks: periodic orbits in green, Cantor samples in a fixed
//! palette keyed by how deep the node sits in its column's tower.
//!
//! Output formats are binary PPM (P6) and a CSV of the overlay marks. Both
//! are byte-deterministic for identical inputs and options.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numfmt::fmt_sig15;
use crate::tower::{build_tower, NodeKind, Tower, TowerOptions};

/// Overlay color for repelling periodic orbits.
const GREEN: [u8; 3] = [30, 160, 40];

/// Overlay colors for Cantor layers: red, blue, orange, purple. A column's
/// Cantor layers take colors in tower order and wrap around past four.
const PALETTE: [[u8; 3]; 4] = [[220, 30, 30], [30, 60, 220], [235, 140, 20], [150, 40, 200]];

/// Options for a parameter sweep.
#[derive(Clone, Debug)]
pub struct RenderOptions {
    /// Base-map iterations of the critical point discarded before the
    /// histogram starts collecting.
    pub n_transient: usize,
    /// Post-transient iterates recorded in each column's histogram.
    pub n_samples: usize,
    /// Options forwarded to the per-column tower build.
    pub tower: TowerOptions,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            n_transient: 1_000,
            n_samples: 20_000,
            tower: TowerOptions::default(),
        }
    }
}

/// Kind of an overlay mark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkKind {
    /// Point of a repelling periodic orbit.
    Periodic,
    /// Point of a Cantor-node sample.
    Cantor,
}

impl MarkKind {
    fn as_str(self) -> &'static str {
        match self {
            MarkKind::Periodic => "periodic",
            MarkKind::Cantor => "cantor",
        }
    }
}

/// One overlay point of a column.
#[derive(Clone, Copy, Debug)]
pub struct Mark {
    /// Pixel row, counted from the top of the image.
    pub row: u32,
    /// Ordinate in map coordinates.
    pub x: f64,
    /// Tower level the mark belongs to.
    pub level: u32,
    /// Mark kind.
    pub kind: MarkKind,
}

/// Node count and kind strings of a column's tower.
#[derive(Clone, Debug, Default)]
pub struct TowerSummary {
    pub node_count: usize,
    pub kinds: Vec<&'static str>,
}

/// One vertical slice of the diagram.
#[derive(Clone, Debug)]
pub struct SweepColumn {
    pub mu: f64,
    /// Sample counts per vertical pixel, indexed bottom-up (`hist[0]` is the
    /// bin at `x = 0`). Total mass equals the sample count.
    pub attractor_hist: Vec<u32>,
    pub node_marks: Vec<Mark>,
    pub tower_summary: TowerSummary,
    /// Set when the tower build failed; the column then carries only the
    /// attractor histogram.
    pub warning: bool,
}

/// Histogram bin of an ordinate, counted bottom-up.
fn bin(x: f64, height: usize) -> usize {
    let b = (x.clamp(0.0, 1.0) * height as f64) as usize;
    b.min(height - 1)
}

/// Pixel row of an ordinate; row 0 is the top of the image.
fn row_of(x: f64, height: usize) -> u32 {
    (height - 1 - bin(x, height)) as u32
}

/// Sweep `columns` towers across `[mu_lo, mu_hi]`, sampling each column at
/// its center parameter.
pub fn sweep(
    mu_lo: f64,
    mu_hi: f64,
    columns: usize,
    height: usize,
    opts: &RenderOptions,
) -> Result<Vec<SweepColumn>> {
    if !mu_lo.is_finite() || !mu_hi.is_finite() || mu_lo >= mu_hi || mu_lo <= 1.0 || mu_hi > 4.0 {
        return Err(Error::Parameter(format!(
            "sweep range [{mu_lo}, {mu_hi}] must be increasing inside (1, 4]"
        )));
    }
    if columns < 16 || height < 16 {
        return Err(Error::Parameter(format!(
            "raster {columns}x{height} is below the 16x16 minimum"
        )));
    }
    let dmu = (mu_hi - mu_lo) / columns as f64;
    let mut out = Vec::with_capacity(columns);
    for i in 0..columns {
        let mu = mu_lo + dmu * (i as f64 + 0.5);
        out.push(render_column(mu, height, opts));
    }
    Ok(out)
}

fn render_column(mu: f64, height: usize, opts: &RenderOptions) -> SweepColumn {
    let mut hist = vec![0u32; height];
    let mut y = 0.5f64;
    for _ in 0..opts.n_transient {
        y = mu * y * (1.0 - y);
    }
    for _ in 0..opts.n_samples {
        y = mu * y * (1.0 - y);
        hist[bin(y, height)] += 1;
    }
    match build_tower(mu, &opts.tower) {
        Ok(t) => SweepColumn {
            mu,
            attractor_hist: hist,
            node_marks: tower_marks(&t, height),
            tower_summary: TowerSummary {
                node_count: t.nodes.len(),
                kinds: t.nodes.iter().map(|n| n.kind.kind_str()).collect(),
            },
            warning: false,
        },
        Err(_) => SweepColumn {
            mu,
            attractor_hist: hist,
            node_marks: Vec::new(),
            tower_summary: TowerSummary::default(),
            warning: true,
        },
    }
}

/// Marks of every repelling node: orbit points for periodic nodes, the
/// sample for Cantor nodes. Attracting nodes show up in the histogram
/// already and get no marks.
fn tower_marks(tower: &Tower, height: usize) -> Vec<Mark> {
    let mut marks = Vec::new();
    for node in &tower.nodes {
        let (kind, points): (MarkKind, &[f64]) = match node.kind {
            NodeKind::Zero | NodeKind::FlipOrbit => {
                let Some(orbit) = &node.orbit else { continue };
                (MarkKind::Periodic, &orbit.points)
            }
            NodeKind::CantorSet => (MarkKind::Cantor, &node.sample),
            NodeKind::Attracting(_) => continue,
        };
        for &x in points {
            marks.push(Mark {
                row: row_of(x, height),
                x,
                level: node.index as u32,
                kind,
            });
        }
    }
    marks
}

/// Render columns to an in-memory binary PPM (P6, maxval 255). The bottom
/// row is `x = 0`, the top row `x = 1`.
pub fn ppm_bytes(columns: &[SweepColumn]) -> Result<Vec<u8>> {
    let Some(first) = columns.first() else {
        return Err(Error::Parameter("no columns to render".into()));
    };
    let height = first.attractor_hist.len();
    if height == 0 || columns.iter().any(|c| c.attractor_hist.len() != height) {
        return Err(Error::Parameter("columns disagree on raster height".into()));
    }
    let width = columns.len();
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    let header = out.len();
    out.resize(header + width * height * 3, 255);
    let px = &mut out[header..];
    for (j, col) in columns.iter().enumerate() {
        // The 99th percentile keeps a few very dense bins from washing out
        // the rest of the column.
        let mut sorted = col.attractor_hist.clone();
        sorted.sort_unstable();
        let d_max = sorted[99 * (height - 1) / 100].max(1) as f64;
        for (b, &count) in col.attractor_hist.iter().enumerate() {
            let gray = (255.0 * (1.0 - (count as f64 / d_max).min(1.0))).round() as u8;
            let row = height - 1 - b;
            px[(row * width + j) * 3..][..3].copy_from_slice(&[gray; 3]);
        }
        let mut cantor_levels: Vec<u32> = col
            .node_marks
            .iter()
            .filter(|m| m.kind == MarkKind::Cantor)
            .map(|m| m.level)
            .collect();
        cantor_levels.sort_unstable();
        cantor_levels.dedup();
        for mark in &col.node_marks {
            let color = match mark.kind {
                MarkKind::Cantor => {
                    let layer = cantor_levels.iter().position(|&l| l == mark.level);
                    PALETTE[layer.unwrap_or(0) % PALETTE.len()]
                }
                // Painted after the palette pass below would reorder by mark
                // sequence; orbit points are few, so paint them last instead.
                MarkKind::Periodic => continue,
            };
            px[(mark.row as usize * width + j) * 3..][..3].copy_from_slice(&color);
        }
        for mark in &col.node_marks {
            if mark.kind == MarkKind::Periodic {
                px[(mark.row as usize * width + j) * 3..][..3].copy_from_slice(&GREEN);
            }
        }
    }
    Ok(out)
}

/// Write the columns as a binary PPM file and return the bytes written.
pub fn write_ppm(columns: &[SweepColumn], path: &Path) -> Result<u64> {
    let bytes = ppm_bytes(columns)?;
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

/// Render the overlay marks as CSV, one row per mark.
pub fn csv_string(columns: &[SweepColumn]) -> String {
    let mut out = String::from("mu,x,level,kind\n");
    for col in columns {
        for mark in &col.node_marks {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig15(col.mu),
                fmt_sig15(mark.x),
                mark.level,
                mark.kind.as_str()
            ));
        }
    }
    out
}

/// Write the overlay marks as a CSV file and return the bytes written.
pub fn write_csv(columns: &[SweepColumn], path: &Path) -> Result<u64> {
    let bytes = csv_string(columns).into_bytes();
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}
