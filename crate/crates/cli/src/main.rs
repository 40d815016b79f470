//! Command-line front end: tower computation, window solving, grid-oracle
//! validation, and bifurcation-diagram rendering.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 on computation failures.
//! Diagnostics go to standard error; data goes to standard output or to the
//! files named by flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use logitower_core::numfmt::fmt_sig15;
use logitower_core::{
    build_grid_graph, build_tower, compare_with_tower, condense, solve_crisis,
    solve_window_birth, sweep, write_csv, write_ppm, Error, GridMap, RenderOptions, TowerFormat,
    TowerOptions,
};

#[derive(Parser)]
#[command(name = "logitower", version, about = "Tower graphs of the logistic map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the tower at one parameter and print it.
    Tower {
        /// Map parameter in (1, 4].
        #[arg(long)]
        mu: f64,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Depth cap on the level walk.
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
    },
    /// Solve a period-k window's birth and end parameters.
    Window {
        /// Window period.
        #[arg(long)]
        period: usize,
        /// Parameter bracket, written lo:hi.
        #[arg(long, default_value = "3.5:4.0", value_parser = parse_bracket)]
        bracket: (f64, f64),
    },
    /// Build the epsilon-chain grid oracle and report its condensation.
    Oracle {
        /// Map parameter in (0, 4].
        #[arg(long)]
        mu: f64,
        /// Grid cell count.
        #[arg(long, default_value_t = 4000)]
        grid: usize,
        /// Chain jump tolerance.
        #[arg(long, default_value_t = 5e-4)]
        eps: f64,
        /// Compare the condensation against the tower at the same mu.
        #[arg(long)]
        compare: bool,
        /// Anchor radius for --compare; defaults to max(1e-3, spacing + eps).
        #[arg(long)]
        match_radius: Option<f64>,
    },
    /// Render a bifurcation diagram over a parameter range.
    Sweep {
        /// Lower end of the parameter range.
        #[arg(long)]
        mu_lo: f64,
        /// Upper end of the parameter range.
        #[arg(long)]
        mu_hi: f64,
        /// Image width in columns (one tower per column).
        #[arg(long, default_value_t = 800)]
        columns: usize,
        /// Image height in pixels.
        #[arg(long, default_value_t = 600)]
        height: usize,
        /// PPM output path.
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV export of the overlay marks.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let Some((lo, hi)) = s.split_once(':') else {
        return Err(format!("bracket `{s}` is not of the form lo:hi"));
    };
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad bracket low end: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad bracket high end: {e}"))?;
    if !(lo < hi) {
        return Err(format!("bracket [{lo}, {hi}] is not increasing"));
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                // Out-of-range values are caller mistakes, everything else is
                // a failed computation.
                Error::Parameter(_) | Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Tower { mu, format, max_depth } => {
            let opts = TowerOptions {
                max_depth,
                ..TowerOptions::default()
            };
            let tower = build_tower(mu, &opts)?;
            let format = match format {
                Format::Json => TowerFormat::Json,
                Format::Dot => TowerFormat::Dot,
            };
            print!("{}", logitower_core::serialize_tower(&tower, format));
            Ok(())
        }
        Command::Window { period, bracket } => {
            let birth = solve_window_birth(period, bracket)?;
            // The window's interior trapping region collapses onto the
            // critical orbit at the end; for the fixed-point family that
            // happens after three steps, for a k-window after 2k.
            let preperiod = if period == 1 { 3 } else { 2 * period };
            let end = solve_crisis(period, preperiod, (birth + 1e-7, bracket.1))?;
            println!(
                "{{\"mu_birth\": {}, \"mu_end\": {}}}",
                fmt_sig15(birth),
                fmt_sig15(end)
            );
            Ok(())
        }
        Command::Oracle { mu, grid, eps, compare, match_radius } => {
            let g = build_grid_graph(GridMap::Logistic { mu }, grid, eps)?;
            let cond = condense(&g);
            println!(
                "{} components, order {}",
                cond.recurrent.len(),
                if cond.order_total { "total" } else { "partial" }
            );
            for (i, &ci) in cond.recurrent.iter().enumerate() {
                let comp = &cond.comps[ci];
                let lo = g.cell(*comp.cells.first().expect("components are nonempty"));
                let hi = g.cell(*comp.cells.last().expect("components are nonempty"));
                println!(
                    "comp {i}: {} cells in [{}, {}]",
                    comp.cells.len(),
                    fmt_sig15(lo),
                    fmt_sig15(hi)
                );
            }
            if compare {
                let tower = build_tower(mu, &TowerOptions::default())?;
                let radius = match_radius.unwrap_or((g.spacing() + eps).max(1e-3));
                let report = compare_with_tower(&tower, &g, &cond, radius)?;
                for d in &report.details {
                    // Report the component by its position in the recurrent
                    // listing above, not by its internal condensation index.
                    let ordinal = cond
                        .recurrent
                        .iter()
                        .position(|&c| c == d.component)
                        .unwrap_or(d.component);
                    println!(
                        "node {} -> comp {} ({} cells): anchors {}",
                        d.node_index,
                        ordinal,
                        d.component_cells,
                        if d.anchors_ok { "ok" } else { "fail" }
                    );
                }
                println!("match: {}", if report.passed { "pass" } else { "fail" });
            }
            Ok(())
        }
        Command::Sweep { mu_lo, mu_hi, columns, height, out, csv } => {
            let cols = sweep(mu_lo, mu_hi, columns, height, &RenderOptions::default())?;
            let warned = cols.iter().filter(|c| c.warning).count();
            if warned > 0 {
                eprintln!("{warned} of {columns} columns are attractor-only (tower build failed)");
            }
            let n = write_ppm(&cols, &out)?;
            eprintln!("wrote {n} bytes to {}", out.display());
            if let Some(csv_path) = csv {
                let n = write_csv(&cols, &csv_path)?;
                eprintln!("wrote {n} bytes to {}", csv_path.display());
            }
            Ok(())
        }
    }
}
