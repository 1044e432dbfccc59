use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dualsvd::bench::{
    aggregate_means, emit_report, gnuplot_script, run_exp1_trials, run_exp2, synthetic_image, write_pgm, Exp1Config,
    Exp2Config, Field, Format, Metadata, ReportRow,
};
use dualsvd::DualSvdError;

#[derive(Parser)]
#[command(name = "dsvd", version, about = "Compact dual SVD benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random rank-m/5 dual matrices of size 2m x m: CCDSVD vs RCCDSVD vs RCCDSVD2.
    Exp1 {
        #[arg(long, value_delimiter = ',', default_value = "200,400,800")]
        m: Vec<usize>,
        #[arg(long, default_value = "real")]
        field: Field,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Independent factors for the two parts, so the CCDSVD does not exist.
        #[arg(long)]
        defect_demo: bool,
    },
    /// Power-scheme sweep on the 2-D DFT of a PGM image pair.
    Exp2 {
        #[arg(long = "std")]
        std_image: PathBuf,
        #[arg(long = "inf")]
        inf_image: PathBuf,
        /// `start:stop:step` (inclusive) or a comma list.
        #[arg(long, default_value = "5:200:5", value_parser = parse_range)]
        r: RankList,
        #[arg(long, default_value_t = 4)]
        p: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        q: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        emit_gnuplot: Option<PathBuf>,
    },
    /// Writes a deterministic synthetic 8-bit PGM test image.
    SynthImage {
        #[arg(long, default_value_t = 128)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Debug)]
struct RankList(Vec<usize>);

fn parse_range(s: &str) -> Result<RankList, String> {
    let bad = |_| format!("bad rank list {s:?}");
    if s.contains(':') {
        let parts: Vec<usize> = s.split(':').map(|t| t.trim().parse().map_err(bad)).collect::<Result<_, _>>()?;
        let (start, stop, step) = match parts[..] {
            [a, b] => (a, b, 1),
            [a, b, c] => (a, b, c),
            _ => return Err(format!("expected start:stop[:step], got {s:?}")),
        };
        if step == 0 || start > stop {
            return Err(format!("empty range {s:?}"));
        }
        Ok(RankList((start..=stop).step_by(step).collect()))
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(bad)).collect::<Result<_, _>>().map(RankList)
    }
}

fn print_table(rows: &[ReportRow]) {
    println!("{:<9} {:>6} {:>5} {:>3} {:>3} {:>11} {:>11} {:>10}", "method", "size", "r", "p", "q", "RE1", "RE2", "time_s");
    for r in rows {
        println!(
            "{:<9} {:>6} {:>5} {:>3} {:>3} {:>11.3e} {:>11.3e} {:>10.4}",
            r.method.to_string(),
            r.size,
            r.r,
            r.p,
            r.q,
            r.re1,
            r.re2,
            r.time_s
        );
    }
}

fn run(cmd: Command) -> dualsvd::Result<()> {
    match cmd {
        Command::Exp1 { m, field, p, q, trials, seed, out, format, defect_demo } => {
            let cfg = Exp1Config { m_list: m, field, p, q, trials, seed, defect_demo };
            let trial_rows = run_exp1_trials(&cfg)?;
            let rows = aggregate_means(&trial_rows, seed);
            let config = serde_json::to_value(&cfg)?;
            let meta = Metadata::new("exp1", vec![seed], config);
            emit_report(&rows, &trial_rows, format, &out, &meta)?;
            print_table(&rows);
        }
        Command::Exp2 { std_image, inf_image, r, p, q, seed, out, format, emit_gnuplot } => {
            let cfg = Exp2Config {
                image_std_path: std_image,
                image_inf_path: inf_image,
                r_list: r.0,
                p,
                q_list: q,
                seed,
            };
            let rows = run_exp2(&cfg)?;
            let meta = Metadata::new("exp2", vec![seed], serde_json::to_value(&cfg)?);
            emit_report(&rows, &[], format, &out, &meta)?;
            if let Some(gp) = emit_gnuplot {
                std::fs::write(gp, gnuplot_script(&out.to_string_lossy(), &cfg.q_list))?;
            }
            print_table(&rows);
        }
        Command::SynthImage { size, seed, out } => {
            if size == 0 {
                return Err(DualSvdError::InvalidParameter("size must be positive".into()));
            }
            write_pgm(&out, &synthetic_image(size, seed), 255, true)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() {
                3
            } else if e.is_io() {
                4
            } else {
                2
            })
        }
    }
}
