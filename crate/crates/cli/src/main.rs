//! Command-line surface for the exact boundary-complexity engine.
//!
//! Subcommands: `count` exact piece counts of a network or DCPA file,
//! `boundary-svg` renders a planar decision boundary, `train` runs the 2D
//! experiment presets, `verify` cross-checks the dual counts against the
//! activation-pattern oracle, and `trend` plots a training-metrics CSV.
//!
//! Exit codes: 0 success, 2 verification mismatch, 3 resource cap
//! exceeded, 4 unusable input.

mod formats;
mod manifest;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use dcpa_core::counts::{boundary_geometry_2d, count_affine_pieces, count_boundary_pieces};
use dcpa_core::oracle::{oracle_affine_count, oracle_boundary_count, OracleConfig};
use dcpa_core::train::{
    gen_gaussian_mixture, gen_spiral, parse_trend_csv, train, write_trend_csv, Dataset,
    DatasetRole, FloatNet, Regime, TrainConfig,
};
use dcpa_core::tropical::{dcpa_extract, network_from_text, network_to_text, DcpaFunction};
use dcpa_core::Error;
use manifest::ManifestBuilder;

#[derive(Parser)]
#[command(name = "dcpa", about = "exact decision-boundary complexity of ReLU networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact #Boundary and #Total of a network (.json) or DCPA point-list file
    Count {
        /// network JSON or P/N point-list text file
        file: PathBuf,
        /// machine-readable report
        #[arg(long)]
        report_json: Option<PathBuf>,
    },
    /// Render the decision boundary of a planar classifier to SVG
    BoundarySvg {
        file: PathBuf,
        /// plot box as x0,x1,y0,y1
        #[arg(long = "box", default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        bbox: String,
        #[arg(long)]
        out: PathBuf,
        /// optional x,y,label dataset CSV to overlay
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Train a preset experiment and emit trend CSV, final network and SVG
    Train(TrainArgs),
    /// Cross-check dual-space counts against the activation-pattern oracle
    Verify {
        /// widths pattern, fixed or ranged per layer, e.g. 2,3..6,3..6,1
        #[arg(long, default_value = "2,3..6,3..6,1")]
        widths: String,
        /// number of random networks
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// oracle region cap
        #[arg(long, default_value_t = 100_000)]
        region_cap: usize,
        #[arg(long)]
        report_json: Option<PathBuf>,
    },
    /// Plot #Boundary, #Total and F-norm from a trend CSV
    Trend {
        csv: PathBuf,
        /// moving-average window
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// spiral | gaussian
    #[arg(long)]
    preset: String,
    /// ce | noisy | adv
    #[arg(long, default_value = "ce")]
    regime: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// noise std (noisy) or FGSM ε (adv); preset default when omitted
    #[arg(long)]
    strength: Option<f64>,
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    batch: Option<usize>,
    /// comma-separated layer widths, e.g. 2,30,30,1
    #[arg(long)]
    widths: Option<String>,
    /// checkpoint stride in iterations
    #[arg(long)]
    stride: Option<u64>,
    /// plot box for the final boundary SVG
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    /// moving-average window for reporting
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// output directory
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ResourceCap(_) => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Count { file, report_json } => cmd_count(&file, report_json.as_deref()),
        Cmd::BoundarySvg {
            file,
            bbox,
            out,
            data,
        } => cmd_boundary_svg(&file, &bbox, &out, data.as_deref()),
        Cmd::Train(args) => cmd_train(&args),
        Cmd::Verify {
            widths,
            count,
            seed,
            region_cap,
            report_json,
        } => cmd_verify(&widths, count, seed, region_cap, report_json.as_deref()),
        Cmd::Trend { csv, window, out } => cmd_trend(&csv, window, &out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

/// Loads either a network JSON document or a raw DCPA point-list file and
/// returns the dual form (extracting the network if needed).
fn load_dcpa(path: &Path) -> Result<DcpaFunction, Error> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        let net = network_from_text(&text)?;
        dcpa_extract(&net)
    } else {
        formats::dcpa_from_text(&text)
    }
}

fn cmd_count(file: &Path, report_json: Option<&Path>) -> Result<u8, Error> {
    let f = load_dcpa(file)?;
    let report = count_boundary_pieces(&f)?;
    let total = count_affine_pieces(&f)?;
    println!("#Boundary = {}", report.boundary_piece_count);
    println!("#Total    = {}", total);
    if report.is_degenerate() {
        println!(
            "degenerate: {} flat zero regions, {} isolated lower-dimensional zeros",
            report.degenerate_flat_cells, report.mixed_higher_cells
        );
    }
    if let Some(path) = report_json {
        let doc = serde_json::json!({
            "boundary": report.boundary_piece_count,
            "total": total,
            "degenerate_flat_cells": report.degenerate_flat_cells,
            "mixed_higher_cells": report.mixed_higher_cells,
        });
        write_file(path, &serde_json::to_string_pretty(&doc).unwrap())?;
    }
    Ok(0)
}

fn parse_bbox(s: &str) -> Result<(f64, f64, f64, f64), Error> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad box {s:?}, expected x0,x1,y0,y1")))?;
    if parts.len() != 4 || parts[0] >= parts[1] || parts[2] >= parts[3] {
        return Err(Error::Parse(format!("bad box {s:?}, expected x0,x1,y0,y1")));
    }
    Ok((parts[0], parts[1], parts[2], parts[3]))
}

fn parse_widths(s: &str) -> Result<Vec<usize>, Error> {
    let widths: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Parse(format!("bad widths {s:?}")))?;
    if widths.len() < 2 || widths.contains(&0) {
        return Err(Error::Parse(format!("bad widths {s:?}")));
    }
    Ok(widths)
}

fn cmd_boundary_svg(
    file: &Path,
    bbox: &str,
    out: &Path,
    data: Option<&Path>,
) -> Result<u8, Error> {
    let bbox = parse_bbox(bbox)?;
    let f = load_dcpa(file)?;
    let segments = boundary_geometry_2d(&f)?;
    let dataset = match data {
        Some(p) => Some(formats::dataset_from_csv(&read_file(p)?)?),
        None => None,
    };
    let image = svg::boundary_svg(&segments, segments.len(), bbox, dataset.as_ref(), "");
    write_file(out, &image)?;
    let mut mb = ManifestBuilder::new(
        "boundary-svg",
        serde_json::json!({
            "file": file.display().to_string(),
            "box": bbox,
            "data": data.map(|p| p.display().to_string()),
        }),
        None,
    );
    mb.record_output(out);
    let manifest_path = out.with_extension("manifest.json");
    mb.write(&manifest_path)
        .map_err(|e| Error::Parse(format!("cannot write manifest: {e}")))?;
    println!("wrote {} ({} pieces)", out.display(), segments.len());
    Ok(0)
}

fn cmd_train(args: &TrainArgs) -> Result<u8, Error> {
    let regime = Regime::parse(&args.regime)?;
    let (mut cfg, default_box) = match args.preset.as_str() {
        "spiral" => (TrainConfig::spiral(regime, args.seed), "-1.2,1.2,-1.2,1.2"),
        "gaussian" => (TrainConfig::gaussian(regime, args.seed), "-2,2,-2,2"),
        other => return Err(Error::Parse(format!("unknown preset {other:?}"))),
    };
    if let Some(s) = args.strength {
        cfg.strength = s;
    }
    if let Some(it) = args.iters {
        cfg.iterations = it;
    }
    if let Some(b) = args.batch {
        cfg.batch_size = b;
    }
    if let Some(w) = &args.widths {
        cfg.widths = parse_widths(w)?;
    }
    if let Some(s) = args.stride {
        cfg.checkpoint_stride = s.max(1);
    }
    let bbox = parse_bbox(args.bbox.as_deref().unwrap_or(default_box))?;

    let (train_data, test_data) = preset_datasets(&args.preset, args.seed);
    let dir = args.out.join(format!(
        "{}-{}-s{}",
        args.preset,
        regime.name(),
        args.seed
    ));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::Parse(format!("cannot create {}: {e}", dir.display())))?;

    let mut mb = ManifestBuilder::new(
        "train",
        serde_json::json!({
            "preset": args.preset,
            "regime": regime.name(),
            "widths": cfg.widths,
            "strength": cfg.strength,
            "learning_rate": cfg.learning_rate,
            "momentum": cfg.momentum,
            "weight_decay": cfg.weight_decay,
            "batch_size": cfg.batch_size,
            "iterations": cfg.iterations,
            "checkpoint_stride": cfg.checkpoint_stride,
            "robustness_sigma": cfg.robustness_sigma,
            "robustness_draws": cfg.robustness_draws,
            "window": args.window,
            "box": bbox,
        }),
        Some(args.seed),
    );

    let run = train(&train_data, &test_data, &cfg)?;
    if let Some(t) = run.diverged_at {
        eprintln!("warning: training diverged at iteration {t}; partial trend kept");
    }

    let records: Vec<_> = run.checkpoints.iter().map(|(_, r)| r.clone()).collect();
    let csv_path = dir.join("trend.csv");
    write_file(&csv_path, &write_trend_csv(&records))?;
    mb.record_output(&csv_path);

    let (final_net, final_record) = run.checkpoints.last().expect("initial checkpoint");
    let net_path = dir.join("network.json");
    write_file(&net_path, &network_to_text(final_net))?;
    mb.record_output(&net_path);

    let data_path = dir.join("train_data.csv");
    write_file(&data_path, &formats::dataset_to_csv(&train_data))?;
    mb.record_output(&data_path);

    let f = dcpa_extract(final_net)?;
    let dcpa_path = dir.join("dcpa.txt");
    write_file(&dcpa_path, &formats::dcpa_to_text(&f))?;
    mb.record_output(&dcpa_path);
    let segments = boundary_geometry_2d(&f)?;
    let caption = format!(
        ", #Total = {}, acc = {:.2}%",
        final_record.total, final_record.test_acc
    );
    let svg_path = dir.join("boundary.svg");
    write_file(
        &svg_path,
        &svg::boundary_svg(
            &segments,
            final_record.boundary as usize,
            bbox,
            Some(&train_data),
            &caption,
        ),
    )?;
    mb.record_output(&svg_path);

    let trend_path = dir.join("trend.svg");
    write_file(&trend_path, &svg::trend_svg(&records, args.window))?;
    mb.record_output(&trend_path);

    mb.write(&dir.join("manifest.json"))
        .map_err(|e| Error::Parse(format!("cannot write manifest: {e}")))?;

    println!(
        "{} checkpoints; final: #Boundary = {}, #Total = {}, train acc {:.2}%, test acc {:.2}%{}",
        records.len(),
        final_record.boundary,
        final_record.total,
        final_record.train_acc,
        final_record.test_acc,
        final_record
            .robustness
            .map_or(String::new(), |r| format!(", R(σ) = {r:.2}%")),
    );
    println!("outputs in {}", dir.display());
    Ok(0)
}

fn preset_datasets(preset: &str, seed: u64) -> (Dataset, Dataset) {
    match preset {
        "spiral" => (
            gen_spiral(300, seed, DatasetRole::Train),
            gen_spiral(1000, seed ^ 0x7e57_0000, DatasetRole::Test),
        ),
        _ => (
            gen_gaussian_mixture(300, seed, DatasetRole::Train),
            gen_gaussian_mixture(1000, seed ^ 0x7e57_0000, DatasetRole::Test),
        ),
    }
}

struct VerifyRow {
    widths: Vec<usize>,
    dual_boundary: usize,
    dual_total: usize,
    oracle_boundary: usize,
    oracle_total: usize,
    degenerate: bool,
}

fn cmd_verify(
    widths: &str,
    count: usize,
    seed: u64,
    region_cap: usize,
    report_json: Option<&Path>,
) -> Result<u8, Error> {
    use rand::{Rng, SeedableRng};
    let parts: Vec<(usize, usize)> = widths
        .split(',')
        .map(|p| {
            let p = p.trim();
            if let Some((a, b)) = p.split_once("..") {
                let lo = a.trim().parse::<usize>();
                let hi = b.trim().parse::<usize>();
                match (lo, hi) {
                    (Ok(lo), Ok(hi)) if lo >= 1 && lo <= hi => Ok((lo, hi)),
                    _ => Err(Error::Parse(format!("bad width range {p:?}"))),
                }
            } else {
                p.parse::<usize>()
                    .map(|w| (w, w))
                    .map_err(|_| Error::Parse(format!("bad width {p:?}")))
            }
        })
        .collect::<Result<_, _>>()?;
    if parts.len() < 2 || parts.last() != Some(&(1, 1)) {
        return Err(Error::Parse(
            "verify needs widths ending in a single output, e.g. 2,3..6,3..6,1".into(),
        ));
    }

    let rows: Vec<Result<VerifyRow, Error>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let widths: Vec<usize> = parts
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                .collect();
            let net = FloatNet::init(&widths, &mut rng).to_network_spec()?;
            let f = dcpa_extract(&net)?;
            let report = count_boundary_pieces(&f)?;
            let dual_total = count_affine_pieces(&f)?;
            let cfg = OracleConfig {
                region_cap,
                seed: seed ^ (k as u64).rotate_left(17),
            };
            let oracle_total = oracle_affine_count(&net, &cfg)?;
            let oracle_boundary = oracle_boundary_count(&net, &cfg)?;
            Ok(VerifyRow {
                widths,
                dual_boundary: report.boundary_piece_count,
                dual_total,
                oracle_boundary,
                oracle_total,
                degenerate: report.is_degenerate(),
            })
        })
        .collect();

    let mut matches = 0usize;
    let mut mismatches = 0usize;
    let mut degenerate = 0usize;
    for (k, row) in rows.iter().enumerate() {
        let row = match row {
            Ok(r) => r,
            Err(e) => return Err(e.clone()),
        };
        let widths: Vec<String> = row.widths.iter().map(|w| w.to_string()).collect();
        if row.degenerate {
            degenerate += 1;
            println!(
                "net {k:03} [{}]: degenerate dual configuration, excluded",
                widths.join("-")
            );
            continue;
        }
        let ok = row.dual_boundary == row.oracle_boundary && row.dual_total == row.oracle_total;
        println!(
            "net {k:03} [{}]: boundary {} vs {}, total {} vs {} {}",
            widths.join("-"),
            row.dual_boundary,
            row.oracle_boundary,
            row.dual_total,
            row.oracle_total,
            if ok { "ok" } else { "MISMATCH" }
        );
        if ok {
            matches += 1;
        } else {
            mismatches += 1;
        }
    }
    println!(
        "{matches} matched, {mismatches} mismatched, {degenerate} degenerate (excluded) of {count}"
    );
    if let Some(path) = report_json {
        let doc = serde_json::json!({
            "matches": matches,
            "mismatches": mismatches,
            "degenerate_excluded": degenerate,
            "count": count,
        });
        write_file(path, &serde_json::to_string_pretty(&doc).unwrap())?;
    }
    Ok(if mismatches > 0 { 2 } else { 0 })
}

fn cmd_trend(csv: &Path, window: usize, out: &Path) -> Result<u8, Error> {
    let records = parse_trend_csv(&read_file(csv)?)?;
    if records.is_empty() {
        return Err(Error::Parse("trend CSV has no data rows".into()));
    }
    write_file(out, &svg::trend_svg(&records, window.max(1)))?;
    let mut mb = ManifestBuilder::new(
        "trend",
        serde_json::json!({ "csv": csv.display().to_string(), "window": window }),
        None,
    );
    mb.record_output(out);
    mb.write(&out.with_extension("manifest.json"))
        .map_err(|e| Error::Parse(format!("cannot write manifest: {e}")))?;
    println!("wrote {}", out.display());
    Ok(0)
}
