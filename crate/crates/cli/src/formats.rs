//! File formats of the command-line surface: the raw DCPA point-list text
//! format and the dataset CSV used for SVG overlays.

use dcpa_core::geometry::dual::{DualPoint, PointSet};
use dcpa_core::geometry::scalar::{format_scalar, parse_scalar};
use dcpa_core::train::{Dataset, DatasetRole};
use dcpa_core::tropical::DcpaFunction;
use dcpa_core::{Error, Result};

/// Parses the two point lists of a DCPA: decimal-string tuples, one per
/// line, under `P` and `N` section headers.
pub fn dcpa_from_text(text: &str) -> Result<DcpaFunction> {
    let mut p: Vec<DualPoint> = Vec::new();
    let mut n: Vec<DualPoint> = Vec::new();
    let mut current: Option<bool> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "P" | "p" => current = Some(true),
            "N" | "n" => current = Some(false),
            _ => {
                let coords = line
                    .split_whitespace()
                    .map(parse_scalar)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?;
                let target = match current {
                    Some(true) => &mut p,
                    Some(false) => &mut n,
                    None => {
                        return Err(Error::Parse(format!(
                            "line {}: point before a P/N section header",
                            ln + 1
                        )))
                    }
                };
                target.push(DualPoint::new(coords));
            }
        }
    }
    DcpaFunction::new(PointSet::new(p)?, PointSet::new(n)?)
}

pub fn dcpa_to_text(f: &DcpaFunction) -> String {
    let mut out = String::from("P\n");
    for pt in f.p.points() {
        let row: Vec<String> = pt.coords().iter().map(format_scalar).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str("N\n");
    for pt in f.n.points() {
        let row: Vec<String> = pt.coords().iter().map(format_scalar).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Dataset CSV: `x,y,label` per line with labels ±1.
pub fn dataset_to_csv(d: &Dataset) -> String {
    let mut out = String::from("x,y,label\n");
    for (p, l) in &d.points {
        out.push_str(&format!("{},{},{}\n", p[0], p[1], l));
    }
    out
}

pub fn dataset_from_csv(text: &str) -> Result<Dataset> {
    let mut points = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if ln == 0 && line.trim_start().starts_with('x') {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("dataset line {}: need x,y,label", ln + 1)));
        }
        let x: f64 = fields[0].trim().parse().map_err(|_| {
            Error::Parse(format!("dataset line {}: bad x {:?}", ln + 1, fields[0]))
        })?;
        let y: f64 = fields[1].trim().parse().map_err(|_| {
            Error::Parse(format!("dataset line {}: bad y {:?}", ln + 1, fields[1]))
        })?;
        let l: i8 = fields[2].trim().parse().map_err(|_| {
            Error::Parse(format!("dataset line {}: bad label {:?}", ln + 1, fields[2]))
        })?;
        if l != 1 && l != -1 {
            return Err(Error::Parse(format!("dataset line {}: label must be ±1", ln + 1)));
        }
        points.push(([x, y], l));
    }
    Ok(Dataset {
        points,
        role: DatasetRole::Test,
    })
}
