//! File formats: single curves (JSON `[[x, y], ...]` or two-column CSV) and
//! trajectories (JSON).

use std::fs;
use std::path::Path;

use crate::curve::{validate_and_normalize, PlanarCurve};
use crate::error::{RemlError, Result};
use crate::synthetic::Trajectory;
use crate::vec2::Vec2;

/// Parses a JSON array of `[x, y]` pairs.
pub fn parse_curve_json(text: &str) -> Result<Vec<Vec2>> {
    Ok(serde_json::from_str(text)?)
}

/// Parses `x,y` rows; a non-numeric first row is taken as a header.
pub fn parse_curve_csv(text: &str) -> Result<Vec<Vec2>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 2 {
            return Err(RemlError::Parse(format!("row {row}: expected two columns")));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(y)) => points.push(Vec2::new(x, y)),
            _ if row == 0 => continue,
            _ => {
                return Err(RemlError::Parse(format!(
                    "row {row}: non-numeric coordinate"
                )))
            }
        }
    }
    Ok(points)
}

/// Loads one outline and normalizes it. `.csv` files are read as CSV,
/// everything else as JSON.
pub fn load_curve(path: &Path, closed: bool, align_rotation: bool) -> Result<PlanarCurve> {
    let text = fs::read_to_string(path)?;
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let points = if is_csv {
        parse_curve_csv(&text)?
    } else {
        parse_curve_json(&text)?
    };
    validate_and_normalize(&points, closed, align_rotation)
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    fs::write(path, serde_json::to_string(traj)?)?;
    Ok(())
}
