//! Density family strings and number lists given on the command line.
//!
//! ```text
//! uniform
//! gaussian:MU,SIGMA
//! mixture:W,MU,SIGMA;W,MU,SIGMA;...
//! indicator:A,B
//! grid:PATH            two-column CSV (x, density), linearly interpolated
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use spectral_bayes::density::Density;

use crate::error::CliError;

/// A number, optionally written with `pi`: `1.5`, `pi`, `-pi`, `2pi`, `pi/2`.
pub fn parse_number(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let bad = || CliError::Contract(format!("cannot read {text:?} as a number"));
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let (head, divisor) = match body.split_once('/') {
        Some((h, d)) => (h, d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let factor = match head.trim().strip_suffix("pi") {
        Some("") => 1.0,
        Some(f) => f.trim().trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(sign * factor * PI / divisor)
}

pub fn parse_list(text: &str, expected: usize) -> Result<Vec<f64>, CliError> {
    let values = text.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
    if values.len() != expected {
        return Err(CliError::Contract(format!("expected {expected} comma-separated numbers in {text:?}")));
    }
    Ok(values)
}

pub fn parse_family(text: &str) -> Result<Density, CliError> {
    let (name, args) = match text.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a)),
        None => (text.trim(), None),
    };
    let need = |what: &str| args.ok_or_else(|| CliError::Contract(format!("{name} needs parameters: {what}")));
    let density = match name {
        "uniform" => Density::Uniform,
        "gaussian" => {
            let v = parse_list(need("gaussian:MU,SIGMA")?, 2)?;
            Density::gaussian(v[0], v[1])?
        }
        "mixture" => {
            let comps = need("mixture:W,MU,SIGMA;...")?
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|c| parse_list(c, 3).map(|v| (v[0], v[1], v[2])))
                .collect::<Result<Vec<_>, _>>()?;
            Density::mixture(comps)?
        }
        "indicator" => {
            let v = parse_list(need("indicator:A,B")?, 2)?;
            Density::indicator(v[0], v[1])?
        }
        "grid" => read_grid(Path::new(need("grid:PATH")?))?,
        other => {
            return Err(CliError::Contract(format!(
                "unknown density family {other:?}; expected uniform, gaussian, mixture, indicator or grid"
            )))
        }
    };
    Ok(density)
}

fn read_grid(path: &Path) -> Result<Density, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(x), Some(y)) = (cols.next(), cols.next()) else {
            return Err(CliError::Io(format!("{}:{}: expected two columns", path.display(), n + 1)));
        };
        match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            // a header row
            _ if xs.is_empty() && n == 0 => continue,
            _ => return Err(CliError::Io(format!("{}:{}: not a number pair", path.display(), n + 1))),
        }
    }
    Density::sampled(xs, ys).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
