//! `min:max:n[:log]` grids.

use crate::CliError;

pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Parse(format!("grid {text:?}: {why} (expected min:max:n[:log])"));
    let parts: Vec<&str> = text.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad("wrong number of fields"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad("bad min"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad("bad max"))?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad("bad point count"))?;
    let log = match parts.get(3).map(|s| s.trim()) {
        None => false,
        Some("log") => true,
        Some(_) => return Err(bad("the optional fourth field must be \"log\"")),
    };
    if n == 0 {
        return Err(bad("need at least one point"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(bad("need finite min <= max"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if log {
        if lo <= 0.0 {
            return Err(bad("a log grid needs min > 0"));
        }
        return Ok(foxh_core::fixtures::log_grid(lo, hi, n));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}
