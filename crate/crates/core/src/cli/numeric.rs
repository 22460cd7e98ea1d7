//! Numbers as typed on the command line: `1000000`, `1e6`, `2^24`, `2^24-1`.

/// Non-negative integer in plain, scientific or power notation.
pub fn count(s: &str) -> Result<u64, String> {
    let t: String = s.trim().chars().filter(|&c| c != '_').collect();
    if t.is_empty() {
        return Err("empty number".into());
    }
    if let Some((base, rest)) = t.split_once('^') {
        let base: u64 = base.parse().map_err(|_| format!("bad base in '{s}'"))?;
        let (exp, offset) = split_offset(rest).ok_or_else(|| format!("bad exponent in '{s}'"))?;
        let power = base.checked_pow(exp).ok_or_else(|| format!("'{s}' overflows"))?;
        return power
            .checked_add_signed(offset)
            .ok_or_else(|| format!("'{s}' is out of range"));
    }
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = t.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v < 0.0 || v.fract() != 0.0 || v >= 18446744073709551616.0 {
        return Err(format!("'{s}' is not a non-negative integer"));
    }
    Ok(v as u64)
}

/// `exp` or `exp+k` / `exp-k`.
fn split_offset(rest: &str) -> Option<(u32, i64)> {
    match rest.find(['+', '-']) {
        Some(i) => {
            let exp = rest[..i].parse().ok()?;
            let off: i64 = rest[i + 1..].parse().ok()?;
            Some((exp, if &rest[i..=i] == "-" { -off } else { off }))
        }
        None => Some((rest.parse().ok()?, 0)),
    }
}

pub fn size(s: &str) -> Result<usize, String> {
    count(s).and_then(|v| usize::try_from(v).map_err(|_| format!("'{s}' is too large")))
}

/// Real number; also accepts `2^k` with a possibly negative `k`.
pub fn real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Some((base, exp)) = t.split_once('^') {
        let base: f64 = base.parse().map_err(|_| format!("bad base in '{s}'"))?;
        let exp: i32 = exp.parse().map_err(|_| format!("bad exponent in '{s}'"))?;
        return Ok(base.powi(exp));
    }
    let v: f64 = t.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

pub fn flag(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("'{s}' is not a boolean")),
    }
}

/// Comma-separated list.
pub fn list<T>(s: &str, item: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(item).collect()
}
