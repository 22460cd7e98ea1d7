#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

/// Brute force: follow every start until it repeats, name the cycle it hits by
/// its smallest point, count starts per cycle. Returns (period, basin,
/// min_index) sorted by basin descending, then min_index.
pub fn naive_cycles(n: u64, f: impl Fn(u64) -> u64) -> Vec<(u64, u64, u64)> {
    let mut found: HashMap<u64, (u64, u64)> = HashMap::new();
    for start in 0..n {
        let mut seen: HashMap<u64, u64> = HashMap::new();
        let mut x = start;
        let mut t = 0u64;
        let first_repeat = loop {
            if let Some(&at) = seen.get(&x) {
                break at;
            }
            seen.insert(x, t);
            x = f(x);
            t += 1;
        };
        let period = t - first_repeat;
        let mut min = x;
        let mut y = f(x);
        while y != x {
            min = min.min(y);
            y = f(y);
        }
        found.entry(min).or_insert((period, 0)).1 += 1;
    }
    let mut out: Vec<(u64, u64, u64)> = found.into_iter().map(|(m, (p, b))| (p, b, m)).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    out
}

/// `E[(2/M) Σ (P_i - 1/2)^2]` for `n` i.i.d. uniform points on [-1, 1] in
/// `m` boxes: each count is Binomial(n, 1/m) and `P_i = m count_i / 2n`.
pub fn iid_l2_sq_mean(m: usize, n: u64) -> f64 {
    let (m, n) = (m as f64, n as f64);
    let var_count = n * (1.0 / m) * (1.0 - 1.0 / m);
    2.0 / m * m * (m / (2.0 * n)).powi(2) * var_count
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chaolab")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("run chaolab")
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin()).current_dir(dir).args(args).output().expect("run chaolab")
}

/// Output lines that are not `#` comments.
pub fn data_lines(out: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(out).lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}
