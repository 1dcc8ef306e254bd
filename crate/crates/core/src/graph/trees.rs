//! Unlabeled rooted tree counts and the Otter constant.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub const MAX_TREE_ORDER: usize = 60;

fn counts_to(max_n: usize) -> Result<Vec<u128>> {
    let overflow = || Error::TooLarge(format!("rooted tree counts up to {max_n}"));
    // r[0] is unused padding so that r[i] counts trees on i vertices.
    let mut r: Vec<u128> = vec![0, 1];
    let mut divsum: Vec<u128> = vec![0, 1];
    for n in 1..max_n {
        let mut s: u128 = 0;
        for k in 1..=n {
            let term = divsum[k].checked_mul(r[n - k + 1]).ok_or_else(overflow)?;
            s = s.checked_add(term).ok_or_else(overflow)?;
        }
        r.push(s / n as u128);
        let m = n + 1;
        let mut d: u128 = 0;
        for j in 1..=m {
            if m % j == 0 {
                d = d
                    .checked_add((j as u128).checked_mul(r[j]).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
        }
        divsum.push(d);
    }
    Ok(r[1..=max_n].to_vec())
}

/// `r_1, ..., r_max_n`: 1, 1, 2, 4, 9, 20, 48, 115, 286, ...
pub fn rooted_tree_counts(max_n: usize) -> Result<Vec<u128>> {
    if max_n == 0 || max_n > MAX_TREE_ORDER {
        return Err(invalid(
            "max_n",
            format!("must be in 1..={MAX_TREE_ORDER}, got {max_n}"),
        ));
    }
    counts_to(max_n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OtterEstimate {
    pub estimate: f64,
    pub converged: bool,
    pub max_n: usize,
    /// `r_max_n / r_(max_n + 1)` without any correction.
    pub raw_ratio: f64,
}

/// Estimates `α = lim r_n / r_(n+1)`. The ratios are first multiplied by
/// `(n/(n+1))^{3/2}`, which removes the leading `n^{-3/2}` factor of `r_n`,
/// and then accelerated with Aitken's Δ² process.
pub fn otter_constant_estimate(max_n: usize) -> Result<OtterEstimate> {
    if max_n < 2 || max_n > MAX_TREE_ORDER {
        return Err(invalid(
            "max_n",
            format!("must be in 2..={MAX_TREE_ORDER}, got {max_n}"),
        ));
    }
    let r = counts_to(max_n + 1)?;
    let raw = |k: usize| r[k - 1] as f64 / r[k] as f64;
    let raw_ratio = raw(max_n);
    if max_n < 5 {
        return Ok(OtterEstimate {
            estimate: raw_ratio,
            converged: false,
            max_n,
            raw_ratio,
        });
    }
    let x: Vec<f64> = (1..=max_n)
        .map(|k| raw(k) * (k as f64 / (k as f64 + 1.0)).powf(1.5))
        .collect();
    let aitken = |i: usize| {
        let (a, b, c) = (x[i - 2], x[i - 1], x[i]);
        let denom = (c - b) - (b - a);
        if denom.abs() < 1e-300 {
            c
        } else {
            c - (c - b) * (c - b) / denom
        }
    };
    let last = aitken(max_n - 1);
    let prev = aitken(max_n - 2);
    Ok(OtterEstimate {
        estimate: last,
        converged: (last - prev).abs() < 1e-4,
        max_n,
        raw_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_counts() {
        assert_eq!(rooted_tree_counts(9).unwrap(), vec![1, 1, 2, 4, 9, 20, 48, 115, 286]);
        assert!(rooted_tree_counts(61).is_err());
    }

    #[test]
    fn crude_estimate_is_flagged() {
        let e = otter_constant_estimate(2).unwrap();
        assert_eq!(e.estimate, 0.5);
        assert!(!e.converged);
    }
}
