//! Liouville function tables and exponential-sum experiments.

use std::io::{self, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::gen_liouville;
use crate::norm::{lp_norm, sup_norm};

/// Upper bound on sieve size.
pub const MAX_SIEVE: usize = 100_000_000;

/// `λ(1..=N)`, stored zero-based: `values()[k - 1] = λ(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiouvilleTable {
    lambda: Vec<i8>,
}

impl LiouvilleTable {
    pub fn bound(&self) -> usize {
        self.lambda.len()
    }

    pub fn values(&self) -> &[i8] {
        &self.lambda
    }

    /// `λ(k)` for `1 <= k <= N`.
    pub fn get(&self, k: usize) -> i8 {
        self.lambda[k - 1]
    }

    /// Binary export.
    ///
    /// Layout: magic `b"LIOU"`, format version `1u8`, `N` as little-endian
    /// `u64`, then `ceil(N/8)` bytes. Bit `(k-1) % 8` (LSB first) of byte
    /// `(k-1) / 8` is set when `λ(k) = -1`.
    pub fn write_bits<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(b"LIOU")?;
        w.write_all(&[1u8])?;
        w.write_all(&(self.lambda.len() as u64).to_le_bytes())?;
        let mut bytes = vec![0u8; self.lambda.len().div_ceil(8)];
        for (i, &l) in self.lambda.iter().enumerate() {
            if l < 0 {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        w.write_all(&bytes)
    }

    pub fn read_bits<R: Read>(mut r: R) -> io::Result<Self> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let mut head = [0u8; 13];
        r.read_exact(&mut head)?;
        if &head[..4] != b"LIOU" {
            return Err(bad("missing LIOU magic"));
        }
        if head[4] != 1 {
            return Err(bad("unsupported format version"));
        }
        let n = u64::from_le_bytes(head[5..13].try_into().unwrap()) as usize;
        let mut bytes = vec![0u8; n.div_ceil(8)];
        r.read_exact(&mut bytes)?;
        let lambda = (0..n)
            .map(|i| if bytes[i / 8] >> (i % 8) & 1 == 1 { -1 } else { 1 })
            .collect();
        Ok(Self { lambda })
    }
}

/// Linear sieve on smallest prime factors: `λ(n) = -λ(n / spf(n))`.
pub fn liouville_sieve(n: usize) -> Result<LiouvilleTable> {
    if n == 0 {
        return Err(Error::param("liouville sieve bound N must be at least 1"));
    }
    if n > MAX_SIEVE {
        return Err(Error::Capability(format!("sieve bound {n} exceeds cap {MAX_SIEVE}")));
    }
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    let mut lambda = vec![0i8; n + 1];
    if n >= 1 {
        lambda[1] = 1;
    }
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf[i] || ip > n {
                break;
            }
            spf[ip] = p;
        }
        lambda[i] = -lambda[i / spf[i] as usize];
    }
    lambda.remove(0);
    Ok(LiouvilleTable { lambda })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    /// `None` stands for the sup norm.
    pub alpha: Option<f64>,
    pub ratio: f64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "N,alpha,ratio";

    pub fn csv(&self) -> String {
        let a = self.alpha.map_or_else(|| "inf".to_string(), |a| a.to_string());
        format!("{},{},{}", self.n, a, self.ratio)
    }
}

/// `||Σ_{k<=N} λ(k) z^k||_α / √N` for every `(N, α)` pair. `α = ∞` is
/// requested with `None` (or `f64::INFINITY`) and uses [`sup_norm`].
pub fn liouville_norm_sweep(n_list: &[usize], alphas: &[Option<f64>]) -> Result<Vec<SweepRow>> {
    let pairs: Vec<(usize, Option<f64>)> = n_list
        .iter()
        .flat_map(|&n| alphas.iter().map(move |&a| (n, a)))
        .collect();
    pairs
        .par_iter()
        .map(|&(n, alpha)| {
            let p = gen_liouville(n, false)?;
            let root_n = (n as f64).sqrt();
            let norm = match alpha {
                Some(a) if a.is_finite() => lp_norm(&p, a, None)?,
                _ => {
                    let grid = crate::grid::evaluate_on_grid(&p, None)?;
                    sup_norm(&p, &grid).value
                }
            };
            Ok(SweepRow {
                n,
                alpha: alpha.filter(|a| a.is_finite()),
                ratio: norm / root_n,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSumReport {
    pub n: usize,
    pub max_ratio: f64,
    pub argmax_m: usize,
    pub final_sum: i64,
}

/// `max_{M<=N} |Σ_{k<=M} λ(k)| / √M` with exact integer partial sums.
pub fn partial_sum_ratio(n: usize) -> Result<PartialSumReport> {
    let table = liouville_sieve(n)?;
    let mut sum: i64 = 0;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, &l) in table.values().iter().enumerate() {
        sum += i64::from(l);
        let m = i + 1;
        let r = sum.unsigned_abs() as f64 / (m as f64).sqrt();
        if r > best.0 {
            best = (r, m);
        }
    }
    Ok(PartialSumReport {
        n,
        max_ratio: best.0,
        argmax_m: best.1,
        final_sum: sum,
    })
}
