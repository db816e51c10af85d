//! Cryptographic property computation: DDT and differential uniformity,
//! BCT and boomerang uniformity by two independent algorithms, Walsh
//! spectrum / nonlinearity, bilinear images of quadratic functions, and the
//! image-subspace criterion for boomerang uniformity 4.

use crate::gf2;
use crate::sbox::Sbox;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Full 2^m x 2^m tables are only materialized at desk scale.
pub const MAX_TABLE_M: u32 = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("BCT requires a bijective S-box")]
    NotAPermutation,
    #[error("operation requires algebraic degree <= 2, found {0}")]
    NotQuadratic(u32),
    #[error("criterion requires differential uniformity 4, found {0}")]
    WrongDifferentialUniformity(u32),
    #[error("direction a must be nonzero")]
    ZeroDirection,
    #[error("full table for m={0} exceeds the m<={MAX_TABLE_M} limit")]
    TableTooLarge(u32),
}

/// Max value and histogram of a spectrum scan. The histogram covers exactly
/// the scanned region, so its counts sum to the region size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub max_value: u32,
    pub histogram: BTreeMap<u32, u64>,
    pub per_row_max: Option<Vec<u32>>,
}

fn merge_histograms(mut a: BTreeMap<u32, u64>, b: BTreeMap<u32, u64>) -> BTreeMap<u32, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

fn summarize(rows: Vec<(u32, BTreeMap<u32, u64>)>, keep_rows: bool) -> SpectrumSummary {
    let per_row_max: Vec<u32> = rows.iter().map(|(m, _)| *m).collect();
    let max_value = per_row_max.iter().copied().max().unwrap_or(0);
    let histogram = rows
        .into_iter()
        .map(|(_, h)| h)
        .fold(BTreeMap::new(), merge_histograms);
    SpectrumSummary {
        max_value,
        histogram,
        per_row_max: keep_rows.then_some(per_row_max),
    }
}

/// One DDT row: counts of s(x+a)+s(x) = b over x, for fixed a.
fn ddt_row(s: &Sbox, a: u32) -> Vec<u32> {
    let sz = s.len();
    let mut row = vec![0u32; sz];
    for x in 0..sz as u32 {
        row[(s.apply(x ^ a) ^ s.apply(x)) as usize] += 1;
    }
    row
}

/// DDT summary over rows a != 0 (all b). `max_value` is the differential
/// uniformity.
pub fn ddt(s: &Sbox) -> SpectrumSummary {
    let sz = s.len() as u32;
    let rows: Vec<(u32, BTreeMap<u32, u64>)> = (1..sz)
        .into_par_iter()
        .map(|a| {
            let row = ddt_row(s, a);
            let mut h = BTreeMap::new();
            for &c in &row {
                *h.entry(c).or_insert(0) += 1;
            }
            (row.iter().copied().max().unwrap(), h)
        })
        .collect();
    summarize(rows, s.m() <= MAX_TABLE_M)
}

pub fn ddt_entry(s: &Sbox, a: u32, b: u32) -> u32 {
    (0..s.len() as u32)
        .filter(|&x| s.apply(x ^ a) ^ s.apply(x) == b)
        .count() as u32
}

/// Differential uniformity: max DDT entry over a != 0.
pub fn differential_uniformity(s: &Sbox) -> u32 {
    (1..s.len() as u32)
        .into_par_iter()
        .map(|a| ddt_row(s, a).into_iter().max().unwrap())
        .max()
        .unwrap_or(0)
}

/// Full DDT as a table (desk scale only).
pub fn ddt_table(s: &Sbox) -> Result<Vec<Vec<u32>>, AnalysisError> {
    if s.m() > MAX_TABLE_M {
        return Err(AnalysisError::TableTooLarge(s.m()));
    }
    Ok((0..s.len() as u32).map(|a| ddt_row(s, a)).collect())
}

fn require_permutation(s: &Sbox) -> Result<Sbox, AnalysisError> {
    s.invert().map_err(|_| AnalysisError::NotAPermutation)
}

/// One BCT column (fixed b) by the inverse-based definition:
/// counts of x with s^{-1}(s(x)+b) + s^{-1}(s(x+a)+b) = a, per a.
fn bct_col_inverse(s: &Sbox, inv: &Sbox, b: u32) -> Vec<u32> {
    let sz = s.len() as u32;
    let t: Vec<u32> = (0..sz).map(|x| inv.apply(s.apply(x) ^ b)).collect();
    let mut col = vec![0u32; sz as usize];
    for a in 0..sz {
        let mut cnt = 0;
        for x in 0..sz {
            if t[x as usize] ^ t[(x ^ a) as usize] == a {
                cnt += 1;
            }
        }
        col[a as usize] = cnt;
    }
    col
}

/// BCT summary over a, b != 0 via the inverse-based definition.
/// `max_value` is the boomerang uniformity.
pub fn bct_via_inverse(s: &Sbox) -> Result<SpectrumSummary, AnalysisError> {
    let inv = require_permutation(s)?;
    let sz = s.len() as u32;
    let cols: Vec<(u32, BTreeMap<u32, u64>)> = (1..sz)
        .into_par_iter()
        .map(|b| {
            let col = bct_col_inverse(s, &inv, b);
            let mut h = BTreeMap::new();
            let mut mx = 0;
            for &c in &col[1..] {
                if s.m() <= MAX_TABLE_M {
                    *h.entry(c).or_insert(0) += 1;
                }
                mx = mx.max(c);
            }
            (mx, h)
        })
        .collect();
    let mut summary = summarize(cols, false);
    if s.m() > MAX_TABLE_M {
        summary.histogram.clear();
    }
    Ok(summary)
}

/// Full BCT by the inverse-based definition; rows indexed by a, columns by b.
pub fn bct_table_via_inverse(s: &Sbox) -> Result<Vec<Vec<u32>>, AnalysisError> {
    if s.m() > MAX_TABLE_M {
        return Err(AnalysisError::TableTooLarge(s.m()));
    }
    let inv = require_permutation(s)?;
    let sz = s.len() as u32;
    let mut table = vec![vec![0u32; sz as usize]; sz as usize];
    for b in 0..sz {
        let col = bct_col_inverse(s, &inv, b);
        for a in 0..sz {
            table[a as usize][b as usize] = col[a as usize];
        }
    }
    Ok(table)
}

/// One BCT row (fixed a) by solution counting: the number of pairs (x, y)
/// with s(x+a)+s(y+a) = b and s(x)+s(y) = b, bucketed per b.
fn bct_row_system(s: &Sbox, a: u32) -> Vec<u32> {
    let sz = s.len() as u32;
    let mut row = vec![0u32; sz as usize];
    for x in 0..sz {
        let sx = s.apply(x);
        let sxa = s.apply(x ^ a);
        for y in 0..sz {
            let b1 = sx ^ s.apply(y);
            let b2 = sxa ^ s.apply(y ^ a);
            if b1 == b2 {
                row[b1 as usize] += 1;
            }
        }
    }
    row
}

/// BCT summary over a, b != 0 via the two-equation solution count. Must agree
/// entrywise with [`bct_via_inverse`]; this is the internal cross-check route.
pub fn bct_via_system(s: &Sbox) -> Result<SpectrumSummary, AnalysisError> {
    require_permutation(s)?;
    let sz = s.len() as u32;
    let rows: Vec<(u32, BTreeMap<u32, u64>)> = (1..sz)
        .into_par_iter()
        .map(|a| {
            let row = bct_row_system(s, a);
            let mut h = BTreeMap::new();
            let mut mx = 0;
            for &c in &row[1..] {
                if s.m() <= MAX_TABLE_M {
                    *h.entry(c).or_insert(0) += 1;
                }
                mx = mx.max(c);
            }
            (mx, h)
        })
        .collect();
    let mut summary = summarize(rows, false);
    if s.m() > MAX_TABLE_M {
        summary.histogram.clear();
    }
    Ok(summary)
}

/// Full BCT by solution counting.
pub fn bct_table_via_system(s: &Sbox) -> Result<Vec<Vec<u32>>, AnalysisError> {
    if s.m() > MAX_TABLE_M {
        return Err(AnalysisError::TableTooLarge(s.m()));
    }
    require_permutation(s)?;
    Ok((0..s.len() as u32).map(|a| bct_row_system(s, a)).collect())
}

/// Boomerang uniformity via the inverse-based definition.
pub fn boomerang_uniformity(s: &Sbox) -> Result<u32, AnalysisError> {
    Ok(bct_via_inverse(s)?.max_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalshSummary {
    pub nonlinearity: u32,
    pub spectrum_max: u32,
}

fn fwht(buf: &mut [i32]) {
    let n = buf.len();
    let mut h = 1;
    while h < n {
        let mut s = 0;
        while s < n {
            for j in s..s + h {
                let (x, y) = (buf[j], buf[j + h]);
                buf[j] = x + y;
                buf[j + h] = x - y;
            }
            s += 2 * h;
        }
        h *= 2;
    }
}

/// Walsh spectrum of one component v: W(u, v) for all u, by fast transform.
pub fn walsh_component(s: &Sbox, v: u32) -> Vec<i32> {
    let mut buf: Vec<i32> = s
        .table()
        .iter()
        .map(|&y| if (v & y).count_ones() & 1 == 0 { 1 } else { -1 })
        .collect();
    fwht(&mut buf);
    buf
}

/// Nonlinearity 2^{m-1} - max|W|/2 with the max over all u and all v != 0.
pub fn walsh_nonlinearity(s: &Sbox) -> WalshSummary {
    let sz = s.len() as u32;
    let spectrum_max = (1..sz)
        .into_par_iter()
        .map(|v| {
            walsh_component(s, v)
                .into_iter()
                .map(|w| w.unsigned_abs())
                .max()
                .unwrap()
        })
        .max()
        .unwrap_or(0);
    WalshSummary {
        nonlinearity: (1 << (s.m() - 1)) - spectrum_max / 2,
        spectrum_max,
    }
}

/// The symmetric bilinear value S_s(a, x) = s(x+a) + s(x) + s(a) + s(0).
/// For quadratic s this is linear in x.
#[inline]
pub fn bilinear_value(s: &Sbox, a: u32, x: u32) -> u32 {
    s.apply(a ^ x) ^ s.apply(a) ^ s.apply(x) ^ s.apply(0)
}

/// Image and kernel of the linear map x -> S_s(a, x), in canonical
/// reduced-echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearImage {
    pub direction: u32,
    pub image_basis: Vec<u32>,
    pub kernel_basis: Vec<u32>,
}

impl BilinearImage {
    pub fn image_dim(&self) -> u32 {
        self.image_basis.len() as u32
    }

    pub fn kernel_dim(&self) -> u32 {
        self.kernel_basis.len() as u32
    }
}

fn bilinear_columns(s: &Sbox, a: u32) -> Vec<u32> {
    (0..s.m()).map(|j| bilinear_value(s, a, 1 << j)).collect()
}

/// Bilinear image of a quadratic S-box in direction a != 0.
pub fn bilinear_image(s: &Sbox, a: u32) -> Result<BilinearImage, AnalysisError> {
    if a == 0 {
        return Err(AnalysisError::ZeroDirection);
    }
    let deg = s.algebraic_degree();
    if deg > 2 {
        return Err(AnalysisError::NotQuadratic(deg));
    }
    let cols = bilinear_columns(s, a);
    Ok(BilinearImage {
        direction: a,
        image_basis: gf2::rref_basis(cols.iter().copied()),
        kernel_basis: gf2::null_space(&cols),
    })
}

/// Image-subspace criterion for quadratic permutations with differential
/// uniformity 4: boomerang uniformity 4 holds iff Im_{s,a} = Im_{s,b} for
/// every pair a, b != 0 with S_s(a, b) = 0.
pub fn quadratic_boomerang4_check(s: &Sbox) -> Result<bool, AnalysisError> {
    if !s.is_permutation() {
        return Err(AnalysisError::NotAPermutation);
    }
    let deg = s.algebraic_degree();
    if deg != 2 {
        return Err(AnalysisError::NotQuadratic(deg));
    }
    let du = differential_uniformity(s);
    if du != 4 {
        return Err(AnalysisError::WrongDifferentialUniformity(du));
    }
    let sz = s.len() as u32;
    let bases: Vec<Vec<u32>> = (0..sz)
        .into_par_iter()
        .map(|a| {
            if a == 0 {
                Vec::new()
            } else {
                gf2::rref_basis(bilinear_columns(s, a))
            }
        })
        .collect();
    let ok = (1..sz).into_par_iter().all(|a| {
        let kernel = gf2::null_space(&bilinear_columns(s, a));
        gf2::span_elements(&kernel)
            .into_iter()
            .filter(|&b| b != 0 && b != a)
            .all(|b| bases[a as usize] == bases[b as usize])
    });
    Ok(ok)
}
