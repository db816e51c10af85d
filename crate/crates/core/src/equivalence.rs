//! Affine-equivalence machinery for the Gold construction
//! G_i(x) = L2(L1(x)^{2^i + I}) with L1, L2 of the form A x^q + B x over F_q,
//! plus the reference permutation families used as boomerang-uniformity-4
//! test vectors.

use crate::butterfly::{ButterflyError, ButterflyParams};
use crate::field::{gcd, FieldSpec, Fq, Fq2, Tower};
use crate::sbox::Sbox;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquivError {
    #[error("linear map Ax^q + Bx with A = B = {0:#x} is singular")]
    SingularMap(Fq),
    #[error("branch index i={i} must be >= 1 and coprime to n={n}")]
    BadBranchIndex { i: u32, n: u32 },
    #[error("table width {got} does not match the field (expected m={expected})")]
    WidthMismatch { expected: u32, got: u32 },
    #[error("{0}")]
    BadFamilyParams(String),
    #[error(transparent)]
    Butterfly(#[from] ButterflyError),
}

/// The F_q-coefficient linear map x -> A x^q + B x on F_{q^2};
/// invertible iff A != B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinMapQ2 {
    pub a: Fq,
    pub b: Fq,
}

impl LinMapQ2 {
    pub fn new(a: Fq, b: Fq) -> Self {
        LinMapQ2 { a, b }
    }

    pub fn is_invertible(&self) -> bool {
        self.a != self.b
    }

    pub fn apply(&self, tower: &Tower, z: Fq2) -> Fq2 {
        let zq = tower.frobenius_q(z);
        tower.add(tower.scale(self.a, zq), tower.scale(self.b, z))
    }
}

fn check_branch_index(spec: &FieldSpec, i: u32) -> Result<(), EquivError> {
    if i == 0 || gcd(i as u64, spec.n() as u64) != 1 {
        return Err(EquivError::BadBranchIndex { i, n: spec.n() });
    }
    Ok(())
}

/// Raises z to 2^i + I, with I = 1 for even i and I = q for odd i.
#[inline]
fn gold_power(tower: &Tower, z: Fq2, i: u32) -> Fq2 {
    let w = tower.frob_pow(z, i);
    if i & 1 == 1 {
        tower.mul(w, tower.frobenius_q(z))
    } else {
        tower.mul(w, z)
    }
}

/// Table of G_i(x) = L2(L1(x)^{2^i + I}).
pub fn gold_construct(
    tower: &Tower,
    l1: LinMapQ2,
    l2: LinMapQ2,
    i: u32,
) -> Result<Sbox, EquivError> {
    check_branch_index(tower.base(), i)?;
    if !l1.is_invertible() {
        return Err(EquivError::SingularMap(l1.a));
    }
    if !l2.is_invertible() {
        return Err(EquivError::SingularMap(l2.a));
    }
    let t = *tower;
    Ok(Sbox::from_fn(t.m(), |a| {
        let z = t.from_idx(a);
        t.idx(l2.apply(&t, gold_power(&t, l1.apply(&t, z), i)))
    }))
}

/// Coefficients of G_i in the monomial basis
/// (z^{q(2^i+1)}, z^{q 2^i+1}, z^{2^i+q}, z^{2^i+1}).
///
/// For even i these are the direct closed forms; the odd case comes out of
/// the same expansion with I = q, which permutes the even-i terms. Either
/// way the table test below is what is trusted, not the algebra.
pub fn gold_univariate_coeffs(spec: &FieldSpec, l1: LinMapQ2, l2: LinMapQ2, i: u32) -> [Fq; 4] {
    let (a, b, c, d) = (l1.a, l1.b, l2.a, l2.b);
    let a2i = spec.frob_pow(a, i);
    let b2i = spec.frob_pow(b, i);
    let e1 = spec.mul(spec.mul(a2i, a), d) ^ spec.mul(spec.mul(b2i, b), c);
    let e2 = spec.mul(spec.mul(a2i, b), d) ^ spec.mul(spec.mul(a, b2i), c);
    let e3 = spec.mul(spec.mul(a, b2i), d) ^ spec.mul(spec.mul(a2i, b), c);
    let e4 = spec.mul(spec.mul(a2i, a), c) ^ spec.mul(spec.mul(b2i, b), d);
    if i & 1 == 1 {
        [e2, e1, e4, e3]
    } else {
        [e1, e2, e3, e4]
    }
}

/// Whether the Gold coefficients satisfy the Gamma relation
/// phi_2^{2^i} = phi_1 phi_4^{2^i-1} with phi_4 != 0. Holds for every pair
/// of invertible maps.
pub fn gold_phi_check(spec: &FieldSpec, l1: LinMapQ2, l2: LinMapQ2, i: u32) -> bool {
    let eps = gold_univariate_coeffs(spec, l1, l2, i);
    let p1 = spec.mul(eps[0], eps[2]) ^ spec.mul(eps[1], eps[3]);
    let p2 = spec.mul(eps[0], eps[1]) ^ spec.mul(eps[2], eps[3]);
    let p4 = spec.sq(eps[0] ^ eps[1] ^ eps[2] ^ eps[3]);
    p4 != 0 && spec.frob_pow(p2, i) == spec.mul(p1, spec.pow(p4, (1u64 << i) - 1))
}

/// A successful match G_i = f_i together with the probe points used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldWitness {
    pub a: Fq,
    pub b: Fq,
    pub c: Fq,
    pub d: Fq,
    pub i: u32,
    pub matched_alpha: Fq,
    pub matched_beta: Fq,
    /// Packed probe inputs filtered on before full-table comparison.
    pub probe_points: Vec<u32>,
}

impl GoldWitness {
    pub fn maps(&self) -> (LinMapQ2, LinMapQ2) {
        (LinMapQ2::new(self.a, self.b), LinMapQ2::new(self.c, self.d))
    }

    /// Rebuilds G_i from the stored maps and compares against `target`.
    pub fn replay(&self, tower: &Tower, target: &Sbox) -> Result<bool, EquivError> {
        let (l1, l2) = self.maps();
        Ok(&gold_construct(tower, l1, l2, self.i)? == target)
    }
}

/// Probe inputs z in {1, gamma, gamma+1, gamma^2+gamma} (as packed indices).
fn probe_points(tower: &Tower) -> Vec<u32> {
    let g = Fq2::GAMMA;
    let g2 = tower.mul(g, g);
    [Fq2::ONE, g, tower.add(g, Fq2::ONE), tower.add(g2, g)]
        .iter()
        .map(|&z| tower.idx(z))
        .collect()
}

/// Exhaustive search for (A, B, C, D) in F_q^4 with A != B, C != D such that
/// G_i equals `target` pointwise. The scan runs in lexicographic order with
/// a probe-point filter before any full comparison; the first (lexicographic
/// least) witness is returned.
pub fn find_gold_equivalence(
    params: &ButterflyParams,
    target: &Sbox,
) -> Result<Option<GoldWitness>, EquivError> {
    let tower = *params.tower();
    if target.m() != tower.m() {
        return Err(EquivError::WidthMismatch {
            expected: tower.m(),
            got: target.m(),
        });
    }
    let spec = *tower.base();
    let i = params.i();
    let probes = probe_points(&tower);
    let probe_targets: Vec<Fq2> = probes
        .iter()
        .map(|&t| tower.from_idx(target.apply(t)))
        .collect();

    let witness = (0..spec.q()).into_par_iter().find_map_first(|a| {
        for b in 0..spec.q() {
            if a == b {
                continue;
            }
            let l1 = LinMapQ2::new(a, b);
            // powered L1 values at the probes, shared across (C, D)
            let powered: Vec<Fq2> = probes
                .iter()
                .map(|&t| gold_power(&tower, l1.apply(&tower, tower.from_idx(t)), i))
                .collect();
            for c in 0..spec.q() {
                for d in 0..spec.q() {
                    if c == d {
                        continue;
                    }
                    let l2 = LinMapQ2::new(c, d);
                    if powered
                        .iter()
                        .zip(&probe_targets)
                        .all(|(&p, &want)| l2.apply(&tower, p) == want)
                    {
                        let full =
                            gold_construct(&tower, l1, l2, i).expect("maps checked invertible");
                        if &full == target {
                            return Some((a, b, c, d));
                        }
                    }
                }
            }
        }
        None
    });

    Ok(witness.map(|(a, b, c, d)| GoldWitness {
        a,
        b,
        c,
        d,
        i,
        matched_alpha: params.alpha(),
        matched_beta: params.beta(),
        probe_points: probes,
    }))
}

/// All witnesses for a target, in lexicographic order.
pub fn all_gold_witnesses(
    params: &ButterflyParams,
    target: &Sbox,
) -> Result<Vec<GoldWitness>, EquivError> {
    let tower = *params.tower();
    if target.m() != tower.m() {
        return Err(EquivError::WidthMismatch {
            expected: tower.m(),
            got: target.m(),
        });
    }
    let spec = *tower.base();
    let i = params.i();
    let probes = probe_points(&tower);
    let mut found: Vec<GoldWitness> = (0..spec.q())
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut local = Vec::new();
            for b in 0..spec.q() {
                if a == b {
                    continue;
                }
                let l1 = LinMapQ2::new(a, b);
                for c in 0..spec.q() {
                    for d in 0..spec.q() {
                        if c == d {
                            continue;
                        }
                        let l2 = LinMapQ2::new(c, d);
                        if let Ok(full) = gold_construct(&tower, l1, l2, i) {
                            if &full == target {
                                local.push((a, b, c, d));
                            }
                        }
                    }
                }
            }
            local
        })
        .map(|(a, b, c, d)| GoldWitness {
            a,
            b,
            c,
            d,
            i,
            matched_alpha: params.alpha(),
            matched_beta: params.beta(),
            probe_points: probes.clone(),
        })
        .collect();
    found.sort_by_key(|w| (w.a, w.b, w.c, w.d));
    Ok(found)
}

/// Known permutation families with boomerang uniformity 4 over F_{q^2},
/// used as reference vectors for the analysis code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceFamily {
    /// x^{-1} with 0 mapped to 0.
    Inverse,
    /// x^{2^{2i}+1} with gcd(i, n) = 1, over the full tower field.
    GoldPower { i: u32 },
    /// alpha x^{2^{2s}+1} + alpha^{2^{2k}} x^{2^{-2k} + 2^{2k+2s}} with
    /// n = 3k, 3 not dividing k, 3 | (k+s), gcd(3k, s) = 1, alpha primitive.
    MesnagerTrinomial { k: u32, s: u32 },
}

/// Smallest-index primitive element of F_{q^2} (multiplicative order q^2 - 1).
pub fn primitive_element(tower: &Tower) -> Fq2 {
    let order = tower.q2() - 1;
    let mut prime_factors = Vec::new();
    let mut rem = order;
    let mut p = 2;
    while p * p <= rem {
        if rem.is_multiple_of(p) {
            prime_factors.push(p);
            while rem.is_multiple_of(p) {
                rem /= p;
            }
        }
        p += 1;
    }
    if rem > 1 {
        prime_factors.push(rem);
    }
    for t in 2..tower.q2() as u32 {
        let z = tower.from_idx(t);
        if prime_factors
            .iter()
            .all(|&p| tower.pow(z, order / p) != Fq2::ONE)
        {
            return z;
        }
    }
    unreachable!("F_{{q^2}}^* is cyclic")
}

/// Builds the requested reference family over the tower field.
pub fn reference_family(tower: &Tower, family: ReferenceFamily) -> Result<Sbox, EquivError> {
    let t = *tower;
    match family {
        ReferenceFamily::Inverse => {
            let e = t.q2() - 2;
            Ok(Sbox::from_fn(t.m(), |a| t.idx(t.pow(t.from_idx(a), e))))
        }
        ReferenceFamily::GoldPower { i } => {
            check_branch_index(t.base(), i)?;
            let e = (1u64 << (2 * i)) + 1;
            Ok(Sbox::from_fn(t.m(), |a| t.idx(t.pow(t.from_idx(a), e))))
        }
        ReferenceFamily::MesnagerTrinomial { k, s } => {
            let n = t.base().n();
            if n != 3 * k {
                return Err(EquivError::BadFamilyParams(format!(
                    "need n = 3k, got n={n}, k={k}"
                )));
            }
            if k % 3 == 0 {
                return Err(EquivError::BadFamilyParams(format!(
                    "need 3 not dividing k, got k={k}"
                )));
            }
            if (k + s) % 3 != 0 {
                return Err(EquivError::BadFamilyParams(format!(
                    "need 3 | (k+s), got k={k}, s={s}"
                )));
            }
            if gcd((3 * k) as u64, s as u64) != 1 {
                return Err(EquivError::BadFamilyParams(format!(
                    "need gcd(3k, s) = 1, got k={k}, s={s}"
                )));
            }
            let m = 2 * n;
            let order = t.q2() - 1;
            // exponents live in Z_{q^2-1}: 2^{-2k} = 2^{2n-2k}
            let e1 = ((1u64 << ((2 * s) % m)) + 1) % order;
            let e2 = ((1u64 << ((m - 2 * k) % m)) + (1u64 << ((2 * k + 2 * s) % m))) % order;
            let alpha = primitive_element(&t);
            let alpha_pow = t.pow(alpha, 1 << (2 * k));
            Ok(Sbox::from_fn(t.m(), |a| {
                let z = t.from_idx(a);
                if z.is_zero() {
                    return 0;
                }
                let v1 = t.mul(alpha, t.pow(z, e1));
                let v2 = t.mul(alpha_pow, t.pow(z, e2));
                t.idx(t.add(v1, v2))
            }))
        }
    }
}
