//! Small GF(2) linear algebra on bit-vector rows, enough for canonical
//! subspace bases and null spaces of maps on m <= 20 bits.

/// Reduced-echelon canonical basis of the span of `vectors`.
///
/// Rows come out fully reduced and sorted by descending leading bit, so two
/// subspaces are equal iff their canonical bases are equal as vectors.
pub fn rref_basis(vectors: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            let lead = 1u32 << (31 - b.leading_zeros());
            if v & lead != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            // clear the new pivot from existing rows
            let lead = 1u32 << (31 - v.leading_zeros());
            for b in basis.iter_mut() {
                if *b & lead != 0 {
                    *b ^= v;
                }
            }
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Rank of the span.
pub fn rank(vectors: impl IntoIterator<Item = u32>) -> u32 {
    rref_basis(vectors).len() as u32
}

/// Canonical basis of { x in F_2^m : xor over set bits j of x of cols[j] = 0 }.
///
/// `cols[j]` is the image of the j-th unit vector under a linear map.
pub fn null_space(cols: &[u32]) -> Vec<u32> {
    // rows of (cols | I) eliminated on the image part; rows whose image part
    // vanishes carry kernel combinations in the identity part
    let rows: Vec<(u32, u32)> = cols
        .iter()
        .enumerate()
        .map(|(j, &c)| (c, 1u32 << j))
        .collect();
    let mut kernel = Vec::new();
    let mut pivots: Vec<(u32, u32)> = Vec::new();
    for (mut img, mut comb) in rows {
        for &(pimg, pcomb) in &pivots {
            let lead = 1u32 << (31 - pimg.leading_zeros());
            if img & lead != 0 {
                img ^= pimg;
                comb ^= pcomb;
            }
        }
        if img == 0 {
            kernel.push(comb);
        } else {
            pivots.push((img, comb));
        }
    }
    rref_basis(kernel)
}

/// Enumerates all 2^dim elements spanned by `basis` (dim kept small by callers).
pub fn span_elements(basis: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(1 << basis.len());
    for mask in 0u32..(1 << basis.len()) {
        let mut v = 0;
        for (j, &b) in basis.iter().enumerate() {
            if mask >> j & 1 != 0 {
                v ^= b;
            }
        }
        out.push(v);
    }
    out
}
