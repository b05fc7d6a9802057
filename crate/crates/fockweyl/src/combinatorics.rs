//! Multi-indices, factorials and binomials.

/// Occupation multi-index α ∈ N^d.
pub type MultiIndex = Vec<u32>;

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn ln_factorial(n: u32) -> f64 {
    statrs::function::factorial::ln_factorial(n as u64)
}

/// n!/(n-k)!, zero when k > n.
pub fn falling(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).fold(1.0, |acc, j| acc * j as f64)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

pub fn ln_binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn multi_factorial(alpha: &[u32]) -> f64 {
    alpha.iter().map(|&a| factorial(a)).product()
}

pub fn degree(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

/// Number of multi-indices of length `d` with `|α| = n`.
pub fn block_size(d: usize, n: u32) -> u128 {
    binomial(n as u64 + d as u64 - 1, d as u64 - 1)
}

/// All α ∈ N^d with |α| = n, in the crate's fixed order:
/// lexicographic with the first coordinate descending, so (n,0,…) comes first.
pub fn compositions(d: usize, n: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fill(&mut out, &mut cur, 0, n);
    out
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut MultiIndex, pos: usize, rem: u32) {
    let d = cur.len();
    if pos == d - 1 {
        cur[pos] = rem;
        out.push(cur.clone());
        return;
    }
    for v in (0..=rem).rev() {
        cur[pos] = v;
        fill(out, cur, pos + 1, rem - v);
    }
    cur[pos] = 0;
}

/// Multi-indices with |α| ≤ n in graded order.
pub fn graded_basis(d: usize, n_max: u32) -> Vec<MultiIndex> {
    (0..=n_max).flat_map(|n| compositions(d, n)).collect()
}

/// Position of α inside its block under the order of [`compositions`].
pub fn rank_in_block(alpha: &[u32]) -> usize {
    let d = alpha.len();
    let mut rem: u32 = alpha.iter().sum();
    let mut r: u128 = 0;
    for (j, &a) in alpha.iter().enumerate().take(d.saturating_sub(1)) {
        let parts = d - j - 1;
        // every value v > a at position j precedes α
        for v in (a + 1)..=rem {
            r += block_size(parts, rem - v);
        }
        rem -= a;
    }
    r as usize
}

pub fn componentwise_le(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn add(a: &[u32], b: &[u32]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// a - b, assuming b ≤ a componentwise.
pub fn sub(a: &[u32], b: &[u32]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn unit(d: usize, j: usize) -> MultiIndex {
    let mut e = vec![0; d];
    e[j] = 1;
    e
}

/// All μ ≤ α componentwise.
pub fn sub_indices(alpha: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
        for prefix in &out {
            for v in 0..=a {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}
