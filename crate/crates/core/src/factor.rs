//! Just enough integer factoring to compute minimal scale factors.
//!
//! Numbers are split into pairwise coprime "atoms". Small primes come off by
//! trial division, probable primes are accepted via Miller-Rabin, and the rest
//! are attacked with Brent's variant of Pollard rho under a fixed iteration
//! budget. An atom that survives the budget is a composite with only large
//! prime factors; callers treat it as squarefree.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const TRIAL_LIMIT: u32 = 1 << 16;
const RHO_BUDGET: u64 = 1 << 17;
const MR_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Factors `n > 1` into pairwise coprime atoms with multiplicities, sorted by atom.
pub(crate) fn factor_atoms(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n <= BigInt::one() {
        return out;
    }
    let mut d = 2u32;
    while d < TRIAL_LIMIT {
        let db = BigInt::from(d);
        if &db * &db > n {
            break;
        }
        let mut k = 0;
        while (&n % d).is_zero() {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((db, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let mut pieces = Vec::new();
        split(&n, &mut pieces);
        for (atom, k) in coprime_base_with_multiplicity(&n, &pieces) {
            out.push((atom, k));
        }
    }
    out.sort();
    out
}

fn split(n: &BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(n) {
        out.push(n.clone());
        return;
    }
    if let Some((root, _)) = perfect_power(n) {
        split(&root, out);
        return;
    }
    match pollard_brent(n) {
        Some(f) => {
            split(&f, out);
            split(&(n / &f), out);
        }
        None => out.push(n.clone()),
    }
}

/// Refines `pieces` into a pairwise coprime set and writes `n` over it.
fn coprime_base_with_multiplicity(n: &BigInt, pieces: &[BigInt]) -> Vec<(BigInt, u32)> {
    let base = coprime_base(pieces.iter().cloned());
    let mut rest = n.clone();
    let mut out = Vec::new();
    for b in base {
        let mut k = 0;
        loop {
            let (q, r) = rest.div_rem(&b);
            if !r.is_zero() {
                break;
            }
            rest = q;
            k += 1;
        }
        if k > 0 {
            out.push((b, k));
        }
    }
    debug_assert!(rest.is_one());
    out
}

/// Pairwise coprime set whose products generate every input.
pub(crate) fn coprime_base(items: impl IntoIterator<Item = BigInt>) -> Vec<BigInt> {
    let mut set: Vec<BigInt> = items.into_iter().map(|x| x.abs()).filter(|x| *x > BigInt::one()).collect();
    set.sort();
    set.dedup();
    'outer: loop {
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                let g = set[i].gcd(&set[j]);
                if !g.is_one() {
                    let x = set.swap_remove(j);
                    let y = set.swap_remove(i);
                    for z in [&x / &g, &y / &g, g] {
                        if z > BigInt::one() {
                            set.push(z);
                        }
                    }
                    set.sort();
                    set.dedup();
                    continue 'outer;
                }
            }
        }
        return set;
    }
}

/// `Some((r, k))` with `n = r^k` for the smallest exponent `k >= 2` that works.
fn perfect_power(n: &BigInt) -> Option<(BigInt, u32)> {
    let bits = n.bits() as u32;
    let mut k = 2;
    while k <= bits {
        let r = n.nth_root(k);
        if num_traits::pow(r.clone(), k as usize) == *n {
            return Some((r, k));
        }
        k += 1;
    }
    None
}

pub(crate) fn is_probable_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return *n == BigInt::from(p);
        }
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let one = BigInt::one();
    for c in 1u32..=3 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut steps = 0u64;
        let batch = 64u64;
        while g.is_one() && steps < RHO_BUDGET / 3 {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..batch.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += batch;
                steps += batch;
            }
            r *= 2;
        }
        if g == *n {
            // Batch overshot; replay one step at a time.
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Smallest `r` with `d | r^k`, given the atoms of `d`.
#[cfg(test)]
pub(crate) fn ceil_root_divisor(d: &BigInt, k: u32) -> BigInt {
    factor_atoms(d).into_iter().map(|(p, e)| num_traits::pow(p, e.div_ceil(k) as usize)).product()
}
