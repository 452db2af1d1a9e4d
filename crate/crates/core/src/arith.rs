//! Integer sieves: primes, Möbius values and smallest-prime-factor tables.

use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// All primes up to `limit`, in increasing order (sieve of Eratosthenes).
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        PrimeSieve { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// `mu(r)` for `1 <= r <= limit`, from a linear sieve.
#[derive(Debug, Clone)]
pub struct MoebiusTable {
    limit: u64,
    // index 0 unused
    values: Vec<i8>,
}

impl MoebiusTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut values = vec![1i8; n + 1];
        let mut composite = vec![false; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        if n >= 1 {
            values[0] = 0;
        }
        for i in 2..=n {
            if !composite[i] {
                primes.push(i);
                values[i] = -1;
            }
            for &p in &primes {
                let m = i * p;
                if m > n {
                    break;
                }
                composite[m] = true;
                if i % p == 0 {
                    values[m] = 0;
                    break;
                }
                values[m] = -values[i];
            }
        }
        MoebiusTable { limit, values }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `mu(r)`; `None` outside `1..=limit`.
    pub fn get(&self, r: u64) -> Option<i8> {
        if r == 0 || r > self.limit {
            return None;
        }
        Some(self.values[r as usize])
    }

    /// Values for `r = 1..=limit`.
    pub fn values(&self) -> &[i8] {
        &self.values[1..]
    }
}

/// The Möbius function by trial division.
pub fn moebius(r: u64) -> Result<i8> {
    if r == 0 {
        return Err(Error::domain("moebius", r, "r >= 1"));
    }
    let mut n = r;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Shared, growable table of smallest prime factors. Entry `n` holds the
/// least prime dividing `n` (entries 0 and 1 hold 0 and 1).
pub(crate) fn smallest_prime_factors(limit: usize) -> Arc<Vec<u32>> {
    static TABLE: OnceLock<RwLock<Arc<Vec<u32>>>> = OnceLock::new();
    let lock = TABLE.get_or_init(|| RwLock::new(Arc::new(Vec::new())));
    {
        let current = lock.read().expect("spf table poisoned");
        if current.len() > limit {
            return Arc::clone(&current);
        }
    }
    let mut guard = lock.write().expect("spf table poisoned");
    if guard.len() > limit {
        return Arc::clone(&guard);
    }
    let target = (limit + 1).max(guard.len() * 2).max(1024);
    *guard = Arc::new(build_spf(target));
    Arc::clone(&guard)
}

fn build_spf(len: usize) -> Vec<u32> {
    let mut spf = vec![0u32; len];
    if len > 1 {
        spf[1] = 1;
    }
    for i in 2..len {
        if spf[i] != 0 {
            continue;
        }
        spf[i] = i as u32;
        let mut j = i.saturating_mul(i);
        while j < len {
            if spf[j] == 0 {
                spf[j] = i as u32;
            }
            j += i;
        }
    }
    spf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(moebius(4).unwrap(), 0);
        assert_eq!(moebius(6).unwrap(), 1);
        assert_eq!(moebius(30).unwrap(), -1);
        assert!(moebius(0).is_err());
    }

    #[test]
    fn table_matches_trial_division() {
        let table = MoebiusTable::new(5000);
        for r in 1..=5000 {
            assert_eq!(table.get(r), Some(moebius(r).unwrap()), "r = {r}");
        }
        assert_eq!(table.get(0), None);
        assert_eq!(table.get(5001), None);
    }

    #[test]
    fn moebius_is_multiplicative_on_coprimes() {
        let table = MoebiusTable::new(10_000);
        for a in 1..100u64 {
            for b in 1..100u64 {
                if gcd(a, b) == 1 {
                    let lhs = table.get(a * b).unwrap();
                    assert_eq!(lhs, table.get(a).unwrap() * table.get(b).unwrap());
                }
            }
        }
    }

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let sieve = PrimeSieve::new(10_000);
        let brute: Vec<u64> = (2..=10_000u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(sieve.primes(), brute.as_slice());
        assert_eq!(PrimeSieve::new(100).len(), 25);
        assert_eq!(PrimeSieve::new(1_000_000).len(), 78_498);
        assert!(PrimeSieve::new(1).is_empty());
    }

    #[test]
    fn spf_table() {
        let spf = smallest_prime_factors(1000);
        assert!(spf.len() > 1000);
        assert_eq!(spf[2], 2);
        assert_eq!(spf[91], 7);
        assert_eq!(spf[997], 997);
        assert_eq!(spf[1000], 2);
    }
}
