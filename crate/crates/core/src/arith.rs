//! Small number-theory helpers: primes, smoothness, smooth-number enumeration.

/// Primes `p <= n`, by a plain sieve.
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
    }
    primes
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Largest prime factor, with `P+(1) = 1`.
pub fn largest_prime_factor(mut n: u64) -> u64 {
    assert!(n >= 1);
    let mut largest = 1;
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            largest = p;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        largest = n;
    }
    largest
}

/// `true` iff every prime factor of `n` is at most `bound`.
pub fn is_smooth(mut n: u64, bound: u64) -> bool {
    assert!(n >= 1);
    if n == 1 {
        return true;
    }
    let mut p = 2;
    while p <= bound && p * p <= n {
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    // whatever is left is 1, a prime, or has all prime factors > p
    n == 1 || n <= bound
}

/// All `bound`-smooth integers in `[lo, hi]`, ascending.
///
/// Generated multiplicatively from the primes up to `bound`, so the cost is
/// proportional to the number of smooth integers up to `hi`, not to `hi`.
pub fn smooth_in_range(lo: u64, hi: u64, bound: u64) -> Vec<u64> {
    if lo > hi || hi == 0 {
        return Vec::new();
    }
    let primes = primes_upto(bound);
    let mut out = Vec::new();
    fn walk(x: u64, from: usize, primes: &[u64], lo: u64, hi: u64, out: &mut Vec<u64>) {
        if x >= lo {
            out.push(x);
        }
        for (k, &p) in primes.iter().enumerate().skip(from) {
            match x.checked_mul(p) {
                Some(y) if y <= hi => walk(y, k, primes, lo, hi, out),
                _ => break,
            }
        }
    }
    walk(1, 0, &primes, lo, hi, &mut out);
    out.sort_unstable();
    out
}

/// `prod_{p <= i} (p - 1) / p` as an exact (numerator, denominator) pair.
pub fn rough_density(i: u64) -> (u128, u128) {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for p in primes_upto(i) {
        num *= (p - 1) as u128;
        den *= p as u128;
    }
    let g = gcd_u128(num, den);
    (num / g, den / g)
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `floor(x^(1/k))` for `k >= 1`.
pub fn iroot(x: u64, k: u32) -> u64 {
    if k == 1 || x <= 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    let pow = |b: u64| (b as u128).checked_pow(k).unwrap_or(u128::MAX);
    while pow(r) > x as u128 {
        r -= 1;
    }
    while pow(r + 1) <= x as u128 {
        r += 1;
    }
    r
}
