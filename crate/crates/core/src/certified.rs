//! Rigorous enclosures of `ln` and `exp` on exact rationals.
//!
//! Values are computed in binary fixed point with `PRECISION_BITS` fraction
//! bits. Every operation on the lower end rounds down and every operation on
//! the upper end rounds up, and series tails are bounded explicitly, so the
//! returned dyadic rationals always satisfy `lo <= f(x) <= hi`. Both ends are
//! nondecreasing in the input.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Fraction bits of the fixed-point representation.
pub const PRECISION_BITS: u32 = 192;

/// Series length; `3^-128` and `1/64!` are both far below `2^-192`.
const TERMS: u32 = 64;

/// Closed interval with exact rational ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn exact(x: BigRational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo = crate::stats::rational_to_f64(&self.lo);
        let hi = crate::stats::rational_to_f64(&self.hi);
        lo <= x && x <= hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

fn one_fixed() -> BigUint {
    BigUint::one() << PRECISION_BITS
}

fn from_fixed(x: BigUint) -> BigRational {
    BigRational::new(BigInt::from(x), BigInt::from(one_fixed()))
}

fn from_fixed_signed(x: BigInt) -> BigRational {
    BigRational::new(x, BigInt::from(one_fixed()))
}

fn div_ceil(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// `floor(q * 2^W)` for `q >= 0`.
fn fixed_floor(q: &BigRational) -> BigUint {
    assert!(!q.is_negative());
    let num = q.numer().magnitude() << PRECISION_BITS;
    num / q.denom().magnitude()
}

/// `ceil(q * 2^W)` for `q >= 0`.
fn fixed_ceil(q: &BigRational) -> BigUint {
    assert!(!q.is_negative());
    let num = q.numer().magnitude() << PRECISION_BITS;
    div_ceil(&num, q.denom().magnitude())
}

/// `2 * atanh(p/q)` for `0 <= p/q <= 1/3`, as fixed-point `(lo, hi)`.
fn two_atanh(p: &BigUint, q: &BigUint) -> (BigUint, BigUint) {
    debug_assert!(p * 3u32 <= *q);
    let p2 = p * p;
    let q2 = q * q;
    let mut pw_lo = (p << PRECISION_BITS) / q;
    let mut pw_hi = div_ceil(&(p << PRECISION_BITS), q);
    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    for k in 0..TERMS {
        let odd = BigUint::from(2 * k + 1);
        lo += &pw_lo / &odd;
        hi += div_ceil(&pw_hi, &odd);
        pw_lo = (&pw_lo * &p2) / &q2;
        pw_hi = div_ceil(&(&pw_hi * &p2), &q2);
    }
    // remaining terms: z^(2N+1)/(2N+1) * 1/(1 - z^2) with z^2 <= 1/9
    let denom = BigUint::from(8 * (2 * TERMS + 1));
    hi += div_ceil(&(pw_hi * 9u32), &denom) + 1u32;
    (lo << 1u32, hi << 1u32)
}

fn ln2_fixed() -> &'static (BigUint, BigUint) {
    static LN2: OnceLock<(BigUint, BigUint)> = OnceLock::new();
    // ln 2 = 2 atanh(1/3)
    LN2.get_or_init(|| two_atanh(&BigUint::one(), &BigUint::from(3u32)))
}

/// Enclosure of `ln 2`.
pub fn ln2() -> Enclosure {
    let (lo, hi) = ln2_fixed();
    Enclosure {
        lo: from_fixed(lo.clone()),
        hi: from_fixed(hi.clone()),
    }
}

/// Enclosure of `ln(num / den)` for `num >= den > 0`.
pub fn ln_ratio(num: &BigUint, den: &BigUint) -> Enclosure {
    assert!(!den.is_zero() && num >= den, "ln_ratio needs num >= den > 0");
    let mut k = num.bits() - den.bits();
    let mut scaled = den << k;
    if scaled > *num {
        k -= 1;
        scaled = den << k;
    }
    // num / scaled lies in [1, 2), so z = (num - scaled)/(num + scaled) <= 1/3
    let (slo, shi) = two_atanh(&(num - &scaled), &(num + &scaled));
    let (l2lo, l2hi) = ln2_fixed();
    Enclosure {
        lo: from_fixed(l2lo * k + slo),
        hi: from_fixed(l2hi * k + shi),
    }
}

/// Enclosure of `ln q` for a rational `q >= 1`.
pub fn ln(q: &BigRational) -> Enclosure {
    assert!(*q >= BigRational::one(), "ln needs an argument >= 1");
    ln_ratio(q.numer().magnitude(), q.denom().magnitude())
}

/// `exp` on fixed-point `x` in `[0, 1]` (as `x * 2^W`), rounded in one direction.
fn exp_unit(x: &BigUint, up: bool) -> BigUint {
    let one = one_fixed();
    let mut term = one.clone();
    let mut sum = one.clone();
    for n in 1..=TERMS {
        let num = &term * x;
        let den = &one * n;
        term = if up { div_ceil(&num, &den) } else { num / den };
        sum += &term;
    }
    if up {
        // tail sum_{n>N} x^n/n! <= term_N for x <= 1
        sum += term + 1u32;
    }
    sum
}

/// Enclosure of `exp(x)` for any rational `x`.
pub fn exp(x: &BigRational) -> Enclosure {
    if x.is_negative() {
        // exp(x) = 1 / exp(-x)
        let e = exp(&-x);
        let one = BigRational::one();
        return Enclosure {
            lo: from_fixed(fixed_floor(&(&one / &e.hi))),
            hi: from_fixed(fixed_ceil(&(&one / &e.lo))),
        };
    }
    if *x > BigRational::one() {
        let half = exp(&(x / BigRational::from_integer(BigInt::from(2))));
        return Enclosure {
            lo: from_fixed(fixed_floor(&(&half.lo * &half.lo))),
            hi: from_fixed(fixed_ceil(&(&half.hi * &half.hi))),
        };
    }
    let lo = exp_unit(&fixed_floor(x), false);
    let hi = exp_unit(&fixed_ceil(x), true);
    Enclosure {
        lo: from_fixed(lo),
        hi: from_fixed(hi),
    }
}

/// Rounds `q` down to a multiple of `2^-W`.
pub fn round_down(q: &BigRational) -> BigRational {
    let scaled = q * BigRational::from_integer(BigInt::from(one_fixed()));
    from_fixed_signed(scaled.floor().to_integer())
}

/// Rounds `q` up to a multiple of `2^-W`.
pub fn round_up(q: &BigRational) -> BigRational {
    let scaled = q * BigRational::from_integer(BigInt::from(one_fixed()));
    from_fixed_signed(scaled.ceil().to_integer())
}

fn decimal(q: &BigRational, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * BigRational::from_integer(scale);
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let negative = n.sign() == Sign::Minus;
    let mag = n.magnitude().to_string();
    let width = digits as usize + 1;
    let padded = if mag.len() < width {
        format!("{}{}", "0".repeat(width - mag.len()), mag)
    } else {
        mag
    };
    let (int_part, frac) = padded.split_at(padded.len() - digits as usize);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Largest decimal with `digits` fraction digits that is `<= q`.
pub fn decimal_floor(q: &BigRational, digits: u32) -> String {
    decimal(q, digits, false)
}

/// Smallest decimal with `digits` fraction digits that is `>= q`.
pub fn decimal_ceil(q: &BigRational, digits: u32) -> String {
    decimal(q, digits, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn f(x: &BigRational) -> f64 {
        crate::stats::rational_to_f64(x)
    }

    #[test]
    fn ln2_is_tight() {
        let e = ln2();
        assert!(e.lo < e.hi);
        assert!(e.contains(std::f64::consts::LN_2));
        assert!(f(&e.width()) < 1e-50);
    }

    #[test]
    fn ln_values() {
        for (n, d) in [(1u32, 1u32), (3, 2), (7, 4), (2, 1), (1000, 7), (5, 3)] {
            let e = ln_ratio(&BigUint::from(n), &BigUint::from(d));
            let x = (n as f64 / d as f64).ln();
            assert!(f(&e.lo) <= x + 1e-15 && x - 1e-15 <= f(&e.hi), "{n}/{d}");
            assert!(f(&e.width()) < 1e-50);
        }
        let zero = ln_ratio(&BigUint::one(), &BigUint::one());
        assert!(zero.lo.is_zero());
    }

    #[test]
    fn exp_values() {
        for x in [q(0, 1), q(1, 2), q(1, 1), q(3, 2), q(-1, 3), q(7, 2)] {
            let e = exp(&x);
            let v = f(&x).exp();
            assert!(f(&e.lo) <= v * (1.0 + 1e-14) && v * (1.0 - 1e-14) <= f(&e.hi));
            assert!(e.lo <= e.hi);
        }
        let e = exp(&q(0, 1));
        assert!(e.lo == BigRational::one());
    }

    #[test]
    fn exp_ln_round_trip() {
        let l = ln_ratio(&BigUint::from(3u32), &BigUint::from(2u32));
        let lo = exp(&l.lo).lo;
        let hi = exp(&l.hi).hi;
        assert!(lo <= q(3, 2) && q(3, 2) <= hi);
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal_floor(&q(1, 3), 4), "0.3333");
        assert_eq!(decimal_ceil(&q(1, 3), 4), "0.3334");
        assert_eq!(decimal_floor(&q(-1, 3), 2), "-0.34");
        assert_eq!(decimal_ceil(&q(-1, 3), 2), "-0.33");
        assert_eq!(decimal_floor(&q(2, 1), 3), "2.000");
        assert_eq!(decimal_ceil(&q(1, 2), 0), "1");
    }

    #[test]
    fn rounding_is_directed() {
        let x = q(1, 3);
        assert!(round_down(&x) <= x && x <= round_up(&x));
        let y = q(-5, 7);
        assert!(round_down(&y) <= y && y <= round_up(&y));
    }
}
