//! Closed-form bounds and exact formulas for `w(k;r)`, `SP_m(k)`, and
//! `Q_n(k)`.
//!
//! Every evaluator checks its hypotheses first and reports the failed clause
//! as [`Error::NotApplicable`]. Exact formulas are evaluated with
//! arbitrary-precision integers. Results that keep only a leading term and
//! drop a `(1 + o(1))` factor carry `asymptotic = true`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{invalid, Error, Result};

/// Relative precision attached to floating results computed in `f64`.
pub const F64_REL_PRECISION: f64 = 1e-14;

/// Evaluating a [`TowerExpr`] is refused beyond this many decimal digits.
pub const TOWER_DIGIT_BUDGET: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Upper,
    Exact,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
            Direction::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundNumber {
    Integer(BigInt),
    Rational(BigRational),
    /// A floating approximation with its relative precision.
    Float {
        value: f64,
        rel_precision: f64,
    },
    Tower(TowerExpr),
}

impl BoundNumber {
    fn float(value: f64) -> Self {
        BoundNumber::Float {
            value,
            rel_precision: F64_REL_PRECISION,
        }
    }

    /// Nearest `f64`, or `None` for towers.
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            BoundNumber::Integer(v) => v.to_f64(),
            BoundNumber::Rational(v) => v.to_f64(),
            BoundNumber::Float { value, .. } => Some(*value),
            BoundNumber::Tower(_) => None,
        }
    }
}

impl fmt::Display for BoundNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundNumber::Integer(v) => write!(f, "{v}"),
            BoundNumber::Rational(v) => write!(f, "{v}"),
            BoundNumber::Float { value, .. } => write!(f, "{value}"),
            BoundNumber::Tower(t) => write!(f, "{t}"),
        }
    }
}

/// A bound together with its direction and the hypotheses that were checked.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundValue {
    pub value: BoundNumber,
    pub direction: Direction,
    /// A `(1 + o(1))` factor was dropped.
    pub asymptotic: bool,
    /// The hypotheses verified before evaluating, in words.
    pub conditions: Vec<String>,
}

impl BoundValue {
    fn new(value: BoundNumber, direction: Direction, asymptotic: bool, conditions: &[&str]) -> Self {
        BoundValue {
            value,
            direction,
            asymptotic,
            conditions: conditions.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.value.to_f64()
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match &self.value {
            BoundNumber::Integer(v) => Some(v),
            _ => None,
        }
    }
}

fn require(cond: bool, clause: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::NotApplicable(format!("requires {clause}")))
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// `w(p+1; q) >= p(q^p - 1) + 1` for primes `p >= 5` and `q`.
pub fn vdw_lower_primes(p: u64, q: u64) -> Result<BoundValue> {
    require(p >= 5, "p >= 5")?;
    require(is_prime(p), "p prime")?;
    require(is_prime(q), "q prime")?;
    let exp = u32::try_from(p).map_err(|_| invalid("p too large"))?;
    let value = BigInt::from(p) * (BigInt::from(q).pow(exp) - 1) + 1;
    Ok(BoundValue::new(
        BoundNumber::Integer(value),
        Direction::Lower,
        false,
        &["p >= 5", "p prime", "q prime"],
    ))
}

/// Leading term `r^k / (e k r)` of the general lower bound on `w(k;r)`.
pub fn vdw_lower_general(k: u32, r: u32) -> Result<BoundValue> {
    require(k >= 2, "k >= 2")?;
    require(r >= 2, "r >= 2")?;
    let (kf, rf) = (f64::from(k), f64::from(r));
    let value = libm::pow(rf, kf) / (core::f64::consts::E * kf * rf);
    Ok(BoundValue::new(
        BoundNumber::float(value),
        Direction::Lower,
        true,
        &["k >= 2", "r >= 2"],
    ))
}

/// The probabilistic-method bound `w(k;2) >= (2^k k / 2)^(1/2)`.
pub fn vdw_lower_probabilistic(k: u32) -> Result<BoundValue> {
    require(k >= 2, "k >= 2")?;
    let kf = f64::from(k);
    let value = libm::sqrt(libm::pow(2.0, kf) * kf / 2.0);
    Ok(BoundValue::new(BoundNumber::float(value), Direction::Lower, false, &["k >= 2"]))
}

/// Gowers' upper bound `w(k;r) <= 2^(2^(r^(2^(2^(k+9)))))`, kept symbolic.
pub fn gowers_upper(k: u64, r: u64) -> Result<TowerExpr> {
    require(k >= 2, "k >= 2")?;
    require(r >= 2, "r >= 2")?;
    TowerExpr::new(alloc::vec![2, 2, r, 2, 2, k + 9])
}

/// The same bound wrapped as a [`BoundValue`].
pub fn gowers_upper_bound(k: u64, r: u64) -> Result<BoundValue> {
    let tower = gowers_upper(k, r)?;
    Ok(BoundValue::new(
        BoundNumber::Tower(tower),
        Direction::Upper,
        false,
        &["k >= 2", "r >= 2"],
    ))
}

/// `SP_m(k) <= 2c(k-1) + 1` with `c = ceil(m / (2m - k))`, for `m >= 2` and
/// `m < k < 2m`.
pub fn sp_upper(m: u64, k: u64) -> Result<BoundValue> {
    require(m >= 2, "m >= 2")?;
    require(m < k, "m < k")?;
    require(k < 2 * m, "k < 2m")?;
    let c = m.div_ceil(2 * m - k);
    let value = BigInt::from(2u32) * BigInt::from(c) * BigInt::from(k - 1) + 1;
    Ok(BoundValue::new(
        BoundNumber::Integer(value),
        Direction::Upper,
        false,
        &["m >= 2", "m < k < 2m"],
    ))
}

/// `λ(k, m) = ceil((k-1) / ceil(k/m))`.
pub fn sp_lambda(m: u64, k: u64) -> u64 {
    (k - 1).div_ceil(k.div_ceil(m))
}

/// The constructive bound `SP_m(k) >= 2(k-1)(ceil(k/λ) - 1) + 1`.
pub fn sp_lower_constructive(m: u64, k: u64) -> Result<BoundValue> {
    require(k >= 2, "k >= 2")?;
    require(m >= 1, "m >= 1")?;
    let lambda = sp_lambda(m, k);
    let value = BigInt::from(2u32) * BigInt::from(k - 1) * BigInt::from(k.div_ceil(lambda) - 1) + 1;
    Ok(BoundValue::new(
        BoundNumber::Integer(value),
        Direction::Lower,
        false,
        &["k >= 2", "m >= 1"],
    ))
}

/// The probabilistic bound
/// `SP_m(k) >= sqrt((2^m - 1)k / 2^m) · (2^m / (2^m - 1))^(k/2)`.
pub fn sp_lower_probabilistic(m: u32, k: u32) -> Result<BoundValue> {
    require(m >= 1, "m >= 1")?;
    require(k >= 2, "k >= 2")?;
    require(m <= 1000, "m <= 1000")?;
    let two_m = libm::pow(2.0, f64::from(m));
    let ratio = two_m / (two_m - 1.0);
    let value = libm::sqrt(f64::from(k) / ratio) * libm::pow(ratio, f64::from(k) / 2.0);
    Ok(BoundValue::new(
        BoundNumber::float(value),
        Direction::Lower,
        false,
        &["m >= 1", "k >= 2"],
    ))
}

/// The scope-2 form `sqrt(3k/4) · (4/3)^(k/2)`.
pub fn sp2_lower_probabilistic(k: u32) -> f64 {
    let kf = f64::from(k);
    libm::sqrt(3.0 * kf / 4.0) * libm::pow(4.0 / 3.0, kf / 2.0)
}

/// Base `sqrt(2^m / (2^m - 1))` of the exponential in the scope-`m` bound.
pub fn sp_probabilistic_base(m: u32) -> f64 {
    let two_m = libm::pow(2.0, f64::from(m));
    libm::sqrt(two_m / (two_m - 1.0))
}

/// An exact value `Q_{k-i}(k)` from the large-diameter formula.
#[derive(Clone, Debug, PartialEq)]
pub struct QExact {
    pub k: u64,
    pub diameter: u64,
    pub value: BoundValue,
}

/// `Q_{k-i}(k) = 2ik - 4i + 2r - 1` where `k = m·i + r`, `3 <= r < i/2`,
/// and `r - 1 <= m`.
pub fn q_exact(i: u64, m: u64, r: u64) -> Result<QExact> {
    require(r >= 3, "3 <= r")?;
    require(2 * r < i, "r < i/2")?;
    require(r - 1 <= m, "r - 1 <= m")?;
    let k = m * i + r;
    let value = BigInt::from(2u32) * BigInt::from(i) * BigInt::from(k) - BigInt::from(4 * i) + BigInt::from(2 * r) - 1;
    Ok(QExact {
        k,
        diameter: k - i,
        value: BoundValue::new(
            BoundNumber::Integer(value),
            Direction::Exact,
            false,
            &["k = m·i + r", "3 <= r < i/2", "r - 1 <= m"],
        ),
    })
}

/// Coefficients of the degree-24 polynomial in `y` after substituting
/// `z = y^4`, highest degree first.
pub const BETA_POLY_Z: [f64; 7] = [1.0, 8.0, -112.0, -128.0, 1792.0, 1024.0, -4096.0];

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// `y^24 + 8y^20 - 112y^16 - 128y^12 + 1792y^8 + 1024y^4 - 4096`.
pub fn beta_poly(y: f64) -> f64 {
    let z = y * y * y * y;
    horner(&BETA_POLY_Z, z)
}

/// The root `β` of the degree-24 polynomial behind `Q_1(k) > β^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaRoot {
    pub beta: f64,
    /// `β^4`.
    pub z: f64,
    /// `|poly(β)|` for the degree-24 polynomial.
    pub residual: f64,
    /// Every sign change of the degree-6 polynomial found on `(0, 64]`,
    /// refined to roots in `z`, ascending.
    pub positive_roots_z: Vec<f64>,
}

/// Scan step for the bracket search in `z`.
pub const BETA_SCAN_STEP: f64 = 1e-3;

/// Smallest positive real root of the degree-24 polynomial, via `z = y^4`, a
/// sign-change scan of `z` over `(0, 64]`, and bisection until the bracket
/// in `y` is narrower than `tol`.
pub fn q1_vijay_beta(tol: f64) -> Result<BetaRoot> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid("tol must be positive"));
    }
    let p = |z: f64| horner(&BETA_POLY_Z, z);
    let steps = (64.0 / BETA_SCAN_STEP) as usize;
    let mut roots = Vec::new();
    let mut lo = 0.0f64;
    let mut plo = p(lo);
    for s in 1..=steps {
        let hi = s as f64 * BETA_SCAN_STEP;
        let phi = p(hi);
        if phi == 0.0 {
            roots.push(hi);
        } else if plo != 0.0 && (plo < 0.0) != (phi < 0.0) {
            roots.push(bisect_z(&p, lo, hi, tol));
        }
        lo = hi;
        plo = phi;
    }
    let z = *roots.first().ok_or_else(|| Error::Numeric("no bracket found on (0, 64]".into()))?;
    let beta = libm::sqrt(libm::sqrt(z));
    Ok(BetaRoot {
        beta,
        z,
        residual: libm::fabs(beta_poly(beta)),
        positive_roots_z: roots,
    })
}

fn bisect_z(p: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let neg_lo = p(lo) < 0.0;
    let y = |z: f64| libm::sqrt(libm::sqrt(z));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if y(hi) - y(lo) < tol || mid <= lo || mid >= hi {
            break;
        }
        let pm = p(mid);
        if pm == 0.0 {
            return mid;
        }
        if (pm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The base of the exponential bound on `Q_1(k)`: `b = 1 + 1/√2` is the
/// dominant eigenvalue of the transfer matrix and `g = sqrt(2/b)`. The
/// accompanying constant is only known to exist and is not returned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Q1Base {
    pub b: f64,
    pub g: f64,
}

pub fn q1_new_base() -> Q1Base {
    let b = 1.0 + core::f64::consts::FRAC_1_SQRT_2;
    Q1Base { b, g: libm::sqrt(2.0 / b) }
}

/// Landman's bound `Q_{ceil(2k/3)}(k) <= (43/324) k^3 (1 + o(1))`, leading term.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmanBound {
    pub diameter: u64,
    pub value: BoundValue,
}

pub fn q_landman_coeff(k: u64) -> Result<LandmanBound> {
    require(k >= 2, "k >= 2")?;
    let k3 = BigInt::from(k).pow(3);
    let value = BigRational::new(BigInt::from(43u32) * k3, BigInt::from(324u32));
    Ok(LandmanBound {
        diameter: (2 * k).div_ceil(3),
        value: BoundValue::new(BoundNumber::Rational(value), Direction::Upper, true, &["k >= 2"]),
    })
}

/// A right-nested power tower `b_1^(b_2^(...^b_h))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerExpr {
    levels: Vec<u64>,
}

/// Size of a huge number `x` as `exp2^[height](mantissa)`, i.e. `mantissa`
/// with `x ↦ 2^x` applied `height` times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IteratedSize {
    pub height: u32,
    pub mantissa: f64,
}

impl IteratedSize {
    /// `log2` of the represented number.
    pub fn log2(self) -> IteratedSize {
        if self.height > 0 {
            IteratedSize {
                height: self.height - 1,
                mantissa: self.mantissa,
            }
        } else {
            IteratedSize {
                height: 0,
                mantissa: libm::log2(self.mantissa),
            }
        }
    }

    /// The value as an `f64` when it fits.
    pub fn to_f64(self) -> Option<f64> {
        let mut x = self.mantissa;
        for _ in 0..self.height {
            if x >= 1024.0 {
                return None;
            }
            x = libm::exp2(x);
        }
        Some(x)
    }
}

impl fmt::Display for IteratedSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.height == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "exp2^[{}]({})", self.height, self.mantissa)
        }
    }
}

impl TowerExpr {
    pub fn new(levels: Vec<u64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("a tower needs at least one level"));
        }
        if levels.iter().any(|&b| b < 2) {
            return Err(invalid("tower levels must be at least 2"));
        }
        Ok(TowerExpr { levels })
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    /// The topmost exponent.
    pub fn top(&self) -> u64 {
        self.levels[self.levels.len() - 1]
    }

    /// Approximate size, evaluated from the top down. Multiplicative factors
    /// are kept while the height is at most 1 and dropped above that, where
    /// they no longer affect the displayed mantissa.
    pub fn size(&self) -> IteratedSize {
        let mut size = IteratedSize {
            height: 0,
            mantissa: self.top() as f64,
        };
        for &base in self.levels.iter().rev().skip(1) {
            let lb = libm::log2(base as f64);
            // base^y = 2^(y · log2 base)
            let exponent = match size.height {
                0 => IteratedSize {
                    height: 0,
                    mantissa: size.mantissa * lb,
                },
                1 => IteratedSize {
                    height: 1,
                    mantissa: size.mantissa + libm::log2(lb),
                },
                _ => size,
            };
            size = if exponent.height == 0 && exponent.mantissa < 1024.0 {
                IteratedSize {
                    height: 0,
                    mantissa: libm::exp2(exponent.mantissa),
                }
            } else {
                IteratedSize {
                    height: exponent.height + 1,
                    mantissa: exponent.mantissa,
                }
            };
        }
        size
    }

    /// `log2` applied `times` times to the tower's value.
    pub fn iterated_log2(&self, times: u32) -> IteratedSize {
        (0..times).fold(self.size(), |s, _| s.log2())
    }

    /// Approximate number of decimal digits, `None` if it overflows `f64`.
    pub fn decimal_digits(&self) -> Option<f64> {
        let log2 = self.size().log2().to_f64()?;
        Some(log2 * core::f64::consts::LOG10_2 + 1.0)
    }

    /// Exact value, refused when it would exceed `max_digits` decimal digits.
    pub fn evaluate(&self, max_digits: f64) -> Result<BigUint> {
        match self.decimal_digits() {
            Some(d) if d <= max_digits => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    what: "tower evaluation (decimal digits)",
                    limit: max_digits as u64,
                    requested: self.decimal_digits().map_or(u64::MAX, |d| d as u64),
                })
            }
        }
        let mut acc = BigUint::from(self.top());
        for &base in self.levels.iter().rev().skip(1) {
            let exp = acc.to_u32().ok_or_else(|| invalid("exponent overflow"))?;
            acc = BigUint::from(base).pow(exp);
        }
        Ok(acc)
    }
}

impl fmt::Display for TowerExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.levels.len();
        for (i, b) in self.levels.iter().enumerate() {
            if i + 2 < n {
                write!(f, "{b}^(")?;
            } else if i + 2 == n {
                write!(f, "{b}^")?;
            } else {
                write!(f, "{b}")?;
            }
        }
        for _ in 2..n {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// The exact integer held by an exact-integer bound, for tests and callers
/// that need it as `u64`.
pub fn exact_u64(b: &BoundValue) -> Option<u64> {
    b.as_integer().and_then(|v| v.to_u64())
}

/// Helper for rational display in reports: `num/den` reduced.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(b: BoundValue) -> u64 {
        exact_u64(&b).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        libm::fabs(a - b) <= tol
    }

    #[test]
    fn prime_lower_bound() {
        assert_eq!(int(vdw_lower_primes(5, 2).unwrap()), 156);
        assert_eq!(int(vdw_lower_primes(5, 3).unwrap()), 1211);
        assert_eq!(int(vdw_lower_primes(7, 2).unwrap()), 890);
        assert!(matches!(vdw_lower_primes(3, 2), Err(Error::NotApplicable(m)) if m.contains("p >= 5")));
        assert!(matches!(vdw_lower_primes(9, 2), Err(Error::NotApplicable(m)) if m.contains("p prime")));
        assert!(matches!(vdw_lower_primes(5, 4), Err(Error::NotApplicable(m)) if m.contains("q prime")));
    }

    #[test]
    fn general_and_probabilistic_vdw() {
        let e = core::f64::consts::E;
        let b = vdw_lower_general(3, 2).unwrap();
        assert!(b.asymptotic);
        assert!(close(b.to_f64().unwrap(), 8.0 / (6.0 * e), 1e-12));
        assert!(close(
            vdw_lower_general(10, 2).unwrap().to_f64().unwrap(),
            1024.0 / (20.0 * e),
            1e-10
        ));
        assert!(close(vdw_lower_general(2, 2).unwrap().to_f64().unwrap(), 1.0 / e, 1e-12));
        assert!(close(
            vdw_lower_probabilistic(3).unwrap().to_f64().unwrap(),
            libm::sqrt(12.0),
            1e-12
        ));
        assert!(close(vdw_lower_probabilistic(2).unwrap().to_f64().unwrap(), 2.0, 1e-12));
        assert!(close(
            vdw_lower_probabilistic(10).unwrap().to_f64().unwrap(),
            libm::sqrt(5120.0),
            1e-12
        ));
        assert!(vdw_lower_probabilistic(1).is_err());
    }

    #[test]
    fn gowers_tower() {
        let t = gowers_upper(2, 2).unwrap();
        assert_eq!(alloc::format!("{t}"), "2^(2^(2^(2^(2^11))))");
        assert_eq!(gowers_upper(3, 2).unwrap().top(), 12);
        assert_eq!(gowers_upper(3, 5).unwrap().levels(), &[2, 2, 5, 2, 2, 12]);
        assert!(matches!(t.evaluate(TOWER_DIGIT_BUDGET), Err(Error::BudgetExceeded { .. })));
        // log2 peels one level of 2 at a time.
        let s = t.iterated_log2(4);
        assert_eq!(s.height, 0);
        assert!(close(s.mantissa, 2048.0, 1e-9));
    }

    #[test]
    fn small_towers_evaluate() {
        let t = TowerExpr::new(alloc::vec![2, 3]).unwrap();
        assert_eq!(t.evaluate(10.0).unwrap(), BigUint::from(8u32));
        let t = TowerExpr::new(alloc::vec![3, 2, 2]).unwrap();
        assert_eq!(t.evaluate(10.0).unwrap(), BigUint::from(81u32));
        let t = TowerExpr::new(alloc::vec![2, 2, 2, 2, 2]).unwrap();
        // 2^65536 has 19729 digits.
        assert!(close(t.decimal_digits().unwrap(), 19729.0, 1.0));
        assert_eq!(t.evaluate(TOWER_DIGIT_BUDGET).unwrap().bits(), 65537);
        assert!(t.evaluate(1000.0).is_err());
    }

    #[test]
    fn semi_progression_bounds() {
        assert_eq!(int(sp_upper(2, 3).unwrap()), 9);
        assert_eq!(int(sp_upper(3, 4).unwrap()), 13);
        assert_eq!(int(sp_upper(3, 5).unwrap()), 25);
        assert!(sp_upper(3, 6).is_err());
        assert!(sp_upper(3, 3).is_err());
        assert!(sp_upper(1, 1).is_err());

        assert_eq!(sp_lambda(2, 5), 2);
        assert_eq!(int(sp_lower_constructive(2, 5).unwrap()), 17);
        assert_eq!(int(sp_lower_constructive(1, 3).unwrap()), 9);
        assert_eq!(int(sp_lower_constructive(3, 4).unwrap()), 7);

        let v = sp_lower_probabilistic(2, 4).unwrap().to_f64().unwrap();
        assert!(close(v, libm::sqrt(3.0) * 16.0 / 9.0, 1e-12));
        for k in 2..=30 {
            let general = sp_lower_probabilistic(2, k).unwrap().to_f64().unwrap();
            assert!(libm::fabs(general - sp2_lower_probabilistic(k)) <= 1e-12 * general);
        }
        let m1 = sp_lower_probabilistic(1, 3).unwrap().to_f64().unwrap();
        assert!(close(m1, vdw_lower_probabilistic(3).unwrap().to_f64().unwrap(), 1e-12));
    }

    #[test]
    fn probabilistic_base_decreases_to_one() {
        let bases: Vec<f64> = (1..=40).map(sp_probabilistic_base).collect();
        assert!(bases.windows(2).all(|w| w[1] < w[0] || w[1] == 1.0));
        assert!(bases.iter().all(|&b| b >= 1.0));
        assert!(bases[39] - 1.0 < 1e-11);
    }

    #[test]
    fn quasi_exact_values() {
        let q = q_exact(7, 2, 3).unwrap();
        assert_eq!((q.k, q.diameter, int(q.value)), (17, 10, 215));
        let q = q_exact(8, 2, 3).unwrap();
        assert_eq!((q.k, q.diameter, int(q.value)), (19, 11, 277));
        assert!(matches!(q_exact(7, 1, 3), Err(Error::NotApplicable(m)) if m.contains("r - 1 <= m")));
        assert!(matches!(q_exact(6, 2, 3), Err(Error::NotApplicable(m)) if m.contains("r < i/2")));
        assert!(matches!(q_exact(9, 2, 2), Err(Error::NotApplicable(m)) if m.contains("3 <= r")));
    }

    #[test]
    fn beta_root() {
        let r = q1_vijay_beta(1e-6).unwrap();
        assert!(close(r.beta, 1.08226, 1e-4));
        let fine = q1_vijay_beta(1e-12).unwrap();
        assert!(fine.residual < 1e-6, "residual {}", fine.residual);
        let r10 = q1_vijay_beta(1e-10).unwrap();
        assert!(close(r10.beta, r.beta, 1e-6));
        // Smallest sign change is the reported root; two more positive roots in z.
        assert_eq!(fine.positive_roots_z.len(), 3);
        assert!(close(fine.positive_roots_z[0], fine.z, 0.0));
        assert!(q1_vijay_beta(0.0).is_err());
    }

    #[test]
    fn new_base_and_landman() {
        let Q1Base { b, g } = q1_new_base();
        assert!(close(b, 1.7071068, 1e-7));
        assert!(close(g, 1.08239, 1e-4));
        let beta = q1_vijay_beta(1e-12).unwrap().beta;
        assert!(1.0 < beta && beta < g && g < libm::sqrt(2.0));

        let l = q_landman_coeff(9).unwrap();
        assert_eq!(l.diameter, 6);
        assert!(l.value.asymptotic);
        assert_eq!(l.value.to_f64().unwrap(), 96.75);
        let l3 = q_landman_coeff(3).unwrap();
        assert_eq!(l3.diameter, 2);
        assert!(close(l3.value.to_f64().unwrap(), 43.0 * 27.0 / 324.0, 1e-12));
        assert_eq!(q_landman_coeff(18).unwrap().value.to_f64().unwrap(), 774.0);
    }
}
