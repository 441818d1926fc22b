//! Finite-precision exact arithmetic in Q_p.
//!
//! A nonzero value is stored PARI-style as `p^m * u` where `u` is a unit known
//! modulo `p^k`; the absolute precision is `N = m + k`, meaning the value is
//! known up to `O(p^N)`. Digits are materialized only for printing. Zero to a
//! given precision is its own case so that cancellation never fabricates
//! digits.

use crate::modular::{self, is_prime};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// Errors raised by p-adic operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PAdicError {
    ZeroDenominator,
    ZeroInput,
    PrimeMismatch { left: u64, right: u64 },
    DivisionByZero,
    /// Hensel start condition |f(a0)/f'(a0)^2|_p < 1 violated; carries the
    /// exponent e with |f(a0)/f'(a0)^2|_p = p^e (e >= 0 on failure).
    StartConditionFailed { exponent: i64 },
    NotPrincipalUnit,
    /// Too few known digits to decide the question (e.g. squares in Q_2 need
    /// the unit mod 8).
    PrecisionTooLow,
}

impl PAdicError {
    pub fn name(&self) -> &'static str {
        match self {
            PAdicError::ZeroDenominator => "ZeroDenominator",
            PAdicError::ZeroInput => "ZeroInput",
            PAdicError::PrimeMismatch { .. } => "PrimeMismatch",
            PAdicError::DivisionByZero => "DivisionByZero",
            PAdicError::StartConditionFailed { .. } => "StartConditionFailed",
            PAdicError::NotPrincipalUnit => "NotPrincipalUnit",
            PAdicError::PrecisionTooLow => "PrecisionTooLow",
        }
    }
}

impl fmt::Display for PAdicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PAdicError::ZeroDenominator => write!(f, "denominator is zero"),
            PAdicError::ZeroInput => write!(f, "input is zero"),
            PAdicError::PrimeMismatch { left, right } => {
                write!(f, "operands live in Q_{} and Q_{}", left, right)
            }
            PAdicError::DivisionByZero => write!(f, "division by zero (to working precision)"),
            PAdicError::StartConditionFailed { exponent } => write!(
                f,
                "Hensel start condition failed: |f(a0)/f'(a0)^2|_p = p^{}",
                exponent
            ),
            PAdicError::NotPrincipalUnit => write!(f, "argument is not in 1 + p^nu Z_p"),
            PAdicError::PrecisionTooLow => write!(f, "not enough digits to decide"),
        }
    }
}

impl std::error::Error for PAdicError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Zero up to O(p^abs_prec).
    Zero { abs_prec: i64 },
    /// p^val * unit with unit in (0, p^digits), unit not divisible by p.
    Unit { val: i64, unit: BigUint, digits: usize },
}

/// An element of Q_p known to finite precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicNumber {
    p: u64,
    repr: Repr,
}

fn ppow(p: u64, k: usize) -> BigUint {
    BigUint::from(p).pow(k as u32)
}

/// p-adic valuation of a nonzero big integer.
fn big_valuation(n: &BigUint, p: u64) -> usize {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut n = n.clone();
    let pb = BigUint::from(p);
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        n = q;
    }
}

fn big_mod_inv(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let e = BigInt::from(a.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(&BigInt::from(m.clone())).to_biguint().unwrap())
}

impl PAdicNumber {
    /// Zero known up to `O(p^abs_prec)`.
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        assert!(is_prime(p), "p must be prime");
        PAdicNumber {
            p,
            repr: Repr::Zero { abs_prec },
        }
    }

    fn from_unit(p: u64, val: i64, unit: BigUint, digits: usize) -> Self {
        debug_assert!(digits >= 1);
        debug_assert!(!(&unit % p).is_zero());
        debug_assert!(unit < ppow(p, digits));
        PAdicNumber {
            p,
            repr: Repr::Unit { val, unit, digits },
        }
    }

    /// Embeds `num/den` into Q_p with `prec` significant digits.
    pub fn from_rational(num: i64, den: i64, p: u64, prec: usize) -> Result<Self, PAdicError> {
        Self::from_big_rational(
            &BigRational::new(BigInt::from(num), {
                if den == 0 {
                    return Err(PAdicError::ZeroDenominator);
                }
                BigInt::from(den)
            }),
            p,
            prec,
        )
    }

    /// Embeds an exact rational into Q_p with `prec` significant digits.
    pub fn from_big_rational(r: &BigRational, p: u64, prec: usize) -> Result<Self, PAdicError> {
        assert!(is_prime(p), "p must be prime");
        assert!(prec >= 1, "precision must be positive");
        if r.is_zero() {
            return Ok(Self::zero(p, prec as i64));
        }
        let num = r.numer();
        let den = r.denom();
        let nu = num.magnitude();
        let du = den.magnitude();
        let a = big_valuation(nu, p) as i64;
        let b = big_valuation(du, p) as i64;
        let val = a - b;
        let pk = ppow(p, prec);
        let n0 = nu / ppow(p, a as usize) % &pk;
        let d0 = du / ppow(p, b as usize) % &pk;
        let mut unit = n0 * big_mod_inv(&d0, &pk).expect("unit part is invertible") % &pk;
        if num.is_negative() != den.is_negative() {
            unit = &pk - unit;
        }
        Ok(Self::from_unit(p, val, unit, prec))
    }

    /// Embeds `num/den` into Q_p known modulo `p^abs_prec` (PARI's
    /// `x + O(p^abs_prec)`); the digit count adapts to the valuation.
    pub fn from_rational_abs(num: i64, den: i64, p: u64, abs_prec: i64) -> Result<Self, PAdicError> {
        if den == 0 {
            return Err(PAdicError::ZeroDenominator);
        }
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        if r.is_zero() {
            return Ok(Self::zero(p, abs_prec));
        }
        let val = big_valuation(r.numer().magnitude(), p) as i64
            - big_valuation(r.denom().magnitude(), p) as i64;
        if abs_prec <= val {
            return Ok(Self::zero(p, abs_prec));
        }
        Self::from_big_rational(&r, p, (abs_prec - val) as usize)
    }

    /// A p-adic integer from an exact integer, `prec` significant digits.
    pub fn from_integer(n: &BigInt, p: u64, prec: usize) -> Self {
        Self::from_big_rational(&BigRational::from(n.clone()), p, prec)
            .expect("integer embedding cannot fail")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Valuation of a nonzero element; `None` for zero-to-precision.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    /// The value is known modulo `p^N` for this `N`.
    pub fn abs_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Unit { val, digits, .. } => val + *digits as i64,
        }
    }

    /// Base-p digits `a_0..a_{k-1}` of the unit part (the digit `a_i` sits at
    /// `p^(valuation + i)`). Empty for zero.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Zero { .. } => vec![],
            Repr::Unit { unit, digits, .. } => {
                let mut out = Vec::with_capacity(*digits);
                let mut u = unit.clone();
                let pb = BigUint::from(self.p);
                for _ in 0..*digits {
                    let (q, r) = u.div_rem(&pb);
                    out.push(r.to_u64().unwrap());
                    u = q;
                }
                out
            }
        }
    }

    /// Integer lift of a p-adic integer modulo `p^abs_precision`.
    /// Panics if the valuation is negative.
    pub fn integer_lift(&self) -> BigUint {
        match &self.repr {
            Repr::Zero { .. } => BigUint::zero(),
            Repr::Unit { val, unit, .. } => {
                assert!(*val >= 0, "not a p-adic integer");
                unit * ppow(self.p, *val as usize)
            }
        }
    }

    /// Unit part as an integer in `(0, p^k)`; zero for the zero element.
    pub fn unit_lift(&self) -> BigUint {
        match &self.repr {
            Repr::Zero { .. } => BigUint::zero(),
            Repr::Unit { unit, .. } => unit.clone(),
        }
    }

    /// Truncates to a smaller absolute precision.
    pub fn truncated(&self, abs_prec: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs_prec: n } => Self::zero(self.p, (*n).min(abs_prec)),
            Repr::Unit { val, unit, digits } => {
                let n = (val + *digits as i64).min(abs_prec);
                if n <= *val {
                    return Self::zero(self.p, n);
                }
                let k = (n - val) as usize;
                let u = unit % ppow(self.p, k);
                Self::from_unit(self.p, *val, u, k)
            }
        }
    }

    /// True when both values agree on their common precision range.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.abs_precision().min(other.abs_precision());
        self.truncated(n) == other.truncated(n)
    }

    fn check_prime(&self, other: &Self) -> Result<(), PAdicError> {
        if self.p != other.p {
            return Err(PAdicError::PrimeMismatch {
                left: self.p,
                right: other.p,
            });
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { val, unit, digits } => {
                let u = ppow(self.p, *digits) - unit;
                Self::from_unit(self.p, *val, u, *digits)
            }
        }
    }

    /// Sum with precision `min(N_x, N_y)`.
    pub fn checked_add(&self, other: &Self) -> Result<Self, PAdicError> {
        self.check_prime(other)?;
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_prec: a }, Repr::Zero { abs_prec: b }) => {
                Ok(Self::zero(p, (*a).min(*b)))
            }
            (Repr::Zero { abs_prec }, Repr::Unit { .. }) => {
                Ok(other.truncated((*abs_prec).min(other.abs_precision())))
            }
            (Repr::Unit { .. }, Repr::Zero { abs_prec }) => {
                Ok(self.truncated((*abs_prec).min(self.abs_precision())))
            }
            (
                Repr::Unit {
                    val: mx,
                    unit: ux,
                    digits: kx,
                },
                Repr::Unit {
                    val: my,
                    unit: uy,
                    digits: ky,
                },
            ) => {
                let n = (mx + *kx as i64).min(my + *ky as i64);
                let m0 = (*mx).min(*my);
                if n <= m0 {
                    return Ok(Self::zero(p, n));
                }
                let len = (n - m0) as usize;
                let modulus = ppow(p, len);
                let sx = ux * ppow(p, (mx - m0) as usize) % &modulus;
                let sy = uy * ppow(p, (my - m0) as usize) % &modulus;
                let s = (sx + sy) % &modulus;
                if s.is_zero() {
                    return Ok(Self::zero(p, n));
                }
                let v = big_valuation(&s, p);
                if m0 + v as i64 >= n {
                    return Ok(Self::zero(p, n));
                }
                let unit = s / ppow(p, v);
                Ok(Self::from_unit(p, m0 + v as i64, unit, len - v))
            }
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PAdicError> {
        self.checked_add(&other.neg())
    }

    /// Product with precision `min(N_x + m_y, N_y + m_x)`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, PAdicError> {
        self.check_prime(other)?;
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_prec: a }, Repr::Zero { abs_prec: b }) => Ok(Self::zero(p, a + b)),
            (Repr::Zero { abs_prec }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::Zero { abs_prec }) => {
                Ok(Self::zero(p, abs_prec + val))
            }
            (
                Repr::Unit {
                    val: mx,
                    unit: ux,
                    digits: kx,
                },
                Repr::Unit {
                    val: my,
                    unit: uy,
                    digits: ky,
                },
            ) => {
                let k = (*kx).min(*ky);
                let unit = ux * uy % ppow(p, k);
                Ok(Self::from_unit(p, mx + my, unit, k))
            }
        }
    }

    /// Quotient; the divisor must be nonzero to its precision.
    pub fn checked_div(&self, other: &Self) -> Result<Self, PAdicError> {
        self.check_prime(other)?;
        let p = self.p;
        let (my, uy, ky) = match &other.repr {
            Repr::Zero { .. } => return Err(PAdicError::DivisionByZero),
            Repr::Unit { val, unit, digits } => (*val, unit, *digits),
        };
        match &self.repr {
            Repr::Zero { abs_prec } => Ok(Self::zero(p, abs_prec - my)),
            Repr::Unit {
                val: mx,
                unit: ux,
                digits: kx,
            } => {
                let k = (*kx).min(ky);
                let m = ppow(p, k);
                let inv = big_mod_inv(&(uy % &m), &m).expect("unit is invertible");
                let unit = ux * inv % &m;
                Ok(Self::from_unit(p, mx - my, unit, k))
            }
        }
    }

    /// |x|_p as an exact rational; 0 for the zero element.
    pub fn abs_value(&self) -> BigRational {
        match &self.repr {
            Repr::Zero { .. } => BigRational::zero(),
            Repr::Unit { val, .. } => power_of_p(self.p, -*val),
        }
    }
}

/// Arithmetic dispatcher mirroring the operation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

impl FromStr for ArithOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "add" => Ok(ArithOp::Add),
            "sub" => Ok(ArithOp::Sub),
            "mul" => Ok(ArithOp::Mul),
            "div" => Ok(ArithOp::Div),
            "neg" => Ok(ArithOp::Neg),
            _ => Err(format!("unknown operation `{}`", s)),
        }
    }
}

/// Applies `op` to `x` and `y` (`y` ignored for `neg`).
pub fn arith(op: ArithOp, x: &PAdicNumber, y: &PAdicNumber) -> Result<PAdicNumber, PAdicError> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Div => x.checked_div(y),
        ArithOp::Neg => Ok(x.neg()),
    }
}

impl std::ops::Add for &PAdicNumber {
    type Output = PAdicNumber;
    fn add(self, rhs: Self) -> PAdicNumber {
        self.checked_add(rhs).unwrap()
    }
}

impl std::ops::Sub for &PAdicNumber {
    type Output = PAdicNumber;
    fn sub(self, rhs: Self) -> PAdicNumber {
        self.checked_sub(rhs).unwrap()
    }
}

impl std::ops::Mul for &PAdicNumber {
    type Output = PAdicNumber;
    fn mul(self, rhs: Self) -> PAdicNumber {
        self.checked_mul(rhs).unwrap()
    }
}

impl std::ops::Div for &PAdicNumber {
    type Output = PAdicNumber;
    fn div(self, rhs: Self) -> PAdicNumber {
        self.checked_div(rhs).unwrap()
    }
}

/// PARI-style rendering: terms in increasing powers, zero digits omitted,
/// unit coefficients and unit exponents left implicit, closed by `O(p^N)`.
impl fmt::Display for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let mut wrote = false;
        if let Some(m) = self.valuation() {
            for (i, d) in self.digits().into_iter().enumerate() {
                if d == 0 {
                    continue;
                }
                if wrote {
                    write!(f, " + ")?;
                }
                let e = m + i as i64;
                match e {
                    0 => write!(f, "{}", d)?,
                    1 => {
                        if d == 1 {
                            write!(f, "{}", p)?;
                        } else {
                            write!(f, "{}*{}", d, p)?;
                        }
                    }
                    _ => {
                        if d == 1 {
                            write!(f, "{}^{}", p, e)?;
                        } else {
                            write!(f, "{}*{}^{}", d, p, e)?;
                        }
                    }
                }
                wrote = true;
            }
        }
        if wrote {
            write!(f, " + ")?;
        }
        write!(f, "O({}^{})", p, self.abs_precision())
    }
}

fn power_of_p(p: u64, e: i64) -> BigRational {
    let pk = BigInt::from(ppow(p, e.unsigned_abs() as usize));
    if e >= 0 {
        BigRational::from(pk)
    } else {
        BigRational::new(BigInt::one(), pk)
    }
}

/// (ord_p, |num/den|_p) with the convention |0|_p = 0 (ord reported as None).
pub fn valuation_abs(
    num: i64,
    den: i64,
    p: u64,
) -> Result<(Option<i64>, BigRational), PAdicError> {
    if den == 0 {
        return Err(PAdicError::ZeroDenominator);
    }
    assert!(is_prime(p), "p must be prime");
    if num == 0 {
        return Ok((None, BigRational::zero()));
    }
    let a = big_valuation(&BigUint::from(num.unsigned_abs()), p) as i64;
    let b = big_valuation(&BigUint::from(den.unsigned_abs()), p) as i64;
    let ord = a - b;
    Ok((Some(ord), power_of_p(p, -ord)))
}

/// One entry of the product-formula report: `prime = None` is the real place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceAbs {
    pub prime: Option<u64>,
    pub abs: BigRational,
}

/// Product-formula report for a nonzero rational: all places where
/// |a|_v differs from 1, and their product (always exactly 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCheck {
    pub places: Vec<PlaceAbs>,
    pub product: BigRational,
}

/// Checks `prod_v |a|_v = 1` over all places of Q, exactly.
pub fn valuation_product_check(num: i64, den: i64) -> Result<ProductCheck, PAdicError> {
    if den == 0 {
        return Err(PAdicError::ZeroDenominator);
    }
    if num == 0 {
        return Err(PAdicError::ZeroInput);
    }
    let r = BigRational::new(BigInt::from(num), BigInt::from(den));
    let mut places = Vec::new();
    let mut product = BigRational::one();
    let nfac = modular::factorize(r.numer().magnitude().to_u64().unwrap());
    let dfac = modular::factorize(r.denom().magnitude().to_u64().unwrap());
    let mut primes: Vec<u64> = nfac.iter().chain(dfac.iter()).map(|&(p, _)| p).collect();
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        let vn = nfac.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e) as i64;
        let vd = dfac.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e) as i64;
        let ord = vn - vd;
        if ord != 0 {
            let abs = power_of_p(p, -ord);
            product *= &abs;
            places.push(PlaceAbs {
                prime: Some(p),
                abs,
            });
        }
    }
    let abs_inf = r.abs();
    if !abs_inf.is_one() {
        product *= &abs_inf;
        places.push(PlaceAbs {
            prime: None,
            abs: abs_inf,
        });
    }
    Ok(ProductCheck { places, product })
}

/// Teichmueller representative of `x0`: the limit of `x0^(p^n)`, the unique
/// (p-1)-st root of unity congruent to `x0` mod p (0 when p | x0).
pub fn teichmuller(x0: i64, p: u64, prec: usize) -> PAdicNumber {
    assert!(is_prime(p), "p must be prime");
    assert!(prec >= 1);
    let r = x0.rem_euclid(p as i64) as u64;
    if r == 0 {
        return PAdicNumber::zero(p, prec as i64);
    }
    let modulus = ppow(p, prec);
    let pb = BigUint::from(p);
    let mut y = BigUint::from(r);
    for _ in 0..=prec {
        let next = y.modpow(&pb, &modulus);
        if next == y {
            break;
        }
        y = next;
    }
    PAdicNumber::from_unit(p, 0, y, prec)
}

/// Dense integer-coefficient polynomial in one variable (ascending order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() == 1 {
            return IntPolynomial::new(vec![BigInt::zero()]);
        }
        IntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(i == 0 && first) {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{}", mag)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", mag)?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{}", i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = String;

    /// Parses sums of terms `c`, `x`, `c*x`, `x^k`, `c*x^k` (also `cx^k`).
    fn from_str(s: &str) -> Result<Self, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut terms: Vec<(usize, BigInt)> = Vec::new();
        let mut rest = compact.as_str();
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        while !rest.is_empty() {
            let end = rest[1..]
                .find(['+', '-'])
                .map(|i| i + 1)
                .unwrap_or(rest.len());
            let term = &rest[..end];
            let (coeff_str, exp) = match term.find('x') {
                None => (term, 0usize),
                Some(ix) => {
                    let c = &term[..ix];
                    let after = &term[ix + 1..];
                    let e = if after.is_empty() {
                        1
                    } else {
                        after
                            .strip_prefix('^')
                            .ok_or_else(|| format!("bad term `{}`", term))?
                            .parse::<usize>()
                            .map_err(|_| format!("bad exponent in `{}`", term))?
                    };
                    (c.trim_end_matches('*'), e)
                }
            };
            let coeff: BigInt = if coeff_str.is_empty() {
                BigInt::one()
            } else {
                coeff_str
                    .parse()
                    .map_err(|_| format!("bad coefficient `{}`", coeff_str))?
            };
            terms.push((exp, coeff * BigInt::from(sign)));
            if end == rest.len() {
                break;
            }
            sign = if rest.as_bytes()[end] == b'-' { -1 } else { 1 };
            rest = &rest[end + 1..];
        }
        let deg = terms.iter().map(|&(e, _)| e).max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        for (e, c) in terms {
            coeffs[e] += c;
        }
        Ok(IntPolynomial::new(coeffs))
    }
}

/// Newton iteration in Z_p: from a start satisfying
/// `|f(a0)/f'(a0)^2|_p < 1`, produce the unique nearby root to
/// `O(p^target_prec)`. Precision doubles per step.
pub fn hensel_lift(
    f: &IntPolynomial,
    alpha0: &PAdicNumber,
    target_prec: usize,
) -> Result<PAdicNumber, PAdicError> {
    let p = alpha0.p();
    if alpha0.valuation().map_or(false, |v| v < 0) {
        // Outside Z_p the start condition cannot hold.
        return Err(PAdicError::StartConditionFailed { exponent: i64::MAX });
    }
    let n0 = alpha0.abs_precision().max(1) as usize;
    let a0 = BigInt::from(alpha0.integer_lift());
    let fa = f.eval(&a0);
    let dfa = f.derivative().eval(&a0);
    let t = if fa.is_zero() {
        i64::MAX
    } else {
        big_valuation(fa.magnitude(), p) as i64
    };
    let d = if dfa.is_zero() {
        i64::MAX
    } else {
        big_valuation(dfa.magnitude(), p) as i64
    };
    // Start condition: v(f) > 2 v(f'), both visible at the start precision.
    if d == i64::MAX || d >= n0 as i64 || t <= 2 * d {
        return Err(PAdicError::StartConditionFailed {
            exponent: if d == i64::MAX { i64::MAX } else { 2 * d - t },
        });
    }
    let guard = d as usize;
    let work = target_prec + guard;
    let modulus = BigInt::from(ppow(p, work));
    let target_mod = BigInt::from(ppow(p, target_prec));
    let pd = BigInt::from(ppow(p, guard));
    let fprime = f.derivative();
    let mut x = a0.mod_floor(&modulus);
    for _ in 0..200 {
        let fx = f.eval(&x).mod_floor(&modulus);
        if (&fx % &target_mod).is_zero() {
            let xm = x.mod_floor(&target_mod).to_biguint().unwrap();
            if xm.is_zero() {
                return Ok(PAdicNumber::zero(p, target_prec as i64));
            }
            let v = big_valuation(&xm, p);
            if v >= target_prec {
                return Ok(PAdicNumber::zero(p, target_prec as i64));
            }
            let unit = xm / ppow(p, v);
            return Ok(PAdicNumber::from_unit(
                p,
                v as i64,
                unit,
                target_prec - v,
            ));
        }
        let dfx = fprime.eval(&x).mod_floor(&modulus);
        // f'(x) = p^d * unit throughout the iteration.
        let du = (&dfx / &pd).mod_floor(&modulus);
        let du_inv = BigInt::from(
            big_mod_inv(&du.to_biguint().unwrap(), &modulus.to_biguint().unwrap())
                .expect("derivative unit is invertible"),
        );
        let delta = (&fx / &pd * du_inv).mod_floor(&modulus);
        x = (x - delta).mod_floor(&modulus);
    }
    unreachable!("Newton iteration failed to converge");
}

/// Squares of Q_p: even valuation plus a residue condition on the unit part
/// (a quadratic-residue leading digit for odd p; unit = 1 mod 8 for p = 2).
/// Returns a square root witness when the answer is yes.
pub fn is_square(x: &PAdicNumber) -> Result<Option<PAdicNumber>, PAdicError> {
    if x.is_zero() {
        return Err(PAdicError::ZeroInput);
    }
    let p = x.p();
    let m = x.valuation().unwrap();
    if m % 2 != 0 {
        return Ok(None);
    }
    let unit = x.unit_lift();
    let k = x.digits().len();
    if p == 2 {
        if k < 3 {
            return Err(PAdicError::PrecisionTooLow);
        }
        if (&unit % 8u32).to_u64().unwrap() != 1 {
            return Ok(None);
        }
    } else {
        let lead = (&unit % p).to_i64().unwrap();
        if modular::legendre_symbol(lead, p).expect("odd prime") != 1 {
            return Ok(None);
        }
    }
    // Witness: Newton on y^2 - u from a mod-p (or mod-8) seed.
    let seed = if p == 2 {
        1
    } else {
        modular::sqrt_mod_p((&unit % p).to_i64().unwrap(), p).expect("residue checked")
    };
    let f = IntPolynomial::new(vec![-BigInt::from(unit.clone()), BigInt::zero(), BigInt::one()]);
    let start = PAdicNumber::from_integer(&BigInt::from(seed), p, k.max(4));
    let root = hensel_lift(&f, &start, k)?;
    let half = PAdicNumber {
        p,
        repr: Repr::Unit {
            val: m / 2,
            unit: root.unit_lift(),
            digits: root.digits().len(),
        },
    };
    Ok(Some(half))
}

/// Is the rational `num/den` a square in Q_p? Uses `prec` working digits.
pub fn rational_is_square_at(
    num: i64,
    den: i64,
    p: u64,
    prec: usize,
) -> Result<Option<PAdicNumber>, PAdicError> {
    if num == 0 {
        return Err(PAdicError::ZeroInput);
    }
    let x = PAdicNumber::from_rational(num, den, p, prec.max(3))?;
    is_square(&x)
}

/// Representatives of the square classes Q_p^x / (Q_p^x)^2:
/// `[1, v, p, p v]` with `v` the least positive non-residue for odd p, and
/// the fixed eight-element list at p = 2.
pub fn square_class_reps(p: u64) -> Vec<i64> {
    assert!(is_prime(p), "p must be prime");
    if p == 2 {
        return vec![1, 5, -1, -5, 2, 10, -2, -10];
    }
    let v = (2..)
        .find(|&v| modular::legendre_symbol(v, p).expect("odd prime") == -1)
        .unwrap();
    vec![1, v, p as i64, p as i64 * v]
}

/// log(1+x) summed to `prec`; defined on principal units
/// `u = 1 (mod p^nu)`, nu = 1 for odd p and 2 for p = 2.
pub fn padic_log(u: &PAdicNumber, prec: usize) -> Result<PAdicNumber, PAdicError> {
    if u.is_zero() {
        return Err(PAdicError::NotPrincipalUnit);
    }
    let p = u.p();
    let nu = if p == 2 { 2usize } else { 1 };
    if u.valuation() != Some(0) {
        return Err(PAdicError::NotPrincipalUnit);
    }
    let k = u.digits().len();
    if k < nu {
        return Err(PAdicError::PrecisionTooLow);
    }
    let unit = u.unit_lift();
    if ((&unit - 1u32) % ppow(p, nu)) != BigUint::zero() {
        return Err(PAdicError::NotPrincipalUnit);
    }
    let out_prec = prec.min(k);
    // x = u - 1 has valuation >= nu; terms x^n/n shed v_p(n) digits, so the
    // cutoff T is minimal with T nu - floor(log_p T) >= prec, and x^n carries
    // floor(log_p T) guard digits.
    let mut t_cut = 1usize;
    let ilog = |n: usize| -> usize {
        let mut e = 0;
        let mut q = n as u64;
        while q >= p {
            q /= p;
            e += 1;
        }
        e
    };
    while t_cut * nu < out_prec + ilog(t_cut) {
        t_cut += 1;
    }
    let guard = ilog(t_cut);
    let work_mod = BigInt::from(ppow(p, out_prec + guard));
    let out_mod = BigInt::from(ppow(p, out_prec));
    let x = BigInt::from(unit) - 1;
    let mut xn = BigInt::one();
    let mut acc = BigInt::zero();
    for n in 1..=t_cut {
        let prod: BigInt = &xn * &x;
        xn = prod.mod_floor(&work_mod);
        if xn.is_zero() {
            break;
        }
        let e = val_in_base(n as u64, p);
        let odd = n as u64 / p.pow(e as u32);
        let inv = BigInt::from(
            big_mod_inv(&BigUint::from(odd), &out_mod.to_biguint().unwrap())
                .expect("n/p^e is invertible"),
        );
        let term = ((&xn / BigInt::from(ppow(p, e))) * inv).mod_floor(&out_mod);
        if n % 2 == 1 {
            acc = (acc + term).mod_floor(&out_mod);
        } else {
            acc = (acc - term).mod_floor(&out_mod);
        }
    }
    let au = acc.to_biguint().unwrap();
    if au.is_zero() {
        return Ok(PAdicNumber::zero(p, out_prec as i64));
    }
    let v = big_valuation(&au, p);
    if v >= out_prec {
        return Ok(PAdicNumber::zero(p, out_prec as i64));
    }
    Ok(PAdicNumber::from_unit(
        p,
        v as i64,
        au / ppow(p, v),
        out_prec - v,
    ))
}

fn val_in_base(mut n: u64, p: u64) -> usize {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// The splitting Q_p^x = p^Z x mu x U: p-power exponent, Teichmueller part
/// and principal-unit part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub exponent: i64,
    pub teich: PAdicNumber,
    pub principal: PAdicNumber,
    pub nu: u32,
}

/// Decomposes nonzero `x` as `p^exponent * teich * principal` with
/// `principal = 1 (mod p^nu)`.
pub fn unit_decompose(x: &PAdicNumber) -> Result<UnitDecomposition, PAdicError> {
    if x.is_zero() {
        return Err(PAdicError::ZeroInput);
    }
    let p = x.p();
    let nu = if p == 2 { 2u32 } else { 1 };
    let m = x.valuation().unwrap();
    let k = x.digits().len();
    let unit_part = PAdicNumber::from_unit(p, 0, x.unit_lift(), k);
    let teich = if p == 2 {
        if k < 2 {
            return Err(PAdicError::PrecisionTooLow);
        }
        let sign = (x.unit_lift() % 4u32).to_u64().unwrap(); // 1 or 3
        if sign == 1 {
            PAdicNumber::from_integer(&BigInt::one(), 2, k)
        } else {
            PAdicNumber::from_integer(&BigInt::from(-1), 2, k)
        }
    } else {
        let lead = (x.unit_lift() % p).to_i64().unwrap();
        teichmuller(lead, p, k)
    };
    let principal = unit_part.checked_div(&teich)?;
    Ok(UnitDecomposition {
        exponent: m,
        teich,
        principal,
        nu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(num: i64, den: i64, p: u64, prec: usize) -> PAdicNumber {
        PAdicNumber::from_rational(num, den, p, prec).unwrap()
    }

    /// Long-division oracle: extract digits of a rational with exact
    /// arithmetic, one mod-p step at a time.
    fn digit_oracle(num: i64, den: i64, p: u64, count: usize) -> (i64, Vec<u64>) {
        let mut r = BigRational::new(BigInt::from(num), BigInt::from(den));
        assert!(!r.is_zero());
        let mut m = 0i64;
        let pq = BigRational::from(BigInt::from(p));
        loop {
            let vn = big_valuation(r.numer().magnitude(), p) as i64;
            let vd = big_valuation(r.denom().magnitude(), p) as i64;
            if vn - vd == 0 {
                break;
            }
            if vn - vd > 0 {
                r /= &pq;
                m += 1;
            } else {
                r *= &pq;
                m -= 1;
            }
        }
        let mut digits = Vec::new();
        for _ in 0..count {
            // digit = r mod p: num * den^{-1} mod p
            let n = r.numer().mod_floor(&BigInt::from(p)).to_u64().unwrap();
            let d = r.denom().mod_floor(&BigInt::from(p)).to_u64().unwrap();
            let digit = n * modular::mod_inv(d as i64, p).unwrap() % p;
            digits.push(digit);
            r = (r - BigRational::from(BigInt::from(digit))) / &pq;
        }
        (m, digits)
    }

    #[test]
    fn paper_expansion_9_over_7_at_5() {
        let x = q(9, 7, 5, 6);
        assert_eq!(x.valuation(), Some(0));
        assert_eq!(x.digits(), vec![2, 2, 1, 4, 2, 3]);
        assert_eq!(x.to_string(), "2 + 2*5 + 5^2 + 4*5^3 + 2*5^4 + 3*5^5 + O(5^6)");
    }

    #[test]
    fn paper_expansion_9_over_7_at_7() {
        let x = q(9, 7, 7, 6);
        assert_eq!(x.valuation(), Some(-1));
        assert_eq!(&x.digits()[..2], &[2, 1]);
        // PARI's 9/7 + O(7^6) carries absolute precision 6.
        let y = PAdicNumber::from_rational_abs(9, 7, 7, 6).unwrap();
        assert_eq!(y.to_string(), "2*7^-1 + 1 + O(7^6)");
    }

    #[test]
    fn minus_one_is_all_p_minus_one() {
        for p in [2u64, 5, 13] {
            for k in [1usize, 4, 9] {
                let x = q(-1, 1, p, k);
                assert_eq!(x.digits(), vec![p - 1; k]);
            }
        }
    }

    #[test]
    fn zero_element() {
        let z = q(0, 1, 5, 4);
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "O(5^4)");
    }

    #[test]
    fn round_trip_against_long_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &p in &[2u64, 3, 5, 7, 11, 101] {
            for _ in 0..60 {
                let num = rng.gen_range(-400..400i64);
                let den = rng.gen_range(1..400i64);
                if num == 0 {
                    continue;
                }
                let x = q(num, den, p, 12);
                let (m, digits) = digit_oracle(num, den, p, 12);
                assert_eq!(x.valuation(), Some(m), "{}/{} at {}", num, den, p);
                assert_eq!(x.digits(), digits, "{}/{} at {}", num, den, p);
            }
        }
    }

    #[test]
    fn periodicity_of_proper_fractions() {
        // -a/d for d coprime to p is purely periodic with period | phi(d).
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for &p in &[2u64, 5, 7] {
            for _ in 0..40 {
                let d = rng.gen_range(2..50i64);
                if modular::gcd(d, p as i64) != 1 {
                    continue;
                }
                let a = rng.gen_range(1..d);
                let period = modular::euler_phi(d as u64) as usize;
                let x = q(-a, d, p, 3 * period);
                let digits = x.digits();
                assert_eq!(x.valuation().unwrap() % 1, 0);
                for i in 0..digits.len() - period {
                    assert_eq!(digits[i], digits[i + period], "-{}/{} at {}", a, d, p);
                }
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        // x + (-x) is zero to min precision.
        let x = q(17, 3, 5, 6);
        let s = x.checked_add(&x.neg()).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.abs_precision(), 6);

        // from_rational(9,7,7,6) * 7 recovers 9 to O(7^{>=5}).
        let a = q(9, 7, 7, 6);
        let b = q(7, 1, 7, 6);
        let prod = a.checked_mul(&b).unwrap();
        let nine = q(9, 1, 7, 6);
        assert!(prod.abs_precision() >= 5);
        assert!(prod.agrees_with(&nine));

        // 1/3 * 3 = 1 + O(5^6).
        let inv = q(1, 3, 5, 6);
        let three = q(3, 1, 5, 6);
        let one = inv.checked_mul(&three).unwrap();
        assert!(one.agrees_with(&q(1, 1, 5, 6)));
        assert_eq!(one.abs_precision(), 6);
    }

    #[test]
    fn precision_contracts() {
        let x = q(9, 7, 7, 6); // val -1, N = 5
        let y = q(7, 1, 7, 6); // val 1, N = 7
        assert_eq!(x.abs_precision(), 5);
        assert_eq!(y.abs_precision(), 7);
        // mul: min(N_x + m_y, N_y + m_x) = min(5+1, 7-1) = 6
        assert_eq!(x.checked_mul(&y).unwrap().abs_precision(), 6);
        // add: min of absolute precisions
        assert_eq!(x.checked_add(&y).unwrap().abs_precision(), 5);
        // div: min(N_x - m_y, N_y + m_x - 2 m_y) -> valuation subtraction
        let d = x.checked_div(&y).unwrap();
        assert_eq!(d.valuation(), Some(-2));
        assert_eq!(d.digits().len(), 6);
    }

    #[test]
    fn prime_mismatch_and_div_zero() {
        let x = q(1, 1, 5, 4);
        let y = q(1, 1, 7, 4);
        assert!(matches!(
            x.checked_add(&y),
            Err(PAdicError::PrimeMismatch { .. })
        ));
        let z = PAdicNumber::zero(5, 4);
        assert_eq!(x.checked_div(&z), Err(PAdicError::DivisionByZero));
    }

    #[test]
    fn field_axioms_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let p = *[2u64, 3, 5, 7].iter().nth(rng.gen_range(0..4)).unwrap();
            let mk = |rng: &mut ChaCha8Rng| {
                let n = rng.gen_range(-50..50i64);
                let d = rng.gen_range(1..50i64);
                q(if n == 0 { 1 } else { n }, d, p, 8)
            };
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let lhs = a.checked_add(&b).unwrap().checked_add(&c).unwrap();
            let rhs = a.checked_add(&b.checked_add(&c).unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs));
            let lhs = a.checked_mul(&b).unwrap().checked_mul(&c).unwrap();
            let rhs = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs));
            let lhs = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
            let rhs = a
                .checked_mul(&b)
                .unwrap()
                .checked_add(&a.checked_mul(&c).unwrap())
                .unwrap();
            assert!(lhs.agrees_with(&rhs));
        }
    }

    #[test]
    fn norm_multiplicativity_and_ultrametric() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let p = *[2u64, 5, 11].iter().nth(rng.gen_range(0..3)).unwrap();
            let n1 = rng.gen_range(1..300i64);
            let n2 = rng.gen_range(1..300i64);
            let d1 = rng.gen_range(1..300i64);
            let d2 = rng.gen_range(1..300i64);
            let x = q(n1, d1, p, 10);
            let y = q(n2, d2, p, 10);
            let xy = x.checked_mul(&y).unwrap();
            assert_eq!(xy.abs_value(), x.abs_value() * y.abs_value());
            let s = x.checked_add(&y).unwrap();
            assert!(s.abs_value() <= x.abs_value().max(y.abs_value()));
        }
    }

    #[test]
    fn valuation_abs_cases() {
        let (ord, abs) = valuation_abs(50, 1, 5).unwrap();
        assert_eq!(ord, Some(2));
        assert_eq!(abs, BigRational::new(BigInt::one(), BigInt::from(25)));

        let (ord, abs) = valuation_abs(0, 1, 7).unwrap();
        assert_eq!(ord, None);
        assert!(abs.is_zero());

        let (ord, abs) = valuation_abs(9, 7, 7).unwrap();
        assert_eq!(ord, Some(-1));
        assert_eq!(abs, BigRational::from(BigInt::from(7)));

        assert_eq!(valuation_abs(1, 0, 7), Err(PAdicError::ZeroDenominator));
    }

    #[test]
    fn product_formula_cases() {
        let r = valuation_product_check(1, 1).unwrap();
        assert!(r.places.is_empty());
        assert!(r.product.is_one());

        let r = valuation_product_check(-12, 5).unwrap();
        let abs: Vec<(Option<u64>, String)> = r
            .places
            .iter()
            .map(|pl| (pl.prime, pl.abs.to_string()))
            .collect();
        assert_eq!(
            abs,
            vec![
                (Some(2), "1/4".to_string()),
                (Some(3), "1/3".to_string()),
                (Some(5), "5".to_string()),
                (None, "12/5".to_string()),
            ]
        );
        assert!(r.product.is_one());

        for p in [2i64, 3, 5, 101] {
            let r = valuation_product_check(p, 1).unwrap();
            assert_eq!(r.places.len(), 2);
            assert!(r.product.is_one());
        }

        assert_eq!(valuation_product_check(0, 1), Err(PAdicError::ZeroInput));
    }

    #[test]
    fn product_formula_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let num = rng.gen_range(-10_000..10_000i64);
            let den = rng.gen_range(1..10_000i64);
            if num == 0 {
                continue;
            }
            assert!(valuation_product_check(num, den).unwrap().product.is_one());
        }
    }

    #[test]
    fn teichmuller_paper_table() {
        assert_eq!(teichmuller(1, 5, 5).digits(), vec![1, 0, 0, 0, 0]);
        assert_eq!(teichmuller(2, 5, 5).digits(), vec![2, 1, 2, 1, 3]);
        assert_eq!(teichmuller(3, 5, 5).digits(), vec![3, 3, 2, 3, 1]);
        assert_eq!(teichmuller(4, 5, 5).digits(), vec![4, 4, 4, 4, 4]);
        assert!(teichmuller(5, 5, 5).is_zero());
    }

    #[test]
    fn teichmuller_fixed_point_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &p in &[3u64, 5, 7, 13] {
            for prec in [3usize, 8, 20] {
                let x0 = rng.gen_range(1..p as i64);
                let w = teichmuller(x0, p, prec);
                // w^p = w and w = x0 (mod p)
                let mut wp = w.clone();
                for _ in 1..p {
                    wp = wp.checked_mul(&w).unwrap();
                }
                assert!(wp.agrees_with(&w), "omega^p = omega at p={}", p);
                assert_eq!(w.digits()[0], x0 as u64 % p);
            }
        }
    }

    #[test]
    fn hensel_lift_gives_teichmuller() {
        // f = x^{p-1} - 1 from a0 = 2 at p = 5 converges to omega(2).
        let p = 5u64;
        let mut coeffs = vec![0i64; 5];
        coeffs[0] = -1;
        coeffs[4] = 1;
        let f = IntPolynomial::from_i64(&coeffs);
        let a0 = PAdicNumber::from_rational(2, 1, p, 8).unwrap();
        let root = hensel_lift(&f, &a0, 8).unwrap();
        assert_eq!(root, teichmuller(2, p, 8));
    }

    #[test]
    fn hensel_sqrt2_at_7() {
        let f = IntPolynomial::from_i64(&[-2, 0, 1]);
        let a0 = PAdicNumber::from_rational(3, 1, 7, 4).unwrap();
        let root = hensel_lift(&f, &a0, 24).unwrap();
        let sq = root.checked_mul(&root).unwrap();
        assert!(sq.agrees_with(&q(2, 1, 7, 24)));
        // Postcondition: f(root) vanishes to the target precision.
        let fr = f.eval(&BigInt::from(root.integer_lift()));
        assert!(big_valuation(fr.magnitude(), 7) >= 24);
    }

    #[test]
    fn hensel_start_condition_failure() {
        let f = IntPolynomial::from_i64(&[-2, 0, 1]);
        let a0 = PAdicNumber::from_rational(1, 1, 2, 6).unwrap();
        match hensel_lift(&f, &a0, 10) {
            Err(PAdicError::StartConditionFailed { exponent }) => assert!(exponent >= 0),
            other => panic!("expected start-condition failure, got {:?}", other),
        }
    }

    #[test]
    fn hensel_postcondition_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let p = *[3u64, 5, 7, 11].iter().nth(rng.gen_range(0..4)).unwrap();
            // Pick a target root r mod p and build f = (x - r)(x - r') mod p
            // with distinct roots, so f'(r) is a unit.
            let r = rng.gen_range(1..p as i64);
            let mut r2 = rng.gen_range(1..p as i64);
            if r2 == r {
                r2 = (r2 % (p as i64 - 1)) + 1;
                if r2 == r {
                    continue;
                }
            }
            let f = IntPolynomial::new(vec![
                BigInt::from(r * r2),
                BigInt::from(-(r + r2)),
                BigInt::one(),
            ]);
            let target = rng.gen_range(5..40usize);
            let a0 = PAdicNumber::from_rational(r, 1, p, 4).unwrap();
            let root = hensel_lift(&f, &a0, target).unwrap();
            let fr = f.eval(&BigInt::from(root.integer_lift()));
            assert!(
                fr.is_zero() || big_valuation(fr.magnitude(), p) >= target,
                "f(root) = 0 mod p^{}",
                target
            );
        }
    }

    #[test]
    fn squares_in_qp() {
        // 2 is a square in Q_7.
        let w = rational_is_square_at(2, 1, 7, 10).unwrap().unwrap();
        let two = q(2, 1, 7, 10);
        assert!(w.checked_mul(&w).unwrap().agrees_with(&two));
        // 5 at p = 5 has odd valuation.
        assert!(rational_is_square_at(5, 1, 5, 10).unwrap().is_none());
        // 17 = 1 mod 8 is a square in Q_2.
        let w = rational_is_square_at(17, 1, 2, 10).unwrap().unwrap();
        let x = q(17, 1, 2, 10);
        assert!(w.checked_mul(&w).unwrap().agrees_with(&x));
        // 3 is not a square in Q_2 (3 mod 8).
        assert!(rational_is_square_at(3, 1, 2, 10).unwrap().is_none());
        assert_eq!(rational_is_square_at(0, 1, 5, 6), Err(PAdicError::ZeroInput));
    }

    #[test]
    fn square_class_representatives() {
        assert_eq!(square_class_reps(2), vec![1, 5, -1, -5, 2, 10, -2, -10]);
        assert_eq!(square_class_reps(7), vec![1, 3, 7, 21]);
        assert_eq!(square_class_reps(5), vec![1, 2, 5, 10]);
    }

    #[test]
    fn padic_log_cases() {
        // log 1 = 0.
        let one = q(1, 1, 5, 8);
        assert!(padic_log(&one, 8).unwrap().is_zero());

        // Homomorphism: log(u^2) = 2 log(u) for u = 1 + p.
        let u = q(6, 1, 5, 10);
        let u2 = u.checked_mul(&u).unwrap();
        let lhs = padic_log(&u2, 10).unwrap();
        let two = q(2, 1, 5, 10);
        let rhs = padic_log(&u, 10).unwrap().checked_mul(&two).unwrap();
        assert!(lhs.agrees_with(&rhs));

        // Independent oracle: exact rational partial sum reduced mod 5^4.
        let series: BigRational = (1..=8)
            .map(|n| {
                let xn = BigRational::from(BigInt::from(5)).pow(n as i32);
                let sign = if n % 2 == 1 { 1 } else { -1 };
                xn * BigRational::new(BigInt::from(sign), BigInt::from(n))
            })
            .sum();
        let expect = PAdicNumber::from_big_rational(&series, 5, 6).unwrap().truncated(4);
        let got = padic_log(&q(6, 1, 5, 10), 4).unwrap();
        assert!(got.agrees_with(&expect));

        // Non-principal unit rejected.
        assert_eq!(padic_log(&q(2, 1, 5, 8), 8), Err(PAdicError::NotPrincipalUnit));
        assert_eq!(padic_log(&q(3, 1, 2, 8), 8), Err(PAdicError::NotPrincipalUnit));
        // At p = 2 the principal units are 1 mod 4.
        assert!(padic_log(&q(5, 1, 2, 12), 10).is_ok());
    }

    #[test]
    fn padic_log_homomorphism_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let p = *[3u64, 5, 7].iter().nth(rng.gen_range(0..3)).unwrap();
            let a = 1 + p as i64 * rng.gen_range(1..30i64);
            let b = 1 + p as i64 * rng.gen_range(1..30i64);
            let (u, v) = (q(a, 1, p, 12), q(b, 1, p, 12));
            let uv = u.checked_mul(&v).unwrap();
            let lhs = padic_log(&uv, 12).unwrap();
            let rhs = padic_log(&u, 12)
                .unwrap()
                .checked_add(&padic_log(&v, 12).unwrap())
                .unwrap();
            assert!(lhs.agrees_with(&rhs), "log({} * {}) at p={}", a, b, p);
        }
    }

    #[test]
    fn unit_decomposition() {
        // x = p -> (1, 1, 1).
        let d = unit_decompose(&q(5, 1, 5, 8)).unwrap();
        assert_eq!(d.exponent, 1);
        assert!(d.teich.agrees_with(&q(1, 1, 5, 8)));
        assert!(d.principal.agrees_with(&q(1, 1, 5, 8)));
        assert_eq!(d.nu, 1);

        // x = 2 at p = 5: parts multiply back to 2.
        let x = q(2, 1, 5, 8);
        let d = unit_decompose(&x).unwrap();
        assert_eq!(d.exponent, 0);
        assert_eq!(d.teich, teichmuller(2, 5, 8));
        let back = d.teich.checked_mul(&d.principal).unwrap();
        assert!(back.agrees_with(&x));
        // principal = 1 (mod p).
        assert_eq!(d.principal.digits()[0], 1);

        // x = -1 at p = 2 -> (0, -1, 1).
        let neg1 = q(-1, 1, 2, 8);
        let d = unit_decompose(&neg1).unwrap();
        assert_eq!(d.exponent, 0);
        assert!(d.teich.agrees_with(&neg1));
        assert!(d.principal.agrees_with(&q(1, 1, 2, 8)));
        assert_eq!(d.nu, 2);

        assert_eq!(
            unit_decompose(&PAdicNumber::zero(5, 3)),
            Err(PAdicError::ZeroInput)
        );
    }

    #[test]
    fn unit_decompose_reassembles_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let p = *[2u64, 3, 5, 7, 13].iter().nth(rng.gen_range(0..5)).unwrap();
            let num = rng.gen_range(-500..500i64);
            let den = rng.gen_range(1..500i64);
            if num == 0 {
                continue;
            }
            let x = q(num, den, p, 9);
            let d = unit_decompose(&x).unwrap();
            let ppow = q(p as i64, 1, p, 9 + d.exponent.unsigned_abs() as usize);
            let mut back = d.teich.checked_mul(&d.principal).unwrap();
            for _ in 0..d.exponent.abs() {
                back = if d.exponent > 0 {
                    back.checked_mul(&ppow).unwrap()
                } else {
                    back.checked_div(&ppow).unwrap()
                };
            }
            assert!(back.agrees_with(&x), "{}/{} at p={}", num, den, p);
            // principal = 1 (mod p^nu)
            let pr = d.principal.unit_lift();
            assert!(((&pr - 1u32) % ppow_test(p, d.nu as usize)).is_zero());
        }
    }

    fn ppow_test(p: u64, k: usize) -> BigUint {
        BigUint::from(p).pow(k as u32)
    }

    #[test]
    fn polynomial_parse_and_display() {
        let f: IntPolynomial = "x^2 - 2".parse().unwrap();
        assert_eq!(f, IntPolynomial::from_i64(&[-2, 0, 1]));
        let f: IntPolynomial = "x^4-1".parse().unwrap();
        assert_eq!(f, IntPolynomial::from_i64(&[-1, 0, 0, 0, 1]));
        let f: IntPolynomial = "3*x^3 + 2x - 7".parse().unwrap();
        assert_eq!(f, IntPolynomial::from_i64(&[-7, 2, 0, 3]));
        let f: IntPolynomial = "-x + 5".parse().unwrap();
        assert_eq!(f, IntPolynomial::from_i64(&[5, -1]));
        assert_eq!(
            IntPolynomial::from_i64(&[-2, 0, 1]).to_string(),
            "x^2 - 2"
        );
        assert!("x^".parse::<IntPolynomial>().is_err());
    }
}
