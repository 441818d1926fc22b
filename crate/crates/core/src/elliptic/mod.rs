//! Elliptic curves over Q: generalized Weierstrass models with Tate's
//! invariants, the chord-tangent group law in exact rational arithmetic,
//! reduction mod p with character-sum point counting, Nagell-Lutz torsion
//! under Mazur's classification, and the L-series machinery up to a
//! numerical rank estimate.

mod lfunc;

pub use lfunc::{l_coefficients, l_value, rank_estimate, term_count, LEvaluator, LMode, LSeriesProfile};

use crate::modular::{self, is_prime};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EllipticError {
    PointNotOnCurve,
    SingularCurve,
    BadReduction(u64),
    NeedConductor,
    NeedRootNumber,
    OutOfConvergenceRegion,
    SIsOne,
    /// Torsion computation produced a group outside Mazur's list; this
    /// signals an implementation bug, not a mathematical event.
    MazurViolation(String),
}

impl EllipticError {
    pub fn name(&self) -> &'static str {
        match self {
            EllipticError::PointNotOnCurve => "PointNotOnCurve",
            EllipticError::SingularCurve => "SingularCurve",
            EllipticError::BadReduction(_) => "BadReduction",
            EllipticError::NeedConductor => "NeedConductor",
            EllipticError::NeedRootNumber => "NeedRootNumber",
            EllipticError::OutOfConvergenceRegion => "OutOfConvergenceRegion",
            EllipticError::SIsOne => "SIsOne",
            EllipticError::MazurViolation(_) => "MazurViolation",
        }
    }
}

impl fmt::Display for EllipticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipticError::PointNotOnCurve => write!(f, "point does not satisfy the curve equation"),
            EllipticError::SingularCurve => write!(f, "curve is singular (discriminant 0)"),
            EllipticError::BadReduction(p) => write!(f, "bad reduction at {}", p),
            EllipticError::NeedConductor => write!(
                f,
                "conductor unknown (minimal discriminant is not squarefree); pass it explicitly"
            ),
            EllipticError::NeedRootNumber => write!(
                f,
                "root number could not be determined; pass it explicitly"
            ),
            EllipticError::OutOfConvergenceRegion => {
                write!(f, "Euler product needs Re(s) > 3/2")
            }
            EllipticError::SIsOne => write!(f, "rank estimator needs s != 1"),
            EllipticError::MazurViolation(msg) => {
                write!(f, "torsion outside Mazur's list (internal bug): {}", msg)
            }
        }
    }
}

impl std::error::Error for EllipticError {}

fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub a1: BigRational,
    pub a2: BigRational,
    pub a3: BigRational,
    pub a4: BigRational,
    pub a6: BigRational,
}

/// Tate's quantities b2, b4, b6, b8, c4, c6, the discriminant and the
/// j-invariant (absent when the curve is singular).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TateInvariants {
    pub b2: BigRational,
    pub b4: BigRational,
    pub b6: BigRational,
    pub b8: BigRational,
    pub c4: BigRational,
    pub c6: BigRational,
    pub disc: BigRational,
    pub j: Option<BigRational>,
}

/// Projective point in affine or at-infinity form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ECPoint {
    Infinity,
    Affine(BigRational, BigRational),
}

impl ECPoint {
    pub fn affine_i64(x: i64, y: i64) -> Self {
        ECPoint::Affine(rat(x), rat(y))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ECPoint::Infinity)
    }
}

impl fmt::Display for ECPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ECPoint::Infinity => write!(f, "O"),
            ECPoint::Affine(x, y) => write!(f, "({}, {})", x, y),
        }
    }
}

/// Reduction behaviour of a curve at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionType {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl fmt::Display for ReductionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionType::Good => write!(f, "good"),
            ReductionType::SplitMultiplicative => write!(f, "split multiplicative"),
            ReductionType::NonsplitMultiplicative => write!(f, "nonsplit multiplicative"),
            ReductionType::Additive => write!(f, "additive"),
        }
    }
}

impl WeierstrassCurve {
    pub fn new(
        a1: BigRational,
        a2: BigRational,
        a3: BigRational,
        a4: BigRational,
        a6: BigRational,
    ) -> Self {
        WeierstrassCurve { a1, a2, a3, a4, a6 }
    }

    /// Curve from `[a1, a2, a3, a4, a6]`, PARI's ellinit order.
    pub fn from_list(a: [i64; 5]) -> Self {
        WeierstrassCurve::new(rat(a[0]), rat(a[1]), rat(a[2]), rat(a[3]), rat(a[4]))
    }

    /// Short form y^2 = x^3 + a x + b.
    pub fn short(a: i64, b: i64) -> Self {
        Self::from_list([0, 0, 0, a, b])
    }

    pub fn coefficients(&self) -> [&BigRational; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn tate_invariants(&self) -> TateInvariants {
        let b2 = &self.a1 * &self.a1 + rat(4) * &self.a2;
        let b4 = rat(2) * &self.a4 + &self.a1 * &self.a3;
        let b6 = &self.a3 * &self.a3 + rat(4) * &self.a6;
        // b8 is pinned by 4 b8 = b2 b6 - b4^2.
        let b8 = (&b2 * &b6 - &b4 * &b4) / rat(4);
        let c4 = &b2 * &b2 - rat(24) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + rat(36) * &b2 * &b4 - rat(216) * &b6;
        let disc = -(&b2 * &b2 * &b8) - rat(8) * &b4 * &b4 * &b4 - rat(27) * &b6 * &b6
            + rat(9) * &b2 * &b4 * &b6;
        let j = if disc.is_zero() {
            None
        } else {
            Some(&c4 * &c4 * &c4 / &disc)
        };
        TateInvariants {
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
            j,
        }
    }

    pub fn discriminant(&self) -> BigRational {
        self.tate_invariants().disc
    }

    pub fn is_nonsingular(&self) -> bool {
        !self.discriminant().is_zero()
    }

    /// Does (x, y) satisfy the curve equation exactly?
    pub fn contains(&self, p: &ECPoint) -> bool {
        match p {
            ECPoint::Infinity => true,
            ECPoint::Affine(x, y) => {
                let lhs = y * y + &self.a1 * x * y + &self.a3 * y;
                let rhs = x * x * x + &self.a2 * x * x + &self.a4 * x + &self.a6;
                lhs == rhs
            }
        }
    }

    /// -(x, y) = (x, -y - a1 x - a3).
    pub fn negate(&self, p: &ECPoint) -> ECPoint {
        match p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine(x, y) => {
                ECPoint::Affine(x.clone(), -y - &self.a1 * x - &self.a3)
            }
        }
    }

    /// Chord-tangent addition; specializes to the classical two-slope
    /// formulas on short curves.
    pub fn add_points(&self, p: &ECPoint, q: &ECPoint) -> Result<ECPoint, EllipticError> {
        if !self.is_nonsingular() {
            return Err(EllipticError::SingularCurve);
        }
        if !self.contains(p) || !self.contains(q) {
            return Err(EllipticError::PointNotOnCurve);
        }
        let (x1, y1) = match p {
            ECPoint::Infinity => return Ok(q.clone()),
            ECPoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match q {
            ECPoint::Infinity => return Ok(p.clone()),
            ECPoint::Affine(x, y) => (x, y),
        };
        let (lambda, nu) = if x1 != x2 {
            let lambda = (y2 - y1) / (x2 - x1);
            let nu = (y1 * x2 - y2 * x1) / (x2 - x1);
            (lambda, nu)
        } else if q == &self.negate(p) {
            return Ok(ECPoint::Infinity);
        } else {
            // Tangent line at p = q.
            let denom = rat(2) * y1 + &self.a1 * x1 + &self.a3;
            let lambda = (rat(3) * x1 * x1 + rat(2) * &self.a2 * x1 + &self.a4
                - &self.a1 * y1)
                / &denom;
            let nu = (-(x1 * x1 * x1) + &self.a4 * x1 + rat(2) * &self.a6 - &self.a3 * y1)
                / &denom;
            (lambda, nu)
        };
        let x3 = &lambda * &lambda + &self.a1 * &lambda - &self.a2 - x1 - x2;
        let y3 = -(&lambda + &self.a1) * &x3 - &nu - &self.a3;
        Ok(ECPoint::Affine(x3, y3))
    }

    /// k P by double-and-add; negative k negates the point first.
    pub fn multiply(&self, k: i64, p: &ECPoint) -> Result<ECPoint, EllipticError> {
        if !self.contains(p) {
            return Err(EllipticError::PointNotOnCurve);
        }
        if k == 0 {
            return Ok(ECPoint::Infinity);
        }
        let base = if k < 0 { self.negate(p) } else { p.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = ECPoint::Infinity;
        let mut cur = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_points(&acc, &cur)?;
            }
            k >>= 1;
            if k > 0 {
                cur = self.add_points(&cur, &cur)?;
            }
        }
        Ok(acc)
    }

    /// Equivalent integral short model Y^2 = X^3 + A X + B with the change
    /// of coordinates X = e^2 (36 x + 3 b2), Y = e^3 (216 y + 108 a1 x +
    /// 108 a3); returns (A, B, e).
    pub fn short_integral_model(&self) -> (BigInt, BigInt, BigInt) {
        let t = self.tate_invariants();
        let a = rat(-27) * &t.c4;
        let b = rat(-54) * &t.c6;
        // Clear denominators with the smallest e: e^4 A, e^6 B integral.
        let mut e = BigInt::one();
        for (r, pow) in [(&a, 4u32), (&b, 6u32)] {
            for (p, k) in modular::factorize(r.denom().magnitude().to_u64().expect("desk scale")) {
                let need = (k + pow - 1) / pow; // ceil(k / pow)
                let cand = BigInt::from(p).pow(need);
                let cur = big_ord_int(&e, p);
                if cur < need {
                    e = &e / BigInt::from(p).pow(cur) * cand;
                }
            }
        }
        let er = BigRational::from(e.clone());
        let a_int = (&a * er.pow(4)).to_integer();
        let b_int = (&b * er.pow(6)).to_integer();
        (a_int, b_int, e)
    }

    /// Pulls a point of the short model from `short_integral_model` back to
    /// this curve.
    pub fn from_short_point(&self, p: &ECPoint, e: &BigInt) -> ECPoint {
        match p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine(xx, yy) => {
                let t = self.tate_invariants();
                let e2 = BigRational::from(e.clone()).pow(2);
                let e3 = BigRational::from(e.clone()).pow(3);
                let x = (xx / e2 - rat(3) * &t.b2) / rat(36);
                let y = (yy / e3 - rat(108) * &self.a1 * &x - rat(108) * &self.a3) / rat(216);
                ECPoint::Affine(x, y)
            }
        }
    }

    fn coeff_mod_p(&self, p: u64) -> Result<[u64; 5], EllipticError> {
        let pb = BigInt::from(p);
        let mut out = [0u64; 5];
        for (i, c) in self.coefficients().into_iter().enumerate() {
            if (c.denom() % &pb).is_zero() {
                return Err(EllipticError::BadReduction(p));
            }
            let d_inv = modular::mod_inv(c.denom().mod_floor(&pb).to_i64().unwrap(), p).unwrap();
            let n = c.numer().mod_floor(&pb).to_u64().unwrap();
            out[i] = n * d_inv % p;
        }
        Ok(out)
    }

    /// Reduced short-model coefficients (A, B) mod p, for p >= 5 not
    /// dividing the coefficient denominators.
    fn short_mod_p(&self, p: u64) -> Result<(u64, u64), EllipticError> {
        debug_assert!(p >= 5);
        let t = self.tate_invariants();
        let pb = BigInt::from(p);
        let mut vals = [0u64; 2];
        for (i, r) in [rat(-27) * &t.c4, rat(-54) * &t.c6].iter().enumerate() {
            if (r.denom() % &pb).is_zero() {
                return Err(EllipticError::BadReduction(p));
            }
            let d_inv = modular::mod_inv(r.denom().mod_floor(&pb).to_i64().unwrap(), p).unwrap();
            let n = r.numer().mod_floor(&pb).to_u64().unwrap();
            vals[i] = n * d_inv % p;
        }
        Ok((vals[0], vals[1]))
    }

    fn disc_divisible_by(&self, p: u64) -> bool {
        let d = self.discriminant();
        let pb = BigInt::from(p);
        // At primes dividing the denominator the model is not reducible
        // as-is; treat as bad.
        (d.denom() % &pb).is_zero() || (d.numer() % &pb).is_zero()
    }

    /// Number of points of the reduced curve over F_p (including infinity)
    /// at a prime of good reduction.
    ///
    /// For p >= 5 this is the character sum p + 1 + sum chi(x^3 + Ax + B);
    /// p = 2, 3 are counted by direct enumeration of the general equation.
    pub fn count_points_mod_p(&self, p: u64) -> Result<u64, EllipticError> {
        assert!(is_prime(p), "p must be prime");
        if self.disc_divisible_by(p) {
            return Err(EllipticError::BadReduction(p));
        }
        if p < 5 {
            let a = self.coeff_mod_p(p)?;
            let mut count = 1u64; // infinity
            for x in 0..p {
                for y in 0..p {
                    let lhs = (y * y + a[0] * x * y + a[2] * y) % p;
                    let rhs = (x * x * x + a[1] * x * x + a[3] * x + a[4]) % p;
                    if lhs == rhs {
                        count += 1;
                    }
                }
            }
            return Ok(count);
        }
        let (a, b) = self.short_mod_p(p)?;
        // 1 + chi(v) solutions of y^2 = v over each x.
        let mut ys_for = vec![1u64; p as usize];
        let mut sq = vec![false; p as usize];
        for y in 1..p {
            sq[(y as u128 * y as u128 % p as u128) as usize] = true;
        }
        for v in 1..p as usize {
            ys_for[v] = if sq[v] { 2 } else { 0 };
        }
        let mut count = 1u64;
        for x in 0..p as u128 {
            let v = ((x * x % p as u128 * x + a as u128 * x + b as u128) % p as u128) as usize;
            count += ys_for[v];
        }
        Ok(count)
    }

    /// Reduction type at p. Good primes report `Good`; at bad primes the
    /// node's tangent slopes decide split vs nonsplit, a cusp is additive.
    pub fn reduction_type(&self, p: u64) -> Result<ReductionType, EllipticError> {
        assert!(is_prime(p), "p must be prime");
        if !self.disc_divisible_by(p) {
            return Ok(ReductionType::Good);
        }
        let d = self.discriminant();
        if (d.denom() % BigInt::from(p)).is_zero() {
            // Denominator primes need a rescaled model first.
            return Err(EllipticError::BadReduction(p));
        }
        if p >= 5 {
            let (a, b) = self.short_mod_p(p)?;
            if a == 0 && b == 0 {
                return Ok(ReductionType::Additive);
            }
            // Double root of x^3 + ax + b: alpha = -3b / 2a; the node is
            // (alpha, 0) and the tangent slopes are +-sqrt(3 alpha).
            let inv = modular::mod_inv((2 * a % p) as i64, p).expect("a != 0 mod p");
            let alpha = (p - 3 % p) as u128 * b as u128 % p as u128 * inv as u128 % p as u128;
            let slope2 = (3 * alpha % p as u128 * 1) % p as u128;
            if slope2 == 0 {
                return Ok(ReductionType::Additive);
            }
            return Ok(
                if modular::legendre_symbol(slope2 as i64, p).unwrap() == 1 {
                    ReductionType::SplitMultiplicative
                } else {
                    ReductionType::NonsplitMultiplicative
                },
            );
        }
        // p = 2, 3: count smooth points; the smooth locus has p - a_p
        // points with a_p in {1, -1, 0}.
        let smooth = self.smooth_count_mod_p(p)?;
        Ok(match p as i64 - smooth as i64 {
            1 => ReductionType::SplitMultiplicative,
            -1 => ReductionType::NonsplitMultiplicative,
            0 => ReductionType::Additive,
            _ => unreachable!("smooth count out of range"),
        })
    }

    /// Number of nonsingular F_p points (including infinity) of the reduced
    /// curve; used at bad primes.
    fn smooth_count_mod_p(&self, p: u64) -> Result<u64, EllipticError> {
        let a = self.coeff_mod_p(p)?;
        let m = p as i128;
        let f = |x: i128, y: i128| -> i128 {
            (y * y + a[0] as i128 * x * y + a[2] as i128 * y
                - x * x * x
                - a[1] as i128 * x * x
                - a[3] as i128 * x
                - a[4] as i128)
                .rem_euclid(m)
        };
        // Partials of F = y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6.
        let fx = |x: i128, y: i128| -> i128 {
            (a[0] as i128 * y - 3 * x * x - 2 * a[1] as i128 * x - a[3] as i128).rem_euclid(m)
        };
        let fy = |x: i128, y: i128| -> i128 {
            (2 * y + a[0] as i128 * x + a[2] as i128).rem_euclid(m)
        };
        let mut count = 1u64; // infinity is always smooth on a Weierstrass model
        for x in 0..m {
            for y in 0..m {
                if f(x, y) == 0 && !(fx(x, y) == 0 && fy(x, y) == 0) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Dirichlet coefficient a_p: p + 1 - N_p at good primes; 1, -1, 0 for
    /// split, nonsplit and additive reduction.
    pub fn ap(&self, p: u64) -> Result<i64, EllipticError> {
        match self.reduction_type(p)? {
            ReductionType::Good => {
                let n = self.count_points_mod_p(p)?;
                Ok(p as i64 + 1 - n as i64)
            }
            ReductionType::SplitMultiplicative => Ok(1),
            ReductionType::NonsplitMultiplicative => Ok(-1),
            ReductionType::Additive => Ok(0),
        }
    }
}

fn big_ord_int(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return 0;
    }
    let mut v = 0;
    let mut m = n.magnitude().clone();
    let pb = BigUint::from(p);
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        m = q;
    }
}

/// Abstract shape of the rational torsion subgroup; always one of Mazur's
/// fifteen groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsionStructure {
    /// Z/nZ with n <= 10 or n = 12 (n = 1 is the trivial group).
    Cyclic(u32),
    /// Z/2Z x Z/2nZ with n <= 4.
    TwoCross(u32),
}

impl fmt::Display for TorsionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorsionStructure::Cyclic(1) => write!(f, "trivial"),
            TorsionStructure::Cyclic(n) => write!(f, "Z/{}Z", n),
            TorsionStructure::TwoCross(n) => write!(f, "Z/2Z x Z/{}Z", 2 * n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionSubgroup {
    pub structure: TorsionStructure,
    pub order: u32,
    /// All affine torsion points, on the original model.
    pub points: Vec<ECPoint>,
    /// Generators realizing the structure, on the original model.
    pub generators: Vec<ECPoint>,
}

/// Rational torsion via Nagell-Lutz on an integral short model: candidates
/// have y = 0 or y^2 dividing the discriminant; each is kept only if some
/// multiple kP with k <= 12 hits O.
pub fn torsion_subgroup(curve: &WeierstrassCurve) -> Result<TorsionSubgroup, EllipticError> {
    if !curve.is_nonsingular() {
        return Err(EllipticError::SingularCurve);
    }
    let (a, b, e) = curve.short_integral_model();
    let short = WeierstrassCurve::new(
        rat(0),
        rat(0),
        rat(0),
        BigRational::from(a.clone()),
        BigRational::from(b.clone()),
    );
    // D = 4A^3 + 27B^2 up to sign and the factor 16 of the full
    // discriminant; candidate y's satisfy y^2 | 16 |D|.
    let d: BigInt = (BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b) * 16;
    let d_abs = d
        .magnitude()
        .to_u64()
        .filter(|&v| v <= u64::MAX / 2)
        .expect("torsion sweep supports short-model discriminants up to 2^63");
    let mut y_candidates: Vec<BigInt> = vec![BigInt::zero()];
    for y in square_divisor_roots(d_abs) {
        y_candidates.push(BigInt::from(y));
    }

    let mut torsion: Vec<(ECPoint, u32)> = Vec::new(); // short-model points
    for y in &y_candidates {
        let y2 = y * y;
        for x in monic_cubic_integer_roots(&a, &(&b - &y2)) {
            for sign in [1i64, -1] {
                let yy = y * BigInt::from(sign);
                if sign == -1 && y.is_zero() {
                    continue;
                }
                let p = ECPoint::Affine(BigRational::from(x.clone()), BigRational::from(yy));
                debug_assert!(short.contains(&p));
                if let Some(order) = torsion_order(&short, &p) {
                    if !torsion.iter().any(|(q, _)| q == &p) {
                        torsion.push((p, order));
                    }
                }
            }
        }
    }

    let n = torsion.len() as u32 + 1;
    let two_torsion: Vec<ECPoint> = torsion
        .iter()
        .filter(|(_, ord)| *ord == 2)
        .map(|(p, _)| p.clone())
        .collect();
    let max_order = torsion.iter().map(|&(_, o)| o).max().unwrap_or(1);

    let (structure, short_gens): (TorsionStructure, Vec<ECPoint>) = match two_torsion.len() {
        0 | 1 => {
            if max_order != n && n > 1 {
                return Err(EllipticError::MazurViolation(format!(
                    "no generator: {} points but max order {}",
                    n, max_order
                )));
            }
            let gens = if n == 1 {
                vec![]
            } else {
                vec![torsion
                    .iter()
                    .find(|&&(_, o)| o == n)
                    .map(|(p, _)| p.clone())
                    .unwrap()]
            };
            (TorsionStructure::Cyclic(n), gens)
        }
        3 => {
            if n % 4 != 0 || max_order != n / 2 {
                return Err(EllipticError::MazurViolation(format!(
                    "full 2-torsion with order {} and max element order {}",
                    n, max_order
                )));
            }
            let p = torsion
                .iter()
                .find(|&&(_, o)| o == max_order)
                .map(|(p, _)| p.clone())
                .unwrap();
            // The order-2 element inside <p> is (max_order / 2) p.
            let inside = short.multiply(max_order as i64 / 2, &p)?;
            let q = two_torsion
                .iter()
                .find(|&t| t != &inside)
                .cloned()
                .ok_or_else(|| {
                    EllipticError::MazurViolation("no independent 2-torsion".into())
                })?;
            (TorsionStructure::TwoCross(n / 4), vec![p, q])
        }
        k => {
            return Err(EllipticError::MazurViolation(format!(
                "{} elements of order 2",
                k
            )))
        }
    };

    // Mazur's theorem pins the possibilities.
    let legal = match structure {
        TorsionStructure::Cyclic(m) => (1..=10).contains(&m) || m == 12,
        TorsionStructure::TwoCross(m) => (1..=4).contains(&m),
    };
    if !legal {
        return Err(EllipticError::MazurViolation(format!("{}", structure)));
    }

    let points = torsion
        .iter()
        .map(|(p, _)| curve.from_short_point(p, &e))
        .collect::<Vec<_>>();
    for p in &points {
        debug_assert!(curve.contains(p));
    }
    let generators = short_gens
        .iter()
        .map(|p| curve.from_short_point(p, &e))
        .collect();
    Ok(TorsionSubgroup {
        structure,
        order: n,
        points,
        generators,
    })
}

/// Order of P if it is torsion of order <= 12, else None.
fn torsion_order(curve: &WeierstrassCurve, p: &ECPoint) -> Option<u32> {
    let mut acc = ECPoint::Infinity;
    for k in 1..=12u32 {
        acc = curve.add_points(&acc, p).ok()?;
        if acc.is_infinity() {
            return Some(k);
        }
    }
    None
}

/// All y > 0 with y^2 dividing n.
fn square_divisor_roots(n: u64) -> Vec<u64> {
    if n == 0 {
        return vec![];
    }
    let fac = modular::factorize(n);
    let mut out = vec![1u64];
    for (p, e) in fac {
        let half = e / 2;
        if half == 0 {
            continue;
        }
        let mut next = Vec::new();
        for v in &out {
            let mut pk = 1u64;
            for _ in 0..=half {
                next.push(v * pk);
                pk *= p;
            }
        }
        out = next;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Integer roots of x^3 + a x + c.
fn monic_cubic_integer_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let eval = |x: &BigInt| x * x * x + a * x + c;
    let mut roots = Vec::new();
    if c.is_zero() {
        roots.push(BigInt::zero());
        // x^2 = -a
        if a.is_negative() || a.is_zero() {
            let m = (-a).to_biguint().unwrap();
            let s = m.sqrt();
            if &s * &s == m {
                roots.push(BigInt::from(s.clone()));
                roots.push(-BigInt::from(s));
            }
        }
    } else {
        let cu = c.magnitude().to_u64();
        match cu {
            Some(cu) => {
                for d in all_divisors(cu) {
                    for sign in [1i64, -1] {
                        let x = BigInt::from(d) * BigInt::from(sign);
                        if eval(&x).is_zero() {
                            roots.push(x);
                        }
                    }
                }
            }
            None => unreachable!("constant term bounded by the discriminant sweep limit"),
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn all_divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in modular::factorize(n) {
        let mut next = Vec::new();
        for v in &out {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(v * pk);
                pk *= p;
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Rational points of the node curve y^2 = x^2 + x^3 via the secant
/// parametrization (x, y) = (t^2 - 1, t (t^2 - 1)).
pub fn singular_cubic_parametrize(t: &BigRational) -> (BigRational, BigRational) {
    let x = t * t - rat(1);
    let y = t * &x;
    (x, y)
}

/// The x-coordinate printed in the source for the generator of
/// y^2 = x^3 + 877x (42- and 40-digit numerator/denominator).
pub const GENERATOR_877_X_NUM: &str = "375494528127162193105504069942092792346201";
pub const GENERATOR_877_X_DEN: &str = "6215987776871505425463220780697238044100";

/// Is x^3 + 877x a square of a rational? Decided exactly: in lowest terms
/// a nonnegative rational is a square iff numerator and denominator are
/// perfect squares.
pub fn is_x_on_877_curve(x: &BigRational) -> bool {
    let v = x * x * x + rat(877) * x;
    if v.is_negative() {
        return false;
    }
    if v.is_zero() {
        return true;
    }
    let n = v.numer().magnitude();
    let d = v.denom().magnitude();
    let sn = n.sqrt();
    let sd = d.sqrt();
    &sn * &sn == *n && &sd * &sd == *d
}

/// Verifies the printed generator x-coordinate lies on y^2 = x^3 + 877x.
pub fn check_generator_877() -> bool {
    let x = BigRational::new(
        GENERATOR_877_X_NUM.parse().unwrap(),
        GENERATOR_877_X_DEN.parse().unwrap(),
    );
    is_x_on_877_curve(&x)
}
