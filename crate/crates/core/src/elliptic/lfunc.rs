//! L-series of an elliptic curve: Dirichlet coefficients by point counting,
//! the Euler-product evaluation for Re(s) > 3/2, and the analytic
//! continuation through the incomplete-gamma series for the completed
//! function Lambda(s) = (sqrt(N)/2pi)^s Gamma(s) L(s) with
//! Lambda(s) = w Lambda(2 - s).
//!
//! The truncated series needs absolute accuracy far below the size of
//! L(E, s) near s = 1 (for a rank-3 curve that is ~1e-12 at s = 1.0001), so
//! all analytic work happens on 320-bit binary floats; f64 would lose the
//! numerator of the logarithmic-derivative estimator entirely.

use super::{EllipticError, ReductionType, WeierstrassCurve};
use crate::modular;
use dashu_float::{ops::Abs, round::mode::HalfEven, FBig};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::sync::OnceLock;

pub(crate) type BF = FBig<HalfEven, 2>;
const PREC: usize = 320;

fn bf_i(n: i64) -> BF {
    FBig::from(n).with_precision(PREC).value()
}

fn bf_f(x: f64) -> BF {
    FBig::try_from(x)
        .expect("finite float")
        .with_precision(PREC)
        .value()
}

fn to_f64(x: &BF) -> f64 {
    x.to_f64().value()
}

fn bf_ratio(n: i64, d: i64) -> BF {
    bf_i(n) / bf_i(d)
}

/// atan(1/k) by the alternating power series, exact integer base.
fn atan_inv(k: i64) -> BF {
    let k2 = bf_i(k * k);
    let mut term = bf_ratio(1, k);
    let mut sum = term.clone();
    let mut n = 1i64;
    let floor = bf_f(0.5).powi((PREC as i64 + 16).into());
    loop {
        term = term / &k2;
        n += 2;
        let contrib = &term / bf_i(n);
        if n % 4 == 1 {
            sum += &contrib;
        } else {
            sum -= &contrib;
        }
        if bf_abs(&contrib) < floor {
            return sum;
        }
    }
}

/// pi by Machin's formula.
pub(crate) fn pi() -> &'static BF {
    static PI: OnceLock<BF> = OnceLock::new();
    PI.get_or_init(|| bf_i(16) * atan_inv(5) - bf_i(4) * atan_inv(239))
}

/// Euler-Mascheroni constant by the Brent-McMillan AGM-free form:
/// gamma = A(n)/B(n) - ln n with A = sum (n^k/k!)^2 H_k, B = sum (n^k/k!)^2;
/// the error is O(e^(-4n)).
fn euler_gamma() -> &'static BF {
    static GAMMA: OnceLock<BF> = OnceLock::new();
    GAMMA.get_or_init(|| {
        let n = 64i64;
        let nb = bf_i(n);
        let mut t = bf_i(1); // (n^k / k!)^2
        let mut h = bf_i(0); // H_k
        let mut a = bf_i(0);
        let mut b = bf_i(1);
        let floor = bf_f(0.5).powi((PREC as i64 + 32).into());
        let mut k = 1i64;
        loop {
            t = t * &nb * &nb / bf_i(k * k);
            h += bf_ratio(1, k);
            a += &t * &h;
            b += &t;
            // Past k = 4n the terms collapse geometrically.
            if k > 4 * n && &t / &b < floor {
                break;
            }
            k += 1;
        }
        a / b - nb.ln()
    })
}

/// Bernoulli numbers B_2..B_30 as (numerator, denominator).
const BERNOULLI: [(i64, i64); 15] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
];

/// ln Gamma(z) for z > 0: Stirling's series after shifting z up by 60.
fn ln_gamma(z: &BF) -> BF {
    const SHIFT: i64 = 60;
    let mut shift_log = bf_i(0);
    for j in 0..SHIFT {
        shift_log += (z + bf_i(j)).ln();
    }
    let w = z + bf_i(SHIFT);
    let half = bf_ratio(1, 2);
    let two_pi = bf_i(2) * pi();
    let mut s = (&w - &half) * w.clone().ln() - &w + half * two_pi.ln();
    let w2 = &w * &w;
    let mut wpow = w.clone(); // w^(2k-1)
    for (k, (bn, bd)) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as i64;
        s += bf_i(*bn) / (bf_i(*bd) * bf_i(2 * k * (2 * k - 1)) * &wpow);
        wpow = wpow * &w2;
    }
    s - shift_log
}

fn gamma_fn(z: &BF) -> BF {
    ln_gamma(z).exp()
}

fn bf_abs(x: &BF) -> BF {
    Abs::abs(x.clone())
}

/// Convergence floor for the special-function iterations.
fn eps() -> BF {
    bf_f(0.5).powi((PREC as i64 - 10).into())
}

/// Upper incomplete gamma Gamma(a, x) for x > 0 and a in roughly [-2, 4].
///
/// Series for the lower function when x < a + 1, continued fraction
/// otherwise; arguments below a = 1/4 are raised by the recurrence
/// Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a, with the exponential
/// integral E_1 covering a = 0.
fn upper_inc_gamma(a: &BF, x: &BF) -> BF {
    debug_assert!(x > &bf_i(0));
    let quarter = bf_ratio(1, 4);
    if bf_abs(a) < bf_f(1e-60) {
        return exp_integral_e1(x);
    }
    if a < &quarter {
        let ap1 = a + bf_i(1);
        let xa = (a * x.clone().ln()).exp();
        let emx = (-x.clone()).exp();
        return (upper_inc_gamma(&ap1, x) - xa * emx) / a;
    }
    if x < &(a + bf_i(1)) {
        // Gamma(a) - x^a e^-x sum x^n / (a (a+1) ... (a+n)).
        let mut denom = a.clone();
        let mut term = bf_i(1) / a;
        let mut sum = term.clone();
        let e = eps();
        for _ in 0..100_000 {
            denom += bf_i(1);
            term = term * x / &denom;
            sum += &term;
            if bf_abs(&term) < bf_abs(&sum) * &e {
                break;
            }
        }
        let xa = (a * x.clone().ln()).exp();
        let emx = (-x.clone()).exp();
        gamma_fn(a) - xa * emx * sum
    } else {
        cf_upper_gamma(a, x)
    }
}

/// Lentz continued fraction for Gamma(a, x), valid for x >= a + 1 and for
/// any a when x >= 1.
fn cf_upper_gamma(a: &BF, x: &BF) -> BF {
    let tiny = bf_f(0.5).powi((4 * PREC as i64).into());
    let e = eps();
    let mut b = x + bf_i(1) - a;
    if b == bf_i(0) {
        b = tiny.clone();
    }
    let mut c = bf_i(1) / &tiny;
    let mut d = bf_i(1) / &b;
    let mut h = d.clone();
    for i in 1..100_000i64 {
        let an = -bf_i(i) * (bf_i(i) - a);
        b += bf_i(2);
        d = &an * d + &b;
        if d == bf_i(0) {
            d = tiny.clone();
        }
        c = &b + &an / c;
        if c == bf_i(0) {
            c = tiny.clone();
        }
        d = bf_i(1) / d;
        let delta = &d * &c;
        h *= &delta;
        if bf_abs(&(delta - bf_i(1))) < e {
            break;
        }
    }
    let xa = (a * x.clone().ln()).exp();
    let emx = (-x.clone()).exp();
    xa * emx * h
}

/// E_1(x) = Gamma(0, x): series below 1, continued fraction above.
fn exp_integral_e1(x: &BF) -> BF {
    if x >= &bf_i(1) {
        return cf_upper_gamma(&bf_i(0), x);
    }
    let e = eps();
    let mut term = bf_i(1);
    let mut sum = bf_i(0);
    for k in 1..100_000i64 {
        term = term * (-x.clone()) / bf_i(k);
        let contrib = &term / bf_i(k);
        sum += &contrib;
        if bf_abs(&contrib) < e {
            break;
        }
    }
    -euler_gamma().clone() - x.clone().ln() - sum
}

/// Evaluation strategy for L(E, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LMode {
    /// Finite product over primes up to the cut (plus bad-prime factors);
    /// valid for s > 3/2.
    EulerProduct { cut: u64 },
    /// Incomplete-gamma series for the completed function; valid on the
    /// whole line. `terms: None` picks the count from the tail bound.
    Analytic { terms: Option<usize> },
}

/// Conductor, root number and Dirichlet coefficients of a curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSeriesProfile {
    pub conductor: u64,
    pub root_number: Option<i32>,
    /// a_1 .. a_n, 1-indexed as coeffs[n-1].
    pub coeffs: Vec<i64>,
    pub bad_primes: Vec<(u64, ReductionType)>,
}

/// Dirichlet coefficients a_1..a_{n_max} by multiplicative extension of the
/// point counts: a_{p^k} = a_p a_{p^(k-1)} - p a_{p^(k-2)} at good p and
/// a_{p^k} = a_p^k at bad p.
pub fn l_coefficients(
    curve: &WeierstrassCurve,
    n_max: usize,
) -> Result<Vec<i64>, EllipticError> {
    if n_max == 0 {
        return Ok(vec![]);
    }
    // Smallest-prime-factor sieve for the multiplicative assembly.
    let mut spf = vec![0usize; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut good = vec![true; n_max + 1];
    let mut ap = vec![0i64; n_max + 1];
    for p in modular::primes_in(2, n_max as u64) {
        let pu = p as usize;
        match curve.reduction_type(p)? {
            ReductionType::Good => {
                ap[pu] = p as i64 + 1 - curve.count_points_mod_p(p)? as i64;
            }
            t => {
                good[pu] = false;
                ap[pu] = match t {
                    ReductionType::SplitMultiplicative => 1,
                    ReductionType::NonsplitMultiplicative => -1,
                    _ => 0,
                };
            }
        }
    }
    let mut a = vec![0i64; n_max + 1];
    a[1] = 1;
    for n in 2..=n_max {
        let p = spf[n];
        let mut pk = p;
        let mut m = n / p;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        let apk = if pk == p {
            ap[p]
        } else if good[p] {
            a[p] * a[pk / p] - p as i64 * a[pk / (p * p)]
        } else {
            a[p] * a[pk / p]
        };
        a[n] = if m == 1 { apk } else { apk * a[m] };
    }
    Ok(a[1..].to_vec())
}

/// Minimal-discriminant conductor when it is squarefree.
fn conductor_from_disc(curve: &WeierstrassCurve) -> Result<u64, EllipticError> {
    let minimal = curve.minimal_model();
    let disc = minimal.discriminant();
    debug_assert!(disc.is_integer());
    let n = disc
        .numer()
        .magnitude()
        .to_u64()
        .ok_or(EllipticError::NeedConductor)?;
    for (_, e) in modular::factorize(n) {
        if e > 1 {
            return Err(EllipticError::NeedConductor);
        }
    }
    Ok(n)
}

impl WeierstrassCurve {
    /// Integral model with small coefficients: clears denominators, then
    /// undoes scalings x -> u^2 x', y -> u^3 y' for every u with u^12
    /// dividing the discriminant, and normalizes to a1, a3 in {0, 1},
    /// a2 in {-1, 0, 1}.
    pub fn minimal_model(&self) -> WeierstrassCurve {
        let mut cur = self.integralize();
        loop {
            let disc = cur.discriminant();
            let d = disc.numer().magnitude();
            let mut best: Option<WeierstrassCurve> = None;
            let bound = d.to_f64().unwrap_or(f64::MAX).powf(1.0 / 12.0) as i64 + 1;
            for u in (2..=bound.max(2)).rev() {
                let u12 = BigInt::from(u).pow(12);
                if !(disc.numer() % &u12).is_zero() {
                    continue;
                }
                if let Some(smaller) = cur.try_unscale(u) {
                    best = Some(smaller);
                    break;
                }
            }
            let _ = d;
            match best {
                Some(c) => cur = c,
                None => break,
            }
        }
        cur.normalize_rst()
    }

    fn integralize(&self) -> WeierstrassCurve {
        // Scale (x, y) -> (x / m^2, y / m^3): a_i pick up m^i.
        let mut m = BigInt::from(1);
        for (i, c) in [
            (1u32, &self.a1),
            (2, &self.a2),
            (3, &self.a3),
            (4, &self.a4),
            (6, &self.a6),
        ] {
            for (p, k) in modular::factorize(c.denom().magnitude().to_u64().expect("desk scale")) {
                let need = (k + i - 1) / i;
                let have = big_ord(&m, p);
                if have < need {
                    m *= BigInt::from(p).pow(need - have);
                }
            }
        }
        self.scale_u(&BigRational::from(m))
    }

    /// The curve after x -> u^2 x, y -> u^3 y (coefficients times u^i).
    fn scale_u(&self, u: &BigRational) -> WeierstrassCurve {
        WeierstrassCurve::new(
            &self.a1 * u,
            &self.a2 * u.pow(2),
            &self.a3 * u.pow(3),
            &self.a4 * u.pow(4),
            &self.a6 * u.pow(6),
        )
    }

    /// Searches r, s, t making the u-descaled model integral; returns it if
    /// one exists.
    fn try_unscale(&self, u: i64) -> Option<WeierstrassCurve> {
        let (a1, a2, a3, a4, a6) = (
            self.a1.to_integer(),
            self.a2.to_integer(),
            self.a3.to_integer(),
            self.a4.to_integer(),
            self.a6.to_integer(),
        );
        let ub = BigInt::from(u);
        for s in 0..u {
            let s = BigInt::from(s);
            let n1 = &a1 + BigInt::from(2) * &s;
            if !(&n1 % &ub).is_zero() {
                continue;
            }
            for r in 0..u * u {
                let r = BigInt::from(r);
                let n2 = &a2 - &s * &a1 + BigInt::from(3) * &r - &s * &s;
                if !(&n2 % (&ub * &ub)).is_zero() {
                    continue;
                }
                for t in 0..u * u * u {
                    let t = BigInt::from(t);
                    let n3 = &a3 + &r * &a1 + BigInt::from(2) * &t;
                    if !(&n3 % (&ub * &ub * &ub)).is_zero() {
                        continue;
                    }
                    let n4 = &a4 - &s * &a3 + BigInt::from(2) * &r * &a2
                        - (&t + &r * &s) * &a1
                        + BigInt::from(3) * &r * &r
                        - BigInt::from(2) * &s * &t;
                    if !(&n4 % ub.pow(4)).is_zero() {
                        continue;
                    }
                    let n6 = &a6 + &r * &a4 + &r * &r * &a2 + &r * &r * &r
                        - &t * &a3
                        - &t * &t
                        - &r * &t * &a1;
                    if !(&n6 % ub.pow(6)).is_zero() {
                        continue;
                    }
                    return Some(WeierstrassCurve::new(
                        BigRational::from(&n1 / &ub),
                        BigRational::from(&n2 / (&ub * &ub)),
                        BigRational::from(&n3 / ub.pow(3)),
                        BigRational::from(&n4 / ub.pow(4)),
                        BigRational::from(&n6 / ub.pow(6)),
                    ));
                }
            }
        }
        None
    }

    /// u = 1 change of variables to a1, a3 in {0, 1} and a2 in {-1, 0, 1}.
    fn normalize_rst(&self) -> WeierstrassCurve {
        let (a1, a2, a3) = (
            self.a1.to_integer(),
            self.a2.to_integer(),
            self.a3.to_integer(),
        );
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        let a1t = a1.mod_floor(&two);
        let s = (&a1t - &a1) / &two;
        let a2s = &a2 - &s * &a1 - &s * &s;
        // Pick a2' in {-1, 0, 1} congruent to a2s mod 3.
        let mut a2t = a2s.mod_floor(&three);
        if a2t == two {
            a2t = BigInt::from(-1);
        }
        let r = (&a2t - &a2s) / &three;
        let a3r = &a3 + &r * &a1;
        let a3t = a3r.mod_floor(&two);
        let t = (&a3t - &a3r) / &two;
        self.transform_rst(&r, &s, &t)
    }

    /// x -> x + r, y -> y + s x + t (u = 1 coordinate change).
    fn transform_rst(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> WeierstrassCurve {
        let (r, s, t) = (
            BigRational::from(r.clone()),
            BigRational::from(s.clone()),
            BigRational::from(t.clone()),
        );
        let two = BigRational::from(BigInt::from(2));
        let three = BigRational::from(BigInt::from(3));
        let a1 = &self.a1 + &two * &s;
        let a2 = &self.a2 - &s * &self.a1 + &three * &r - &s * &s;
        let a3 = &self.a3 + &r * &self.a1 + &two * &t;
        let a4 = &self.a4 - &s * &self.a3 + &two * &r * &self.a2 - (&t + &r * &s) * &self.a1
            + &three * &r * &r
            - &two * &s * &t;
        let a6 = &self.a6 + &r * &self.a4 + &r * &r * &self.a2 + &r * &r * &r
            - &t * &self.a3
            - &t * &t
            - &r * &t * &self.a1;
        WeierstrassCurve::new(a1, a2, a3, a4, a6)
    }
}

use num_rational::BigRational;

fn big_ord(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return 0;
    }
    let mut v = 0;
    let mut m = n.magnitude().clone();
    let pb = num_bigint::BigUint::from(p);
    while (&m % &pb).is_zero() {
        v += 1;
        m /= &pb;
    }
    v
}

/// Prepared analytic evaluator: conductor, coefficients sized for the worst
/// tail target, and the numerically determined root number.
pub struct LEvaluator {
    pub conductor: u64,
    pub root_number: i32,
    minimal: WeierstrassCurve,
    coeffs: Vec<i64>,
    sqrt_n: BF,
}

impl LEvaluator {
    pub fn new(
        curve: &WeierstrassCurve,
        conductor: Option<u64>,
        root_number: Option<i32>,
    ) -> Result<Self, EllipticError> {
        let minimal = curve.minimal_model();
        let n = match conductor {
            Some(n) => n,
            None => conductor_from_disc(&minimal)?,
        };
        let sqrt_n = bf_i(n as i64).sqrt();
        // Coefficients up to the most demanding tail target used anywhere.
        let t_max = term_count(n, 1e-30);
        let coeffs = l_coefficients(&minimal, t_max)?;
        let mut ev = LEvaluator {
            conductor: n,
            root_number: 0,
            minimal,
            coeffs,
            sqrt_n,
        };
        ev.root_number = match root_number {
            Some(w) if w == 1 || w == -1 => w,
            Some(_) => return Err(EllipticError::NeedRootNumber),
            None => ev.detect_root_number()?,
        };
        Ok(ev)
    }

    pub fn with_more_terms(&mut self, terms: usize) -> Result<(), EllipticError> {
        if terms > self.coeffs.len() {
            self.coeffs = l_coefficients(&self.minimal, terms)?;
        }
        Ok(())
    }

    /// Conductor, root number, coefficients and bad-prime classification in
    /// one record.
    pub fn profile(&mut self, n_max: usize) -> Result<LSeriesProfile, EllipticError> {
        self.with_more_terms(n_max)?;
        let mut bad_primes = Vec::new();
        for (p, _) in modular::factorize(self.conductor) {
            bad_primes.push((p, self.minimal.reduction_type(p)?));
        }
        Ok(LSeriesProfile {
            conductor: self.conductor,
            root_number: Some(self.root_number),
            coeffs: self.coeffs[..n_max].to_vec(),
            bad_primes,
        })
    }

    /// A(s, t0) = sum a_n (sqrt(N)/(2 pi n))^s Gamma(s, 2 pi n t0 / sqrt(N)).
    fn a_sum(&self, s: &BF, t0: &BF, terms: usize) -> BF {
        let c = bf_i(2) * pi() / &self.sqrt_n; // x_n = c n t0
        let terms = terms.min(self.coeffs.len());
        let mut acc = bf_i(0);
        for n in 1..=terms {
            let an = self.coeffs[n - 1];
            if an == 0 {
                continue;
            }
            let cn = &c * bf_i(n as i64);
            let x = &cn * t0;
            let g = upper_inc_gamma(s, &x);
            let scale = (-(s * cn.ln())).exp(); // (c n)^(-s)
            acc += bf_i(an) * scale * g;
        }
        acc
    }

    /// Lambda(s) with the integral split at t0 (t0 = 1 is the standard
    /// series); independent of t0 exactly when the root number is right.
    fn lambda_split(&self, s: f64, t0: f64, w: i32, terms: usize) -> BF {
        let sb = bf_f(s);
        let s2 = bf_f(2.0 - s);
        let t0b = bf_f(t0);
        let inv_t0 = bf_i(1) / &t0b;
        let first = self.a_sum(&sb, &t0b, terms);
        let second = self.a_sum(&s2, &inv_t0, terms);
        first + bf_i(w as i64) * second
    }

    /// Chooses the sign making Lambda independent of the split point.
    fn detect_root_number(&self) -> Result<i32, EllipticError> {
        let terms = term_count(self.conductor, 1e-12);
        let s = 1.3;
        let a_s_1 = self.a_sum(&bf_f(s), &bf_i(1), terms);
        let a_s_t = self.a_sum(&bf_f(s), &bf_f(1.15), terms);
        let a_r_1 = self.a_sum(&bf_f(2.0 - s), &bf_i(1), terms);
        let a_r_t = self.a_sum(&bf_f(2.0 - s), &bf_f(1.0 / 1.15), terms);
        // Lambda_t0(s) - w Lambda_1(2-s) = (A_t0(s) - A_1(s)) + w (A_{1/t0}(2-s) - A_1(2-s))
        let d_plus = to_f64(&bf_abs(&(&a_s_t - &a_s_1 + (&a_r_t - &a_r_1))));
        let d_minus = to_f64(&bf_abs(&(&a_s_t - &a_s_1 - (&a_r_t - &a_r_1))));
        let (lo, hi) = if d_plus < d_minus {
            (d_plus, d_minus)
        } else {
            (d_minus, d_plus)
        };
        if !(lo.is_finite() && hi.is_finite()) || lo > 1e-3 * hi {
            return Err(EllipticError::NeedRootNumber);
        }
        Ok(if d_plus < d_minus { 1 } else { -1 })
    }

    /// Split-point mismatch |Lambda_{t0}(s) - w Lambda_1(2-s)| used by the
    /// functional-equation symmetry check.
    pub fn lambda_symmetry_defect(&self, s: f64, t0: f64) -> f64 {
        let terms = term_count(self.conductor, 1e-12);
        let w = self.root_number;
        let lhs = self.lambda_split(s, t0, w, terms);
        let rhs = self.lambda_split(2.0 - s, 1.0, w, terms);
        to_f64(&bf_abs(&(lhs - bf_i(w as i64) * rhs)))
    }

    /// Lambda(s) with the default split.
    pub fn lambda(&self, s: f64, terms: usize) -> BF {
        self.lambda_split(s, 1.0, self.root_number, terms)
    }

    /// L(E, s) by the analytic series, to the given tail target.
    pub fn l_analytic(&self, s: f64, terms: Option<usize>, tail: f64) -> BF {
        let terms = terms.unwrap_or_else(|| term_count(self.conductor, tail));
        let lam = self.lambda(s, terms);
        let sb = bf_f(s);
        // L = Lambda * (2 pi / sqrt(N))^s / Gamma(s)
        let ratio = bf_i(2) * pi() / &self.sqrt_n;
        let pref = (&sb * ratio.ln()).exp();
        lam * pref / gamma_fn(&sb)
    }

    /// (L(s^2 - s + 1) - L(s)) / ((s - 1) L(s)): the finite-difference form
    /// of (s - 1) L'/L, whose limit at 1 is the order of vanishing.
    pub fn rank_estimate(&self, s: f64) -> Result<f64, EllipticError> {
        if s == 1.0 {
            return Err(EllipticError::SIsOne);
        }
        // The estimator differences two nearly equal L values of size
        // ~(s-1)^r; tighten the tail target accordingly.
        let tail = (1e-8 * (s - 1.0) * (s - 1.0)).clamp(1e-28, 1e-8);
        let s2 = s * s - s + 1.0;
        let l1 = self.l_analytic(s, None, tail);
        let l2 = self.l_analytic(s2, None, tail);
        let est = (l2 - &l1) / (bf_f(s - 1.0) * l1);
        Ok(to_f64(&est))
    }
}

/// Terms needed so that 2 sum_{n > T} (2 sqrt(n)/n) e^(-2 pi n / sqrt(N))
/// stays below the tail target; capped at 10^5.
pub fn term_count(conductor: u64, tail: f64) -> usize {
    let c = 2.0 * std::f64::consts::PI / (conductor as f64).sqrt();
    let denom = 1.0 - (-c).exp();
    let mut t = 8usize;
    while t < 100_000 {
        let n1 = (t + 1) as f64;
        let bound = 2.0 * (2.0 / n1.sqrt()) * (-c * n1).exp() / denom;
        if bound < tail {
            break;
        }
        t += 1;
    }
    t
}

/// L(E, s) in either evaluation mode.
pub fn l_value(
    curve: &WeierstrassCurve,
    s: f64,
    mode: LMode,
    conductor: Option<u64>,
    root_number: Option<i32>,
) -> Result<f64, EllipticError> {
    match mode {
        LMode::EulerProduct { cut } => {
            if s <= 1.5 {
                return Err(EllipticError::OutOfConvergenceRegion);
            }
            let minimal = curve.minimal_model();
            let mut log_sum = 0.0f64;
            for p in modular::primes_in(2, cut) {
                let pf = p as f64;
                let ap = minimal.ap(p)? as f64;
                let factor = match minimal.reduction_type(p)? {
                    ReductionType::Good => 1.0 - ap * pf.powf(-s) + pf.powf(1.0 - 2.0 * s),
                    _ => 1.0 - ap * pf.powf(-s),
                };
                log_sum += factor.ln();
            }
            Ok((-log_sum).exp())
        }
        LMode::Analytic { terms } => {
            let mut ev = LEvaluator::new(curve, conductor, root_number)?;
            if let Some(t) = terms {
                ev.with_more_terms(t)?;
            }
            Ok(to_f64(&ev.l_analytic(s, terms, 1e-8)))
        }
    }
}

/// Numerical rank estimate at s near 1 (round to the nearest integer for
/// the rank guess).
pub fn rank_estimate(
    curve: &WeierstrassCurve,
    s: f64,
    conductor: Option<u64>,
    root_number: Option<i32>,
) -> Result<f64, EllipticError> {
    let ev = LEvaluator::new(curve, conductor, root_number)?;
    ev.rank_estimate(s)
}
