//! Modular-integer primitives shared by the other modules: extended Euclid,
//! two-variable linear Diophantine equations, the Chinese remainder theorem,
//! Euler's totient, Legendre symbols and square roots modulo a prime.
//!
//! Everything here works on machine integers with 128-bit intermediates;
//! values are desk-scale (moduli and primes fitting in `u64`).

use std::sync::OnceLock;

/// Errors raised by the modular toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModularError {
    /// `solve_linear2` with gcd(a, b) not dividing c.
    Unsolvable { a: i64, b: i64, c: i64 },
    /// `solve_linear2` with a = b = 0.
    Degenerate,
    /// Two moduli in a residue system share a factor.
    NotCoprime(u64, u64),
    /// Legendre symbol requested at a modulus that is not an odd prime.
    NotOddPrime(u64),
    /// Square root of a quadratic non-residue requested.
    NonResidue { a: i64, p: u64 },
    /// `sqrt_mod_p` at a composite modulus.
    NotPrime(u64),
    /// Product of CRT moduli does not fit in 64 bits.
    ModulusOverflow,
}

impl ModularError {
    /// Stable machine-readable variant name (used by the CLI error contract).
    pub fn name(&self) -> &'static str {
        match self {
            ModularError::Unsolvable { .. } => "Unsolvable",
            ModularError::Degenerate => "Degenerate",
            ModularError::NotCoprime(..) => "NotCoprime",
            ModularError::NotOddPrime(..) => "NotOddPrime",
            ModularError::NonResidue { .. } => "NonResidue",
            ModularError::NotPrime(..) => "NotPrime",
            ModularError::ModulusOverflow => "ModulusOverflow",
        }
    }
}

impl std::fmt::Display for ModularError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModularError::Unsolvable { a, b, c } => {
                write!(f, "{}x + {}y = {} has no integer solution", a, b, c)
            }
            ModularError::Degenerate => write!(f, "equation 0x + 0y = c is degenerate"),
            ModularError::NotCoprime(m, n) => write!(f, "moduli {} and {} are not coprime", m, n),
            ModularError::NotOddPrime(p) => write!(f, "{} is not an odd prime", p),
            ModularError::NonResidue { a, p } => {
                write!(f, "{} is not a quadratic residue mod {}", a, p)
            }
            ModularError::NotPrime(p) => write!(f, "{} is not prime", p),
            ModularError::ModulusOverflow => write!(f, "product of moduli exceeds 64 bits"),
        }
    }
}

impl std::error::Error for ModularError {}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(|a|, |b|)`.
///
/// `g = 0` exactly when `a = b = 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if a == 0 && b == 0 {
        return (0, 0, 0);
    }
    // Iterative version on i128 so |a|, |b| up to i64::MAX are safe.
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

/// gcd of absolute values; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Solution family of `a*x + b*y = c`: a particular solution plus the
/// homogeneous step `(b/d, -a/d)`; every solution is
/// `(x0 + (b/d) t, y0 - (a/d) t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSolution {
    pub x0: i64,
    pub y0: i64,
    pub step: (i64, i64),
}

/// Solve `a*x + b*y = c` over the integers.
pub fn solve_linear2(a: i64, b: i64, c: i64) -> Result<LinearSolution, ModularError> {
    if a == 0 && b == 0 {
        return Err(ModularError::Degenerate);
    }
    let (d, x, y) = ext_gcd(a, b);
    if c % d != 0 {
        return Err(ModularError::Unsolvable { a, b, c });
    }
    let e = c / d;
    Ok(LinearSolution {
        x0: e * x,
        y0: e * y,
        step: (b / d, -(a / d)),
    })
}

/// A system of congruences `x = r_i (mod m_i)` with residues normalized
/// to `[0, m_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSystem {
    pairs: Vec<(u64, u64)>,
}

impl ResidueSystem {
    /// Builds the system, normalizing each residue into `[0, modulus)`.
    /// Moduli must be >= 1.
    pub fn new(pairs: &[(i64, u64)]) -> Self {
        let pairs = pairs
            .iter()
            .map(|&(r, m)| {
                assert!(m >= 1, "modulus must be positive");
                (r.rem_euclid(m as i64) as u64, m)
            })
            .collect();
        ResidueSystem { pairs }
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// True when the moduli are pairwise coprime.
    pub fn is_coprime(&self) -> bool {
        self.offending_pair().is_none()
    }

    fn offending_pair(&self) -> Option<(u64, u64)> {
        for i in 0..self.pairs.len() {
            for j in i + 1..self.pairs.len() {
                let (mi, mj) = (self.pairs[i].1, self.pairs[j].1);
                if gcd(mi as i64, mj as i64) != 1 {
                    return Some((mi, mj));
                }
            }
        }
        None
    }
}

/// Chinese remainder theorem: the unique `a` in `[0, N)` with
/// `a = r_i (mod m_i)` for all i, where `N` is the product of the moduli.
///
/// Assembled as `sum r_i X_i M_i` with `M_i = N / m_i` and
/// `X_i = M_i^{-1} mod m_i`, then reduced mod `N`.
pub fn crt(system: &ResidueSystem) -> Result<(u64, u64), ModularError> {
    if let Some((mi, mj)) = system.offending_pair() {
        return Err(ModularError::NotCoprime(mi, mj));
    }
    let mut n: u64 = 1;
    for &(_, m) in system.pairs() {
        n = n.checked_mul(m).ok_or(ModularError::ModulusOverflow)?;
    }
    let mut acc: u128 = 0;
    for &(r, m) in system.pairs() {
        let big_m = (n / m) as i64;
        let (_, x, _) = ext_gcd(big_m.rem_euclid(m as i64), m as i64);
        let x = x.rem_euclid(m as i64) as u128;
        acc = (acc + r as u128 * x % n as u128 * (big_m as u128)) % n as u128;
    }
    Ok((acc as u64, n))
}

/// Modular exponentiation with 128-bit intermediates.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut result: u128 = 1;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    result as u64
}

/// Inverse of `a` mod `m`, if it exists.
pub fn mod_inv(a: i64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m as i64), m as i64);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i64) as u64)
}

const SIEVE_LIMIT: usize = 1_000_000;

fn sieve() -> &'static Vec<u32> {
    static SIEVE: OnceLock<Vec<u32>> = OnceLock::new();
    SIEVE.get_or_init(|| {
        let mut is_comp = vec![false; SIEVE_LIMIT + 1];
        let mut primes = Vec::new();
        for i in 2..=SIEVE_LIMIT {
            if !is_comp[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= SIEVE_LIMIT {
                    is_comp[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// All primes in `[lo, hi]` (inclusive), by trial sieve.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if hi <= SIEVE_LIMIT as u64 {
        for &p in sieve() {
            let p = p as u64;
            if p > hi {
                break;
            }
            if p >= lo {
                out.push(p);
            }
        }
        return out;
    }
    for n in lo.max(2)..=hi {
        if is_prime(n) {
            out.push(n);
        }
    }
    out
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set decides primality for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard's rho (Brent variant) for a nontrivial factor of an odd composite.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && !is_prime(n));
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd((x as i64 - y as i64).abs(), n as i64) as u64;
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization `n = prod p_i^{e_i}`, ascending in p.
///
/// Trial division over the sieve first, Pollard rho for what remains.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for &p in sieve() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    // Leftover is 1, a prime, or a composite with all factors > 10^6.
    let mut stack = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    let mut big: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            big.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    big.sort_unstable();
    let mut i = 0;
    while i < big.len() {
        let mut j = i;
        while j < big.len() && big[j] == big[i] {
            j += 1;
        }
        out.push((big[i], (j - i) as u32));
        i = j;
    }
    out.sort_unstable();
    out
}

/// Euler's totient, from the factorization of `n`.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi needs n >= 1");
    let mut phi = 1u64;
    for (p, e) in factorize(n) {
        phi *= p.pow(e - 1) * (p - 1);
    }
    phi
}

/// Squarefree part and largest square divisor: `n = square * core` with
/// `core` squarefree. Sign stays on the core.
pub fn squarefree_decompose(n: i64) -> (i64, i64) {
    assert!(n != 0);
    let mut square = 1i64;
    let mut core = 1i64;
    for (p, e) in factorize(n.unsigned_abs()) {
        square *= (p as i64).pow(e / 2);
        if e % 2 == 1 {
            core *= p as i64;
        }
    }
    if n < 0 {
        core = -core;
    }
    (square, core)
}

/// Legendre symbol `(a/p)` for odd prime p, by Euler's criterion.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i32, ModularError> {
    if p == 2 || !is_prime(p) {
        return Err(ModularError::NotOddPrime(p));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    let e = mod_pow(r, (p - 1) / 2, p);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Square root of `a` mod prime `p`, normalized to `min(r, p - r)`.
///
/// Tonelli-Shanks for p = 1 (mod 4), the (p+1)/4 exponent for p = 3 (mod 4),
/// a table for p = 2.
pub fn sqrt_mod_p(a: i64, p: u64) -> Result<u64, ModularError> {
    if !is_prime(p) {
        return Err(ModularError::NotPrime(p));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if p == 2 {
        return Ok(r); // 0 -> 0, 1 -> 1
    }
    if r == 0 {
        return Ok(0);
    }
    if legendre_symbol(a, p)? == -1 {
        return Err(ModularError::NonResidue { a, p });
    }
    let root = if p % 4 == 3 {
        mod_pow(r, (p + 1) / 4, p)
    } else {
        tonelli_shanks(r, p)
    };
    Ok(root.min(p - root))
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    // p = 1 (mod 4), a a known residue.
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    // Any non-residue serves as the generator of the 2-Sylow part.
    let mut z = 2;
    while mod_pow(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mulmod = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2);
            i += 1;
        }
        let mut b = c;
        for _ in 0..m - i - 1 {
            b = mulmod(b, b);
        }
        m = i;
        c = mulmod(b, b);
        t = mulmod(t, c);
        r = mulmod(r, b);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ext_gcd_basics() {
        assert_eq!(ext_gcd(1, 0), (1, 1, 0));
        assert_eq!(ext_gcd(0, 0), (0, 0, 0));
        let (g, x, y) = ext_gcd(12, 18);
        assert_eq!(g, 6);
        assert_eq!(12 * x + 18 * y, 6);
    }

    #[test]
    fn ext_gcd_bezout_bulk() {
        // Bezout identity on 10^5 random pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let a: i64 = rng.gen_range(-1_000_000..=1_000_000);
            let b: i64 = rng.gen_range(-1_000_000..=1_000_000);
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(a as i128 * x as i128 + b as i128 * y as i128, g as i128);
            assert_eq!(g, gcd(a, b));
            assert!(g >= 0);
        }
    }

    #[test]
    fn solve_linear2_cases() {
        let s = solve_linear2(1, 0, 7).unwrap();
        assert_eq!((s.x0, s.y0), (7, 0));

        let s = solve_linear2(3, 5, 1).unwrap();
        assert_eq!(3 * s.x0 + 5 * s.y0, 1);
        // Homogeneous step really is a solution of the homogeneous equation.
        assert_eq!(3 * s.step.0 + 5 * s.step.1, 0);

        assert_eq!(
            solve_linear2(2, 4, 1),
            Err(ModularError::Unsolvable { a: 2, b: 4, c: 1 })
        );
        assert_eq!(solve_linear2(0, 0, 1), Err(ModularError::Degenerate));
    }

    #[test]
    fn crt_cases() {
        let sys = ResidueSystem::new(&[(0, 5)]);
        assert_eq!(crt(&sys).unwrap(), (0, 5));

        let sys = ResidueSystem::new(&[(2, 3), (3, 5)]);
        assert_eq!(crt(&sys).unwrap(), (8, 15));

        let sys = ResidueSystem::new(&[(1, 4), (3, 6)]);
        assert_eq!(crt(&sys), Err(ModularError::NotCoprime(4, 6)));
    }

    #[test]
    fn crt_matches_brute_force() {
        // Exhaustive scan for all modulus products <= 10^4.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let moduli_sets: Vec<Vec<u64>> = vec![
            vec![2, 3, 5, 7],
            vec![4, 9, 25],
            vec![8, 9, 11],
            vec![16, 81],
            vec![3, 5, 8, 7],
            vec![9999],
        ];
        for moduli in moduli_sets {
            let n: u64 = moduli.iter().product();
            assert!(n <= 10_000);
            for _ in 0..20 {
                let pairs: Vec<(i64, u64)> = moduli
                    .iter()
                    .map(|&m| (rng.gen_range(0..m) as i64, m))
                    .collect();
                let sys = ResidueSystem::new(&pairs);
                let (a, nn) = crt(&sys).unwrap();
                assert_eq!(nn, n);
                let brute = (0..n)
                    .find(|&x| pairs.iter().all(|&(r, m)| x % m == r as u64))
                    .unwrap();
                assert_eq!(a, brute);
            }
        }
    }

    #[test]
    fn euler_phi_cases() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        for p in [2u64, 3, 5, 101, 65537] {
            assert_eq!(euler_phi(p), p - 1);
        }
        // Brute count oracle on a range.
        for n in 1..=200u64 {
            let brute = (1..=n).filter(|&k| gcd(k as i64, n as i64) == 1).count() as u64;
            assert_eq!(euler_phi(n), brute, "phi({})", n);
        }
    }

    #[test]
    fn euler_theorem_bulk() {
        // a^phi(N) = 1 (mod N) for 500 random coprime pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut done = 0;
        while done < 500 {
            let n: u64 = rng.gen_range(2..100_000);
            let a: u64 = rng.gen_range(1..n);
            if gcd(a as i64, n as i64) != 1 {
                continue;
            }
            assert_eq!(mod_pow(a, euler_phi(n), n), 1);
            done += 1;
        }
    }

    #[test]
    fn legendre_cases() {
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(legendre_symbol(1, p).unwrap(), 1);
        }
        assert_eq!(legendre_symbol(2, 7).unwrap(), 1); // 3^2 = 2 mod 7
        assert_eq!(legendre_symbol(3, 7).unwrap(), -1);
        assert_eq!(legendre_symbol(14, 7).unwrap(), 0);
        assert_eq!(legendre_symbol(3, 4), Err(ModularError::NotOddPrime(4)));
        // Brute scan of squares mod 7.
        let squares: Vec<u64> = (1..7u64).map(|x| x * x % 7).collect();
        for a in 1..7i64 {
            let expect = if squares.contains(&(a as u64)) { 1 } else { -1 };
            assert_eq!(legendre_symbol(a, 7).unwrap(), expect);
        }
    }

    #[test]
    fn legendre_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &p in &[3u64, 7, 13, 101, 1009] {
            for _ in 0..200 {
                let a = rng.gen_range(1..10_000i64);
                let b = rng.gen_range(1..10_000i64);
                if a % p as i64 == 0 || b % p as i64 == 0 {
                    continue;
                }
                let lhs = legendre_symbol(a * b, p).unwrap();
                let rhs = legendre_symbol(a, p).unwrap() * legendre_symbol(b, p).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn sqrt_mod_p_cases() {
        assert_eq!(sqrt_mod_p(0, 7).unwrap(), 0);
        assert_eq!(sqrt_mod_p(2, 7).unwrap(), 3); // min(3, 4)
        assert_eq!(
            sqrt_mod_p(3, 7),
            Err(ModularError::NonResidue { a: 3, p: 7 })
        );
        assert_eq!(sqrt_mod_p(1, 2).unwrap(), 1);
        // Both branches (p = 3 mod 4 and Tonelli-Shanks), all residues.
        for &p in &[7u64, 11, 13, 17, 29, 101, 10007, 1000003] {
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..50 {
                let x = rng.gen_range(1..p);
                let a = ((x as u128 * x as u128) % p as u128) as i64;
                let r = sqrt_mod_p(a, p).unwrap();
                assert_eq!((r as u128 * r as u128 % p as u128) as i64, a.rem_euclid(p as i64));
                assert!(r <= p - r);
            }
        }
    }

    #[test]
    fn factorize_and_primes() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(5077), vec![(5077, 1)]);
        // Pollard path: product of two primes above the sieve.
        let n = 1_000_003u64 * 1_000_033;
        assert_eq!(factorize(n), vec![(1_000_003, 1), (1_000_033, 1)]);
        assert!(is_prime(2) && is_prime(3) && is_prime(5077));
        assert!(!is_prime(1) && !is_prime(0) && !is_prime(5077 * 3));
        assert_eq!(primes_in(2, 20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decompose(12), (2, 3));
        assert_eq!(squarefree_decompose(-50), (5, -2));
        assert_eq!(squarefree_decompose(1), (1, 1));
        assert_eq!(squarefree_decompose(36), (6, 1));
    }
}
