//! Integer linear algebra: Smith normal form by elementary operations and
//! the complete solution of integer systems Ax = b, together with the
//! congruence-solvability equivalence (the linear Minkowski-Hasse statement).
//!
//! All arithmetic is exact over arbitrary-precision integers; no modular
//! shortcuts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinDiophError {
    DimensionMismatch { rows: usize, len: usize },
}

impl LinDiophError {
    pub fn name(&self) -> &'static str {
        match self {
            LinDiophError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

impl fmt::Display for LinDiophError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinDiophError::DimensionMismatch { rows, len } => {
                write!(f, "matrix has {} rows but b has {} entries", rows, len)
            }
        }
    }
}

impl std::error::Error for LinDiophError {}

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        assert_eq!(entries.len(), rows * cols);
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&e| BigInt::from(e)).collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.at(k, j);
                    *out.at_mut(i, j) += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.entries.clone();
        let at = |m: &Vec<BigInt>, i: usize, j: usize| m[i * n + j].clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if at(&m, k, k).is_zero() {
                let swap = (k + 1..n).find(|&i| !at(&m, i, k).is_zero());
                match swap {
                    None => return BigInt::zero(),
                    Some(i) => {
                        for j in 0..n {
                            m.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (at(&m, i, j) * at(&m, k, k) - at(&m, i, k) * at(&m, k, j)) / &prev;
                    m[i * n + j] = v;
                }
                m[i * n + k] = BigInt::zero();
            }
            prev = at(&m, k, k);
        }
        sign * at(&m, n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[i] += q * row[k]
    fn add_row(&mut self, i: usize, k: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = q * self.at(k, j);
            *self.at_mut(i, j) += t;
        }
    }

    /// col[j] += q * col[k]
    fn add_col(&mut self, j: usize, k: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = q * self.at(i, k);
            *self.at_mut(i, j) += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.at(i, j).clone();
            *self.at_mut(i, j) = v;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// U A V = D with U, V unimodular and D diagonal with a positive divisor
/// chain d_1 | d_2 | ... | d_r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SNFDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
    pub rank: usize,
    pub divisors: Vec<BigInt>,
}

/// Smith normal form by elementary row/column operations.
///
/// Pivot rule: the nonzero entry of minimal absolute value in the working
/// submatrix, ties broken by lowest (row, col); divisors are made positive
/// by negating rows of U.
pub fn smith_normal_form(a: &IntMatrix) -> SNFDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let r_max = m.min(n);
    let mut rank = 0;

    for t in 0..r_max {
        'restart: loop {
            // Minimal |entry| pivot in the trailing submatrix.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d.at(i, j).is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => d.at(i, j).abs() < d.at(pi, pj).abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let (pi, pj) = match pivot {
                None => return finish_snf(u, v, d, rank),
                Some(p) => p,
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            // Clear column t below the pivot and row t to its right.
            let mut dirty = false;
            for i in t + 1..m {
                if !d.at(i, t).is_zero() {
                    let q = -(d.at(i, t) / d.at(t, t));
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    if !d.at(i, t).is_zero() {
                        dirty = true; // remainder left; pick a smaller pivot
                    }
                }
            }
            for j in t + 1..n {
                if !d.at(t, j).is_zero() {
                    let q = -(d.at(t, j) / d.at(t, t));
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    if !d.at(t, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'restart;
            }
            // Divisibility: the pivot must divide the rest of the submatrix;
            // otherwise fold the offending row in and reduce again.
            let pv = d.at(t, t).clone();
            let mut offender = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !(d.at(i, j) % &pv).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            if let Some(i) = offender {
                let one = BigInt::one();
                d.add_row(t, i, &one);
                u.add_row(t, i, &one);
                continue 'restart;
            }
            rank = t + 1;
            break;
        }
    }
    finish_snf(u, v, d, rank)
}

fn finish_snf(mut u: IntMatrix, v: IntMatrix, mut d: IntMatrix, rank: usize) -> SNFDecomposition {
    for t in 0..rank {
        if d.at(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    let divisors = (0..rank).map(|t| d.at(t, t).clone()).collect();
    SNFDecomposition {
        u,
        v,
        d,
        rank,
        divisors,
    }
}

/// Complete solution set of Ax = b over Z: a particular solution plus a
/// lattice basis of the homogeneous solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSolution {
    pub particular: Vec<BigInt>,
    pub lattice_basis: Vec<Vec<BigInt>>,
}

/// Why Ax = b has no integer solution: the transformed system U A V y = U b
/// needs d_i y_i = c_i, and index `index` fails (d_i does not divide c_i, or
/// c_i != 0 beyond the rank).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsolvableWitness {
    pub index: usize,
    pub divisor: Option<BigInt>,
    pub target: BigInt,
}

/// Solve Ax = b over the integers via the Smith normal form.
pub fn solve_integer_system(
    a: &IntMatrix,
    b: &[BigInt],
) -> Result<Result<IntegerSolution, UnsolvableWitness>, LinDiophError> {
    if b.len() != a.rows() {
        return Err(LinDiophError::DimensionMismatch {
            rows: a.rows(),
            len: b.len(),
        });
    }
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let n = a.cols();
    let mut y = vec![BigInt::zero(); n];
    for i in 0..a.rows() {
        if i < snf.rank {
            let (q, r) = c[i].div_rem(&snf.divisors[i]);
            if !r.is_zero() {
                return Ok(Err(UnsolvableWitness {
                    index: i,
                    divisor: Some(snf.divisors[i].clone()),
                    target: c[i].clone(),
                }));
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return Ok(Err(UnsolvableWitness {
                index: i,
                divisor: None,
                target: c[i].clone(),
            }));
        }
    }
    let particular = snf.v.mul_vec(&y);
    let lattice_basis = (snf.rank..n)
        .map(|j| (0..n).map(|i| snf.v.at(i, j).clone()).collect())
        .collect();
    Ok(Ok(IntegerSolution {
        particular,
        lattice_basis,
    }))
}

/// Report of `Ax = b (mod N)` solvability over a list of moduli, with the
/// integer verdict it must match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceReport {
    pub per_modulus: Vec<(u64, bool)>,
    pub integer_solvable: bool,
    /// A modulus where the congruence provably fails, present exactly when
    /// the integer system is unsolvable.
    pub failing_modulus: Option<BigInt>,
}

/// Is Ax = b solvable mod N? Equivalent to integer solvability of the
/// extended system [A | N I] (x; k) = b.
pub fn solvable_mod(a: &IntMatrix, b: &[BigInt], n: &BigInt) -> Result<bool, LinDiophError> {
    let (m, cols) = (a.rows(), a.cols());
    let mut entries = Vec::with_capacity(m * (cols + m));
    for i in 0..m {
        for j in 0..cols {
            entries.push(a.at(i, j).clone());
        }
        for j in 0..m {
            entries.push(if i == j { n.clone() } else { BigInt::zero() });
        }
    }
    let ext = IntMatrix::new(m, cols + m, entries);
    Ok(solve_integer_system(&ext, b)?.is_ok())
}

/// Checks the Minkowski-Hasse statement for linear systems: Ax = b is
/// integrally solvable iff the congruence Ax = b (mod N) is solvable for
/// every modulus.
pub fn solvable_all_moduli(
    a: &IntMatrix,
    b: &[BigInt],
    test_moduli: &[u64],
) -> Result<CongruenceReport, LinDiophError> {
    let mut per_modulus = Vec::with_capacity(test_moduli.len());
    for &nn in test_moduli {
        per_modulus.push((nn, solvable_mod(a, b, &BigInt::from(nn))?));
    }
    let integer = solve_integer_system(a, b)?;
    let failing_modulus = match &integer {
        Ok(_) => None,
        Err(w) => Some(match &w.divisor {
            // d_i does not divide c_i: already fails mod d_i.
            Some(d) => d.clone(),
            // c_i != 0 beyond the rank: fails mod |c_i| + 1.
            None => w.target.abs() + 1,
        }),
    };
    Ok(CongruenceReport {
        per_modulus,
        integer_solvable: integer.is_ok(),
        failing_modulus,
    })
}

/// Parses the matrix file format: first line `m n`, then m rows of n
/// whitespace-separated integers; an optional extra line holds b.
pub fn parse_matrix_file(text: &str) -> Result<(IntMatrix, Option<Vec<BigInt>>), String> {
    let mut numbers = text.split_whitespace().map(|tok| {
        tok.parse::<BigInt>()
            .map_err(|_| format!("bad integer `{}`", tok))
    });
    let mut next = |what: &str| -> Result<BigInt, String> {
        numbers
            .next()
            .unwrap_or_else(|| Err(format!("missing {}", what)))
    };
    let m = next("row count")?
        .to_string()
        .parse::<usize>()
        .map_err(|_| "bad row count".to_string())?;
    let n = next("column count")?
        .to_string()
        .parse::<usize>()
        .map_err(|_| "bad column count".to_string())?;
    if m == 0 || n == 0 {
        return Err("dimensions must be positive".into());
    }
    let mut entries = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        entries.push(next("matrix entry")?);
    }
    let rest: Result<Vec<BigInt>, String> = numbers.collect();
    let rest = rest?;
    let b = match rest.len() {
        0 => None,
        len if len == m => Some(rest),
        len => {
            return Err(format!(
                "trailing vector has {} entries, expected {} (rows)",
                len, m
            ))
        }
    };
    Ok((IntMatrix::new(m, n, entries), b))
}
