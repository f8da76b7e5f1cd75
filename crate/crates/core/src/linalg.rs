//! Small dense linear algebra: fraction-free exact determinants, exact rank
//! and solves, and a pivoted floating-point solver.

#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, One, Signed, Zero};

use crate::scalar::{Rational, Real};

/// Sign of an exact quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Signed + Zero>(v: &T) -> Self {
        if v.is_zero() {
            Sign::Zero
        } else if v.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i8(v: i8) -> Self {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn negate(self) -> Self {
        Sign::from_i8(-self.as_i8())
    }

    pub fn times(self, other: Sign) -> Self {
        Sign::from_i8(self.as_i8() * other.as_i8())
    }
}

/// Determinant by Bareiss elimination. Every division is exact, so this is
/// valid over any integral domain (`BigInt`) as well as over fields.
pub fn bareiss_det<T: Clone + Num + Signed>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v / prev.clone();
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Scales a rational row by the positive lcm of its denominators.
pub fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
}

/// Exact sign of a rational determinant. Rows are rescaled to integers
/// first, which preserves the sign and keeps the elimination in `BigInt`.
pub fn det_sign(rows: &[Vec<Rational>]) -> Sign {
    let int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    Sign::of(&bareiss_det(int_rows))
}

pub fn det_exact(rows: Vec<Vec<Rational>>) -> Rational {
    bareiss_det(rows)
}

/// Rank of a rational matrix (rows need not be square).
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n_cols {
        if r == n_rows {
            break;
        }
        let Some(p) = (r..n_rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..n_rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[r][c];
            for j in c..n_cols {
                let v = &m[r][j] * &f;
                m[i][j] -= v;
            }
        }
        r += 1;
    }
    r
}

/// Solves `Σ_j λ_j columns[j] = rhs` exactly. The columns are assumed
/// linearly independent; returns `None` if the system is inconsistent.
pub fn solve_columns(columns: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n_unknowns = columns.len();
    let n_eq = rhs.len();
    // Augmented matrix, one row per equation.
    let mut m: Vec<Vec<Rational>> = (0..n_eq)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(n_unknowns);
    let mut r = 0;
    for c in 0..n_unknowns {
        let p = (r..n_eq).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for j in c..=n_unknowns {
            m[r][j] *= &inv;
        }
        for i in 0..n_eq {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=n_unknowns {
                let v = &m[r][j] * &f;
                m[i][j] -= v;
            }
        }
        pivots.push(r);
        r += 1;
    }
    if (r..n_eq).any(|i| !m[i][n_unknowns].is_zero()) {
        return None;
    }
    Some(
        pivots
            .iter()
            .map(|&row| m[row][n_unknowns].clone())
            .collect(),
    )
}

/// Determinant with partial pivoting.
pub fn float_det<T: Real>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap())
            .unwrap();
        if m[p][k] == T::zero() {
            return T::zero();
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det = det * m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j] * f;
                m[i][j] = m[i][j] - v;
            }
        }
    }
    det
}

/// Solves `m · y = rhs` with partial pivoting. `None` for a singular matrix.
pub fn float_solve<T: Real>(mut m: Vec<Vec<T>>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let n = m.len();
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap())?;
        if m[p][k] == T::zero() {
            return None;
        }
        m.swap(p, k);
        rhs.swap(p, k);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j] * f;
                m[i][j] = m[i][j] - v;
            }
            let v = rhs[k] * f;
            rhs[i] = rhs[i] - v;
        }
    }
    let mut y = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for j in k + 1..n {
            acc = acc - m[k][j] * y[j];
        }
        y[k] = acc / m[k][k];
    }
    Some(y)
}
