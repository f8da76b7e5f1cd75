//! Polynomials in `d` variables and their polar forms (blossoms).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Real};

/// A polynomial `Σ c_α x^α` with exponent vectors of length `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    dim: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        let mut p = Self::new(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn monomial(exponents: Vec<u32>) -> Self {
        let mut p = Self::new(exponents.len());
        p.add_term(exponents, T::one());
        p
    }

    /// Adds `c x^α`; zero coefficients are dropped.
    pub fn add_term(&mut self, exponents: Vec<u32>, c: T) {
        assert_eq!(exponents.len(), self.dim, "exponent vector length");
        let entry = self.terms.entry(exponents).or_insert_with(T::zero);
        *entry = *entry + c;
        self.terms.retain(|_, v| *v != T::zero());
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], T)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, &c)| {
            let m = e
                .iter()
                .zip(x)
                .fold(T::one(), |m, (&p, &xi)| m * xi.powi(p as i32));
            acc + c * m
        })
    }

    /// Parses sums of terms such as `"1"`, `"x0"`, `"x0^2"`,
    /// `"3*x0*x1 - 2*x1^2 + 0.5"`. Variables are `x0 … x{dim-1}`.
    pub fn parse(input: &str, dim: usize) -> Result<Self> {
        let fail = |reason: &str| Error::ParsePolynomial {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(fail("empty input"));
        }
        let mut poly = Self::new(dim);
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (negative, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' => (false, &rest[1..]),
                _ => (false, rest),
            };
            // A term ends at the next sign that does not follow an exponent marker.
            let bytes = body.as_bytes();
            let end = (1..bytes.len())
                .find(|&i| {
                    (bytes[i] == b'+' || bytes[i] == b'-')
                        && !matches!(bytes[i - 1], b'e' | b'E' | b'^')
                })
                .unwrap_or(bytes.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(fail("dangling sign"));
            }
            let mut coef = T::one();
            let mut exps = vec![0u32; dim];
            for factor in term.split('*') {
                if let Some(var) = factor.strip_prefix('x') {
                    let (index, power) = match var.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|_| fail("bad exponent"))?),
                        None => (var, 1),
                    };
                    let j: usize = index.parse().map_err(|_| fail("bad variable index"))?;
                    if j >= dim {
                        return Err(fail(&format!("variable x{j} exceeds dimension {dim}")));
                    }
                    exps[j] += power;
                } else {
                    let r = parse_rational(factor).map_err(|_| fail("bad coefficient"))?;
                    coef = coef * T::from_rational(&r);
                }
            }
            if negative {
                coef = -coef;
            }
            poly.add_term(exps, coef);
        }
        Ok(poly)
    }
}

impl<T: Real> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (j, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{j}")?,
                    _ => write!(f, "*x{j}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

/// The symmetric multi-affine form of `arity` point arguments whose
/// diagonal is the polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarForm<T> {
    poly: Polynomial<T>,
    arity: usize,
}

pub fn blossom<T: Real>(poly: &Polynomial<T>, arity: usize) -> Result<PolarForm<T>> {
    let degree = poly.degree();
    if degree > arity {
        return Err(Error::DegreeExceedsArity { degree, arity });
    }
    Ok(PolarForm {
        poly: poly.clone(),
        arity,
    })
}

impl<T: Real> PolarForm<T> {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn polynomial(&self) -> &Polynomial<T> {
        &self.poly
    }

    /// Value on `arity` points. The blossom of `x^α` with `|α| = m` averages
    /// `Π_s u_{σ(s)}[j_s]` over all injective assignments of its `m` linear
    /// factors to arguments; the sum is accumulated argument by argument
    /// over the exponents still unassigned.
    pub fn eval(&self, args: &[&[T]]) -> Result<T> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        if let Some(a) = args.iter().find(|a| a.len() != self.poly.dim) {
            return Err(Error::PointDimension {
                expected: self.poly.dim,
                found: a.len(),
            });
        }
        let k = self.arity;
        let mut total = T::zero();
        for (alpha, c) in self.poly.terms() {
            let m: usize = alpha.iter().map(|&p| p as usize).sum();
            let mut memo = HashMap::new();
            let sum = assignments(args, 0, alpha.to_vec(), &mut memo);
            // k! / (k - m)! injective assignments
            let count = ((k - m + 1)..=k).fold(T::one(), |a, i| a * T::from_usize_lossy(i));
            total = total + c * sum / count;
        }
        Ok(total)
    }
}

fn assignments<T: Real>(
    args: &[&[T]],
    i: usize,
    remaining: Vec<u32>,
    memo: &mut HashMap<(usize, Vec<u32>), T>,
) -> T {
    let left: u32 = remaining.iter().sum();
    if left as usize > args.len() - i {
        return T::zero();
    }
    if i == args.len() {
        return T::one();
    }
    if let Some(&v) = memo.get(&(i, remaining.clone())) {
        return v;
    }
    let mut acc = assignments(args, i + 1, remaining.clone(), memo);
    for j in 0..remaining.len() {
        if remaining[j] == 0 {
            continue;
        }
        let mut next = remaining.clone();
        next[j] -= 1;
        let ways = T::from_usize_lossy(remaining[j] as usize);
        acc = acc + ways * args[i][j] * assignments(args, i + 1, next, memo);
    }
    memo.insert((i, remaining), acc);
    acc
}
