use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, IntVector, Rat, RatMatrix, RatVector};
use super::normal_form::snf;

/// Finds some integer `x` with `a·x = b`, or `None` when no integer solution exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<IntVector> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let f = snf(a);
    let c = f.u.mul_vec(b);
    let r = f.rank();
    let mut y = vec![BigInt::zero(); a.cols()];
    for i in 0..c.len() {
        if i < r {
            let d = &f.s[(i, i)];
            let (q, rem) = c[i].div_rem(d);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    Some(f.v.mul_vec(&y))
}

/// Integer solution of `a·x = b` for a rational right-hand side.
pub fn solve_integer_rat(a: &IntMatrix, b: &[Rat]) -> Option<IntVector> {
    let b = super::matrix::to_int_vec(b)?;
    solve_integer(a, &b)
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = m[(r, c)].recip();
        for j in c..cols {
            let v = &m[(r, j)] * &inv;
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..cols {
                if m[(r, j)].is_zero() {
                    continue;
                }
                let v = &m[(i, j)] - &f * &m[(r, j)];
                m[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis (as columns) of the rational null space of `a`.
pub fn kernel_rational(a: &RatMatrix) -> RatMatrix {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let cols = a.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<RatVector> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[(r, f)];
            }
            v
        })
        .collect();
    RatMatrix::from_columns(cols, &basis)
}

pub fn rank_rational(a: &RatMatrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

pub fn rank_integer(a: &IntMatrix) -> usize {
    snf(a).rank()
}

/// Exact inverse of a square rational matrix, `None` when singular.
pub fn inverse_rational(a: &RatMatrix) -> Option<RatMatrix> {
    assert!(a.is_square());
    let n = a.rows();
    let mut aug = a.hcat(&RatMatrix::identity(n));
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let idx: Vec<usize> = (n..2 * n).collect();
    Some(aug.select_columns(&idx))
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(a: &IntMatrix) -> Option<IntMatrix> {
    inverse_rational(&a.to_rational())?.to_integer()
}

/// Unique solution of `a·x = b` for square invertible `a`; `None` otherwise.
pub fn solve_rational_unique(a: &RatMatrix, b: &[Rat]) -> Option<RatVector> {
    let inv = inverse_rational(a)?;
    Some(inv.mul_vec(b))
}

/// Some solution of `a·x = b` over Q (free variables set to zero).
pub fn solve_rational(a: &RatMatrix, b: &[Rat]) -> Option<RatVector> {
    let rhs = RatMatrix::from_columns(b.len(), &[b.to_vec()]);
    let mut aug = a.hcat(&rhs);
    let pivots = rref(&mut aug);
    let cols = a.cols();
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[(r, cols)].clone();
    }
    Some(x)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                m[(i, j)] = v;
            }
        }
        prev = m[(k, k)].clone();
    }
    sign * &m[(n - 1, n - 1)]
}

pub fn determinant_rational(a: &RatMatrix) -> Rat {
    let d = a.common_denominator();
    let scaled = a
        .scale(&Rat::from_integer(d.clone()))
        .to_integer()
        .expect("cleared denominators");
    Rat::new(determinant(&scaled), d.pow(a.rows() as u32))
}

/// Scales each column of `a` by the lcm of its denominators and divides by the
/// gcd of its entries, yielding primitive integer columns with the same span.
pub fn primitive_integer_columns(a: &RatMatrix) -> IntMatrix {
    let cols: Vec<IntVector> = a
        .columns()
        .into_iter()
        .map(|c| {
            let den = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let ints: IntVector = c
                .iter()
                .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
                .collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if g.is_zero() || g.is_one() {
                ints
            } else {
                ints.iter().map(|x| x / &g).collect()
            }
        })
        .collect();
    IntMatrix::from_columns(a.rows(), &cols)
}

pub fn is_unimodular(a: &IntMatrix) -> bool {
    a.is_square() && determinant(a).abs().is_one()
}
