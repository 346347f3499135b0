//! Hermite and Smith normal forms over the integers.
//!
//! The Hermite form here is column-style: `h = m·u` with `u` unimodular, the
//! nonzero columns of `h` first, each pivot (topmost nonzero entry of a
//! column) strictly below the previous one and positive, and every entry to
//! the left of a pivot in its row reduced into `[0, pivot)`. It is unique for
//! a given column span, which is what sublattice equality relies on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
}

impl Hnf {
    /// Number of nonzero columns (the rank of the input).
    pub fn rank(&self) -> usize {
        (0..self.h.cols())
            .take_while(|&j| (0..self.h.rows()).any(|i| !self.h[(i, j)].is_zero()))
            .count()
    }
}

/// `(g, x, y)` with `x·a + y·b = g = gcd(a, b) ≥ 0`.
pub(crate) fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Replaces columns `(p, q)` of `m` by `(x·p + y·q, s·p + t·q)`.
fn mix_columns(
    m: &mut IntMatrix,
    p: usize,
    q: usize,
    x: &BigInt,
    y: &BigInt,
    s: &BigInt,
    t: &BigInt,
) {
    for i in 0..m.rows() {
        let a = m[(i, p)].clone();
        let b = m[(i, q)].clone();
        m[(i, p)] = x * &a + y * &b;
        m[(i, q)] = s * &a + t * &b;
    }
}

pub fn hnf(m: &IntMatrix) -> Hnf {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.cols());
    let cols = m.cols();
    let mut pc = 0;
    for row in 0..m.rows() {
        if pc == cols {
            break;
        }
        for j in pc + 1..cols {
            if h[(row, j)].is_zero() {
                continue;
            }
            let a = h[(row, pc)].clone();
            let b = h[(row, j)].clone();
            let (g, x, y) = ext_gcd(&a, &b);
            let s = -(&b / &g);
            let t = &a / &g;
            mix_columns(&mut h, pc, j, &x, &y, &s, &t);
            mix_columns(&mut u, pc, j, &x, &y, &s, &t);
        }
        if h[(row, pc)].is_zero() {
            continue;
        }
        if h[(row, pc)].is_negative() {
            h.negate_col(pc);
            u.negate_col(pc);
        }
        let pivot = h[(row, pc)].clone();
        for j in 0..pc {
            let q = h[(row, j)].div_floor(&pivot);
            if !q.is_zero() {
                let nq = -q;
                h.add_col_multiple(j, pc, &nq);
                u.add_col_multiple(j, pc, &nq);
            }
        }
        pc += 1;
    }
    Hnf { h, u }
}

/// Smith form `s = u·m·v`; `u_inv` is tracked alongside `u` because
/// saturation and basis completion need the columns of `u⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
}

impl Snf {
    pub fn rank(&self) -> usize {
        let k = self.s.rows().min(self.s.cols());
        (0..k).take_while(|&i| !self.s[(i, i)].is_zero()).count()
    }

    /// Nonzero diagonal entries `d_1 | d_2 | …`.
    pub fn factors(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.s[(i, i)].clone()).collect()
    }
}

struct SnfState {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    /// `row[dst] += c·row[src]`
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.s.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        self.u_inv.add_col_multiple(src, dst, &-c);
    }

    /// `col[dst] += c·col[src]`
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.s.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
    }

    fn negate_row(&mut self, i: usize) {
        self.s.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn smallest_nonzero(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.s.rows() {
            for j in t..self.s.cols() {
                let a = self.s[(i, j)].abs();
                if a.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                    best = Some((i, j, a));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

pub fn snf(m: &IntMatrix) -> Snf {
    let (r, c) = (m.rows(), m.cols());
    let mut st = SnfState {
        s: m.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
    };
    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = st.smallest_nonzero(t) else {
                return finish(st);
            };
            st.swap_rows(t, pi);
            st.swap_cols(t, pj);
            let pivot = st.s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..r {
                let q = st.s[(i, t)].div_floor(&pivot);
                if !q.is_zero() {
                    st.add_row(i, t, &-q);
                }
                if !st.s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                let q = st.s[(t, j)].div_floor(&pivot);
                if !q.is_zero() {
                    st.add_col(j, t, &-q);
                }
                if !st.s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let offender =
                (t + 1..r).find(|&i| (t + 1..c).any(|j| !st.s[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.s[(t, t)].is_negative() {
            st.negate_row(t);
        }
    }
    finish(st)
}

fn finish(st: SnfState) -> Snf {
    Snf {
        s: st.s,
        u: st.u,
        v: st.v,
        u_inv: st.u_inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn hnf_already_reduced() {
        let a = m(&[&[2, 0], &[0, 3]]);
        assert_eq!(hnf(&a).h, a);
    }

    #[test]
    fn hnf_index_two_lattice() {
        // columns (1,1) and (1,-1)
        let r = hnf(&m(&[&[1, 1], &[1, -1]]));
        assert_eq!(r.h, m(&[&[1, 0], &[1, 2]]));
        assert_eq!(&m(&[&[1, 1], &[1, -1]]) * &r.u, r.h);
    }

    #[test]
    fn hnf_zero() {
        let z = IntMatrix::zeros(2, 2);
        let r = hnf(&z);
        assert_eq!(r.h, z);
        assert_eq!(r.rank(), 0);
    }

    #[test]
    fn hnf_zero_columns_last() {
        let r = hnf(&m(&[&[0, 2, 4], &[0, 1, 2]]));
        assert_eq!(r.rank(), 1);
        assert_eq!(r.h.column(0), crate::exactlin::int_vec(&[2, 1]));
        assert!(r.h.column(1).iter().all(Zero::is_zero));
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf(&IntMatrix::identity(3)).s, IntMatrix::identity(3));
        assert_eq!(snf(&m(&[&[2, 0], &[0, 3]])).s, m(&[&[1, 0], &[0, 6]]));
        assert_eq!(snf(&m(&[&[2, 0], &[0, 2]])).s, m(&[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn snf_rectangular_and_inverse() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let r = snf(&a);
        assert_eq!(&(&r.u * &a) * &r.v, r.s);
        assert_eq!(&r.u * &r.u_inv, IntMatrix::identity(3));
        assert_eq!(r.factors(), crate::exactlin::int_vec(&[2, 6, 12]));
    }
}
