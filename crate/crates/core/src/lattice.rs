//! The ambient lattice `Z^n` with a rational inner product, and its
//! sublattices.
//!
//! A [`Sublattice`] is stored by its canonical column-Hermite basis, so two
//! sublattices are equal exactly when their `Z`-spans are. Saturated
//! sublattices (direct summands of `Z^n`) are in bijection with rational
//! subspaces of `Q^n`; most of the crate works with those.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactlin::{
    determinant_rational, hnf, inverse_rational, kernel_rational, primitive_integer_columns, snf,
    solve_integer, IntMatrix, IntVector, Rat, RatMatrix, RatVector,
};
use crate::{Error, Result};

/// `Z^n ⊂ Q^n` together with a positive definite Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Ambient {
    n: usize,
    gram: RatMatrix,
}

impl Ambient {
    pub fn new(gram: RatMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::BadGram);
        }
        let n = gram.rows();
        if gram.transpose() != gram {
            return Err(Error::BadGram);
        }
        for k in 1..=n {
            let idx: Vec<usize> = (0..k).collect();
            let minor = gram.select_rows(&idx).select_columns(&idx);
            if !determinant_rational(&minor).is_positive() {
                return Err(Error::BadGram);
            }
        }
        Ok(Ambient { n, gram })
    }

    pub fn standard(n: usize) -> Self {
        Ambient {
            n,
            gram: RatMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        crate::exactlin::dot::<Rat>(x, &self.gram.mul_vec(y))
    }

    /// Gram matrix of the columns of `basis`: `basisᵀ·G·basis`.
    pub fn restricted_gram(&self, basis: &RatMatrix) -> RatMatrix {
        &(&basis.transpose() * &self.gram) * basis
    }

    pub fn direct_sum(&self, other: &Ambient) -> Ambient {
        Ambient {
            n: self.n + other.n,
            gram: RatMatrix::block_diagonal(&self.gram, &other.gram),
        }
    }
}

/// A sublattice of `Z^n`, stored as its canonical Hermite basis (`n × rank`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sublattice {
    n: usize,
    basis: IntMatrix,
}

impl Sublattice {
    /// Sublattice generated by the columns of `gens` (any number, any rank).
    pub fn from_generators(gens: &IntMatrix) -> Self {
        let n = gens.rows();
        let h = hnf(gens);
        let r = h.rank();
        let idx: Vec<usize> = (0..r).collect();
        Sublattice {
            n,
            basis: h.h.select_columns(&idx),
        }
    }

    pub fn from_columns(n: usize, cols: &[IntVector]) -> Self {
        Self::from_generators(&IntMatrix::from_columns(n, cols))
    }

    pub fn zero(n: usize) -> Self {
        Sublattice {
            n,
            basis: IntMatrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Sublattice {
            n,
            basis: IntMatrix::identity(n),
        }
    }

    /// Span of the given standard basis vectors.
    pub fn coordinate(n: usize, axes: &[usize]) -> Self {
        let cols: Vec<IntVector> = axes
            .iter()
            .map(|&a| {
                (0..n)
                    .map(|i| {
                        if i == a {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_columns(n, &cols)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rational(&self) -> RatMatrix {
        self.basis.to_rational()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.n
    }

    pub fn is_saturated(&self) -> bool {
        is_direct_summand(self)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        solve_integer(&self.basis, v).is_some()
    }

    /// Integer coordinates of `v` in the stored basis.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<IntVector> {
        solve_integer(&self.basis, v)
    }

    /// Whether `v` lies in the rational span.
    pub fn span_contains(&self, v: &[Rat]) -> bool {
        let m = self.basis_rational();
        crate::exactlin::solve_rational(&m, v).is_some()
    }

    /// Image under a linear map of `Z^n`.
    pub fn image(&self, a: &IntMatrix) -> Sublattice {
        Sublattice::from_generators(&(a * &self.basis))
    }

    /// Whether `self ⊆ other` as lattices.
    pub fn is_sublattice_of(&self, other: &Sublattice) -> bool {
        self.basis.columns().iter().all(|c| other.contains(c))
    }
}

impl fmt::Debug for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Sublattice(n={}, cols={:?})",
            self.n,
            self.basis.transpose()
        )
    }
}

fn check_dims(a: &Sublattice, b: &Sublattice) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    Ok(())
}

/// `Z^n ∩ span_Q(s)`.
pub fn saturate(s: &Sublattice) -> Sublattice {
    if s.is_zero() {
        return s.clone();
    }
    // u·B·v = D, so span_Q(B) is spanned by the first r columns of u⁻¹, and
    // u⁻¹ being unimodular makes their Z-span a direct summand.
    let f = snf(&s.basis);
    let idx: Vec<usize> = (0..f.rank()).collect();
    Sublattice::from_generators(&f.u_inv.select_columns(&idx))
}

pub fn is_direct_summand(s: &Sublattice) -> bool {
    snf(&s.basis).factors().iter().all(One::is_one)
}

/// Saturated sublattice spanning `span(a) + span(b)`.
pub fn sum(a: &Sublattice, b: &Sublattice) -> Result<Sublattice> {
    check_dims(a, b)?;
    Ok(saturate(&Sublattice::from_generators(
        &a.basis.hcat(&b.basis),
    )))
}

/// Saturated sublattice spanning `span(a) ∩ span(b)`.
pub fn meet(a: &Sublattice, b: &Sublattice) -> Result<Sublattice> {
    check_dims(a, b)?;
    if a.is_zero() || b.is_zero() {
        return Ok(Sublattice::zero(a.n));
    }
    let stacked = a.basis.hcat(&b.basis.negated()).to_rational();
    let ker = kernel_rational(&stacked);
    if ker.cols() == 0 {
        return Ok(Sublattice::zero(a.n));
    }
    let idx: Vec<usize> = (0..a.rank()).collect();
    let coeffs = ker.select_rows(&idx);
    let vectors = &a.basis_rational() * &coeffs;
    Ok(saturate(&Sublattice::from_generators(
        &primitive_integer_columns(&vectors),
    )))
}

/// Finitely generated abelian group `Z^free ⊕ ⊕ Z/d_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAbelian {
    /// Invariant factors `d_1 | d_2 | …`, each at least 2.
    pub factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl FiniteAbelian {
    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty() && self.free_rank == 0
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.factors.iter().product())
    }
}

/// Structure of `outer / a`, where `outer` is a sublattice containing `a`.
pub fn quotient_group(a: &Sublattice, outer: &Sublattice) -> Result<FiniteAbelian> {
    check_dims(a, outer)?;
    let coords: Vec<IntVector> = a
        .basis
        .columns()
        .iter()
        .map(|c| outer.coordinates(c).ok_or(Error::NotContained))
        .collect::<Result<_>>()?;
    let c = IntMatrix::from_columns(outer.rank(), &coords);
    let f = snf(&c);
    let factors: Vec<BigInt> = f.factors().into_iter().filter(|d| !d.is_one()).collect();
    Ok(FiniteAbelian {
        factors,
        free_rank: outer.rank() - f.rank(),
    })
}

/// A unimodular completion `[S | T]` of a saturated basis `S`, with its inverse
/// split as `[[P1], [P2]]`. The columns of `T` lift a basis of `L/L'`, `P2`
/// maps `Z^n` onto the quotient coordinates with kernel exactly `L'`, and `P1`
/// recovers `S`-coordinates of vectors in `span(S)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuotientLattice {
    rank: usize,
    completed: IntMatrix,
    inverse: IntMatrix,
}

impl QuotientLattice {
    pub fn sub_rank(&self) -> usize {
        self.rank
    }

    pub fn quotient_rank(&self) -> usize {
        self.completed.rows() - self.rank
    }

    /// `[S | T]`, unimodular.
    pub fn completed_basis(&self) -> &IntMatrix {
        &self.completed
    }

    /// `S`, the saturated sublattice basis.
    pub fn sub_basis(&self) -> IntMatrix {
        let idx: Vec<usize> = (0..self.rank).collect();
        self.completed.select_columns(&idx)
    }

    /// `T`: lattice vectors whose images form a basis of `L/L'`.
    pub fn lifts(&self) -> IntMatrix {
        let idx: Vec<usize> = (self.rank..self.completed.cols()).collect();
        self.completed.select_columns(&idx)
    }

    /// `P1`: coordinates along `S`.
    pub fn sub_coordinates(&self) -> IntMatrix {
        let idx: Vec<usize> = (0..self.rank).collect();
        self.inverse.select_rows(&idx)
    }

    /// `P2` as an integer matrix.
    pub fn projection_int(&self) -> IntMatrix {
        let idx: Vec<usize> = (self.rank..self.inverse.rows()).collect();
        self.inverse.select_rows(&idx)
    }

    /// `P2`: the linear projection onto quotient coordinates.
    pub fn projection(&self) -> RatMatrix {
        self.projection_int().to_rational()
    }

    pub fn project(&self, v: &[Rat]) -> RatVector {
        self.projection().mul_vec(v)
    }

    /// Whether `v + λ ∈ span(S)` for some `λ ∈ Z^n`, i.e. whether the
    /// projection of `v` is integral.
    pub fn shifts_into_subspace(&self, v: &[Rat]) -> Option<IntVector> {
        let q = crate::exactlin::to_int_vec(&self.project(v))?;
        let lambda = self.lifts().mul_vec(&q);
        Some(lambda.iter().map(|x| -x).collect())
    }
}

pub fn quotient_lattice(s: &Sublattice) -> Result<QuotientLattice> {
    if !s.is_saturated() {
        return Err(Error::NotSaturated);
    }
    let n = s.n;
    let k = s.rank();
    let f = snf(&s.basis);
    let t_idx: Vec<usize> = (k..n).collect();
    let completed = s.basis.hcat(&f.u_inv.select_columns(&t_idx));
    let inverse = inverse_rational(&completed.to_rational())
        .and_then(|m| m.to_integer())
        .expect("completion of a saturated basis is unimodular");
    Ok(QuotientLattice {
        rank: k,
        completed,
        inverse,
    })
}

/// Saturated sublattice spanning the Gram-orthogonal complement of `span(s)`.
pub fn orthogonal_complement(s: &Sublattice, amb: &Ambient) -> Result<Sublattice> {
    if s.n != amb.n {
        return Err(Error::DimensionMismatch {
            expected: amb.n,
            found: s.n,
        });
    }
    if s.is_zero() {
        return Ok(Sublattice::full(s.n));
    }
    let constraints = &s.basis_rational().transpose() * &amb.gram;
    let ker = kernel_rational(&constraints);
    if ker.cols() == 0 {
        return Ok(Sublattice::zero(s.n));
    }
    Ok(saturate(&Sublattice::from_generators(
        &primitive_integer_columns(&ker),
    )))
}

/// Orthogonal projection of `x` onto the Gram-orthogonal complement of
/// `span(s)` (the unique point of `x + span(s)` orthogonal to `span(s)`).
pub fn orthogonal_residual(x: &[Rat], s: &Sublattice, amb: &Ambient) -> RatVector {
    if s.is_zero() {
        return x.to_vec();
    }
    let b = s.basis_rational();
    let bt_g = &b.transpose() * &amb.gram;
    let small = &bt_g * &b;
    let coeff = inverse_rational(&small)
        .expect("Gram restricted to a basis is invertible")
        .mul_vec(&bt_g.mul_vec(x));
    crate::exactlin::vec_sub(x, &b.mul_vec(&coeff))
}

/// Index `[Z^n : span_Z(cols)]` for `n` independent integer columns, via the
/// absolute determinant.
pub fn lattice_index(cols: &IntMatrix) -> BigInt {
    crate::exactlin::determinant(cols).abs()
}

/// Canonical basis of the lattice generated by rational columns (full rank
/// assumed): Hermite form of the denominators-cleared generators.
pub fn rational_lattice_basis(gens: &RatMatrix) -> RatMatrix {
    let d = gens.common_denominator();
    let scaled = gens
        .scale(&Rat::from_integer(d.clone()))
        .to_integer()
        .expect("cleared");
    let h = hnf(&scaled);
    let r = h.rank();
    let idx: Vec<usize> = (0..r).collect();
    let inv_d = Rat::new(BigInt::one(), d);
    h.h.select_columns(&idx).to_rational().scale(&inv_d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{int_vec, rat};

    fn sub(cols: &[&[i64]]) -> Sublattice {
        let n = cols[0].len();
        Sublattice::from_columns(n, &cols.iter().map(|c| int_vec(c)).collect::<Vec<_>>())
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate(&sub(&[&[2, 0]])), sub(&[&[1, 0]]));
        assert_eq!(saturate(&sub(&[&[1, 1], &[1, -1]])), Sublattice::full(2));
        let s = sub(&[&[2, 4, 6]]);
        assert_eq!(saturate(&saturate(&s)), saturate(&s));
        assert_eq!(saturate(&s), sub(&[&[1, 2, 3]]));
    }

    #[test]
    fn direct_summand_examples() {
        assert!(is_direct_summand(&sub(&[&[1, 0]])));
        assert!(!is_direct_summand(&sub(&[&[2, 0]])));
        assert!(!is_direct_summand(&sub(&[&[1, 1], &[1, -1]])));
        assert!(is_direct_summand(&Sublattice::zero(3)));
    }

    #[test]
    fn sum_and_meet_of_axes() {
        let x = Sublattice::coordinate(2, &[0]);
        let y = Sublattice::coordinate(2, &[1]);
        assert_eq!(meet(&x, &y).unwrap(), Sublattice::zero(2));
        assert_eq!(sum(&x, &y).unwrap(), Sublattice::full(2));
        assert!(matches!(
            sum(&x, &Sublattice::zero(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn meet_of_planes() {
        let a = sub(&[&[1, 0, 0], &[0, 1, 0]]);
        let b = sub(&[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(meet(&a, &b).unwrap(), Sublattice::coordinate(3, &[1]));
        let c = sub(&[&[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(meet(&a, &c).unwrap(), sub(&[&[1, 1, 0]]));
    }

    #[test]
    fn quotient_group_examples() {
        let full = Sublattice::full(2);
        let q = quotient_group(&sub(&[&[2, 0], &[0, 2]]), &full).unwrap();
        assert_eq!(q.factors, int_vec(&[2, 2]));
        assert_eq!(q.order(), Some(BigInt::from(4)));
        assert!(quotient_group(&full, &full).unwrap().is_trivial());
        let q = quotient_group(&sub(&[&[1, 1]]), &full).unwrap();
        assert_eq!(q.free_rank, 1);
        assert_eq!(
            quotient_group(&full, &sub(&[&[2, 0], &[0, 1]])),
            Err(Error::NotContained)
        );
    }

    #[test]
    fn quotient_lattice_examples() {
        let q = quotient_lattice(&Sublattice::coordinate(2, &[0])).unwrap();
        assert_eq!(q.lifts(), IntMatrix::from_i64_rows(&[&[0], &[1]]));
        assert_eq!(
            q.projection(),
            IntMatrix::from_i64_rows(&[&[0, 1]]).to_rational()
        );

        let diag = sub(&[&[1, 1]]);
        let q = quotient_lattice(&diag).unwrap();
        assert_eq!(q.lifts().cols(), 1);
        let p = q.projection();
        assert!(p.mul_vec(&[rat(1, 1), rat(1, 1)]).iter().all(Zero::is_zero));
        assert_eq!(
            crate::exactlin::determinant(q.completed_basis()).abs(),
            BigInt::one()
        );

        let q = quotient_lattice(&Sublattice::full(3)).unwrap();
        assert_eq!(q.quotient_rank(), 0);
        assert_eq!(quotient_lattice(&sub(&[&[2, 0]])), Err(Error::NotSaturated));
    }

    #[test]
    fn orthogonal_complement_examples() {
        let amb = Ambient::standard(2);
        let x = Sublattice::coordinate(2, &[0]);
        assert_eq!(
            orthogonal_complement(&x, &amb).unwrap(),
            Sublattice::coordinate(2, &[1])
        );
        let klein =
            Ambient::new(IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]]).to_rational()).unwrap();
        assert_eq!(
            orthogonal_complement(&x, &klein).unwrap(),
            Sublattice::coordinate(2, &[1])
        );
        let hex =
            Ambient::new(IntMatrix::from_i64_rows(&[&[2, 1], &[1, 2]]).to_rational()).unwrap();
        let c = orthogonal_complement(&x, &hex).unwrap();
        assert_eq!(c, sub(&[&[1, -2]]));
        assert_eq!(orthogonal_complement(&c, &hex).unwrap(), x);
    }

    #[test]
    fn ambient_rejects_bad_gram() {
        let neg = IntMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]).to_rational();
        assert_eq!(Ambient::new(neg), Err(Error::BadGram));
        let asym = IntMatrix::from_i64_rows(&[&[2, 1], &[0, 2]]).to_rational();
        assert_eq!(Ambient::new(asym), Err(Error::BadGram));
    }

    #[test]
    fn residual_is_orthogonal() {
        let hex =
            Ambient::new(IntMatrix::from_i64_rows(&[&[2, 1], &[1, 2]]).to_rational()).unwrap();
        let x = Sublattice::coordinate(2, &[0]);
        let r = orthogonal_residual(&[rat(1, 3), rat(1, 2)], &x, &hex);
        assert!(hex.inner(&r, &[rat(1, 1), rat(0, 1)]).is_zero());
        assert_eq!(r[1], rat(1, 2));
    }
}
