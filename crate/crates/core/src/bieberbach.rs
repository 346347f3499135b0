//! Crystallographic and Bieberbach groups in lattice coordinates.
//!
//! A group is given by the lattice `Z^n` (the pure translations), a Gram
//! matrix, a finite holonomy group `H` of unimodular matrices and a vector
//! system `b: H → Q^n / Z^n`. An element is a pair `(A, b(A) + λ)` with
//! `λ ∈ Z^n`, acting by `x ↦ A·x + b(A) + λ`. Vector-system representatives
//! are stored reduced into `[0, 1)^n`.

use std::collections::VecDeque;
use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactlin::{
    determinant, frac_vec, inverse_rational, is_integral, solve_integer_rat, to_int_vec,
    to_rat_vec, vec_add, vec_sub, IntMatrix, IntVector, Rat, RatMatrix, RatVector,
};
use crate::invariant::{close_group_in_dim, MatrixGroup};
use crate::lattice::{rational_lattice_basis, Ambient};
use crate::{Error, Result};

/// Element `x ↦ A_index·x + b(index) + lattice` of a space group.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineElement {
    pub index: usize,
    pub lattice: IntVector,
}

/// A crystallographic group (torsion allowed) in lattice coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpaceGroup {
    ambient: Ambient,
    hol: MatrixGroup,
    vsys: Vec<RatVector>,
}

/// A torsion-free [`SpaceGroup`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BieberbachGroup(SpaceGroup);

impl Deref for BieberbachGroup {
    type Target = SpaceGroup;

    fn deref(&self) -> &SpaceGroup {
        &self.0
    }
}

impl SpaceGroup {
    /// Closes the point group generated by `point_gens`, propagates the vector
    /// system along the multiplication table and validates isometry and the
    /// cocycle condition.
    pub fn build(
        gram: RatMatrix,
        point_gens: &[IntMatrix],
        b_gens: &[RatVector],
        bound: usize,
    ) -> Result<SpaceGroup> {
        let ambient = Ambient::new(gram)?;
        let n = ambient.dim();
        if point_gens.len() != b_gens.len() {
            return Err(Error::GeneratorCountMismatch {
                expected: point_gens.len(),
                found: b_gens.len(),
            });
        }
        if let Some(b) = b_gens.iter().find(|b| b.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let hol = close_group_in_dim(n, point_gens, bound)?;
        let gens: Vec<usize> = point_gens
            .iter()
            .map(|g| hol.index_of(g).expect("generator in closure"))
            .collect();
        let mut vsys: Vec<Option<RatVector>> = vec![None; hol.order()];
        vsys[0] = Some(vec![Rat::zero(); n]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let bx = vsys[x].clone().expect("visited");
            for (gi, &g) in gens.iter().enumerate() {
                let y = hol.mul(x, g);
                let cand = frac_vec(&vec_add(
                    &hol.element(x).to_rational().mul_vec(&b_gens[gi]),
                    &bx,
                ));
                match &vsys[y] {
                    None => {
                        vsys[y] = Some(cand);
                        queue.push_back(y);
                    }
                    Some(existing) if *existing != cand => {
                        return Err(Error::InconsistentVectorSystem(y))
                    }
                    Some(_) => {}
                }
            }
        }
        let vsys: Vec<RatVector> = vsys
            .into_iter()
            .map(|b| b.expect("closure reaches every element"))
            .collect();
        Self::from_parts(ambient, hol, vsys)
    }

    /// Assembles and validates a group from an already closed holonomy group
    /// and one translation representative per element.
    pub fn from_parts(
        ambient: Ambient,
        hol: MatrixGroup,
        vsys: Vec<RatVector>,
    ) -> Result<SpaceGroup> {
        let n = ambient.dim();
        if hol.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: hol.dim(),
            });
        }
        if vsys.len() != hol.order() {
            return Err(Error::GeneratorCountMismatch {
                expected: hol.order(),
                found: vsys.len(),
            });
        }
        let g = ambient.gram().clone();
        for (i, a) in hol.elements().iter().enumerate() {
            let ar = a.to_rational();
            if &(&ar.transpose() * &g) * &ar != g {
                return Err(Error::NotIsometric(i));
            }
        }
        let group = SpaceGroup {
            ambient,
            hol,
            vsys: vsys.iter().map(|b| frac_vec(b)).collect(),
        };
        if let Some(k) = group.cocycle_violation() {
            return Err(Error::InconsistentVectorSystem(k));
        }
        Ok(group)
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn gram(&self) -> &RatMatrix {
        self.ambient.gram()
    }

    pub fn holonomy(&self) -> &MatrixGroup {
        &self.hol
    }

    /// Canonical translational part `b(i) ∈ [0,1)^n`.
    pub fn translation(&self, i: usize) -> &RatVector {
        &self.vsys[i]
    }

    pub fn vector_system(&self) -> &[RatVector] {
        &self.vsys
    }

    /// First product `k = i·j` with `b(k) ≢ A_i·b(j) + b(i)` mod `Z^n`.
    pub fn cocycle_violation(&self) -> Option<usize> {
        let h = &self.hol;
        for i in 0..h.order() {
            let ai = h.element(i).to_rational();
            for j in 0..h.order() {
                let k = h.mul(i, j);
                let d = vec_sub(
                    &vec_add(&ai.mul_vec(&self.vsys[j]), &self.vsys[i]),
                    &self.vsys[k],
                );
                if !is_integral(&d) {
                    return Some(k);
                }
            }
        }
        if !self.vsys[0].iter().all(Zero::is_zero) {
            return Some(0);
        }
        None
    }

    /// A holonomy element `A ≠ I` having a finite-order lift, if any.
    pub fn torsion_witness(&self) -> Option<usize> {
        (1..self.hol.order()).find(|&i| {
            has_finite_order_lift(
                self.hol.element(i),
                &self.vsys[i],
                self.hol.element_order(i),
            )
        })
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_witness().is_none()
    }

    pub fn is_orientable(&self) -> bool {
        self.hol.elements().iter().all(|a| determinant(a).is_one())
    }

    /// Integer carry `A_i·b(j) + b(i) − b(i·j)`.
    fn carry(&self, i: usize, j: usize) -> IntVector {
        let k = self.hol.mul(i, j);
        let v = vec_sub(
            &vec_add(
                &self.hol.element(i).to_rational().mul_vec(&self.vsys[j]),
                &self.vsys[i],
            ),
            &self.vsys[k],
        );
        to_int_vec(&v).expect("cocycle holds")
    }

    pub fn identity_element(&self) -> AffineElement {
        AffineElement {
            index: 0,
            lattice: vec![BigInt::zero(); self.dim()],
        }
    }

    pub fn translation_element(&self, lattice: IntVector) -> AffineElement {
        AffineElement { index: 0, lattice }
    }

    pub fn compose(&self, e: &AffineElement, f: &AffineElement) -> AffineElement {
        let a = self.hol.element(e.index);
        let lattice = vec_add(
            &vec_add(&a.mul_vec(&f.lattice), &e.lattice),
            &self.carry(e.index, f.index),
        );
        AffineElement {
            index: self.hol.mul(e.index, f.index),
            lattice,
        }
    }

    pub fn inverse_element(&self, e: &AffineElement) -> AffineElement {
        let inv = self.hol.inverse(e.index);
        let rhs = vec_add(&e.lattice, &self.carry(e.index, inv));
        let a_inv = self.hol.element(inv);
        AffineElement {
            index: inv,
            lattice: a_inv.mul_vec(&rhs).iter().map(|x| -x).collect(),
        }
    }

    /// Full translational part `b(index) + lattice`.
    pub fn translation_part(&self, e: &AffineElement) -> RatVector {
        vec_add(&self.vsys[e.index], &to_rat_vec(&e.lattice))
    }

    pub fn act(&self, e: &AffineElement, x: &[Rat]) -> RatVector {
        vec_add(
            &self.hol.element(e.index).to_rational().mul_vec(x),
            &self.translation_part(e),
        )
    }

    /// Some `γ` with `γ(x) = y`, scanning the finitely many holonomy elements.
    pub fn same_orbit(&self, x: &[Rat], y: &[Rat]) -> Option<AffineElement> {
        (0..self.hol.order()).find_map(|i| {
            let image = vec_add(&self.hol.element(i).to_rational().mul_vec(x), &self.vsys[i]);
            to_int_vec(&vec_sub(y, &image)).map(|lattice| AffineElement { index: i, lattice })
        })
    }

    /// Block-diagonal product of two groups.
    pub fn product(&self, other: &SpaceGroup) -> Result<SpaceGroup> {
        let (n1, n2) = (self.dim(), other.dim());
        let mut gens = Vec::new();
        let mut bs = Vec::new();
        for (i, a) in self.hol.elements().iter().enumerate().skip(1) {
            gens.push(IntMatrix::block_diagonal(a, &IntMatrix::identity(n2)));
            let mut b = self.vsys[i].clone();
            b.extend(std::iter::repeat_n(Rat::zero(), n2));
            bs.push(b);
        }
        for (i, a) in other.hol.elements().iter().enumerate().skip(1) {
            gens.push(IntMatrix::block_diagonal(&IntMatrix::identity(n1), a));
            let mut b = vec![Rat::zero(); n1];
            b.extend(other.vsys[i].iter().cloned());
            bs.push(b);
        }
        let bound = self.hol.order() * other.hol.order();
        SpaceGroup::build(
            self.ambient.direct_sum(&other.ambient).gram().clone(),
            &gens,
            &bs,
            bound.max(1),
        )
    }
}

impl BieberbachGroup {
    /// Builds and validates a Bieberbach group, rejecting torsion.
    pub fn build(
        gram: RatMatrix,
        point_gens: &[IntMatrix],
        b_gens: &[RatVector],
        bound: usize,
    ) -> Result<BieberbachGroup> {
        Self::try_from_space_group(SpaceGroup::build(gram, point_gens, b_gens, bound)?)
    }

    pub fn try_from_space_group(g: SpaceGroup) -> Result<BieberbachGroup> {
        match g.torsion_witness() {
            Some(i) => Err(Error::HasTorsion(i)),
            None => Ok(BieberbachGroup(g)),
        }
    }

    pub fn space_group(&self) -> &SpaceGroup {
        &self.0
    }

    pub fn into_space_group(self) -> SpaceGroup {
        self.0
    }
}

pub fn direct_product(g1: &BieberbachGroup, g2: &BieberbachGroup) -> BieberbachGroup {
    let g =
        g1.0.product(&g2.0)
            .expect("product of valid groups is valid");
    BieberbachGroup::try_from_space_group(g)
        .expect("product of torsion-free groups is torsion-free")
}

/// Whether some `(A, b + λ)`, `λ ∈ Z^n`, has finite order: with
/// `N = I + A + … + A^{m−1}` and `(A, c)^m = (I, N·c)`, this asks for an
/// integer solution of `N·λ = −N·b`.
pub fn has_finite_order_lift(a: &IntMatrix, b: &[Rat], order: usize) -> bool {
    let n = a.rows();
    let mut norm = IntMatrix::zeros(n, n);
    let mut power = IntMatrix::identity(n);
    for _ in 0..order {
        norm = norm.add_matrix(&power);
        power = &power * a;
    }
    debug_assert!(power.is_identity());
    let rhs: RatVector = norm.to_rational().mul_vec(b).iter().map(|x| -x).collect();
    solve_integer_rat(&norm, &rhs).is_some()
}

/// An affine map `y ↦ linear·y + translation`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineMap {
    pub linear: IntMatrix,
    pub translation: RatVector,
}

/// A space group produced by [`rebase_on_translations`]: coordinates are
/// relative to `lattice_basis`, a basis (in the original coordinates) of the
/// full translation lattice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rebased {
    pub lattice_basis: RatMatrix,
    pub group: SpaceGroup,
    /// Holonomy index (in `group`) of each input map.
    pub element_of_map: Vec<usize>,
}

impl Rebased {
    /// `[Λ : Z^k]`, the index of the original lattice in the translation lattice.
    pub fn lattice_index(&self) -> BigInt {
        let det = crate::exactlin::determinant_rational(&self.lattice_basis);
        let inv = det.recip();
        num_traits::Signed::abs(&inv).to_integer()
    }
}

/// Re-expresses the group generated by `Z^k` and `maps` in a basis of its
/// translation subgroup `Λ ⊇ Z^k` (generated by `Z^k` and the translations
/// of maps with identity linear part), so that the result has lattice `Z^k`.
pub fn rebase_on_translations(gram: &RatMatrix, maps: &[AffineMap]) -> Result<Rebased> {
    let k = gram.rows();
    let mut gens = RatMatrix::identity(k);
    for m in maps.iter().filter(|m| m.linear.is_identity()) {
        gens = gens.hcat(&RatMatrix::from_columns(
            k,
            std::slice::from_ref(&m.translation),
        ));
    }
    let basis = rational_lattice_basis(&gens);
    let inv = inverse_rational(&basis).expect("lattice basis is invertible");
    let mut linear = Vec::with_capacity(maps.len());
    let mut trans = Vec::with_capacity(maps.len());
    for m in maps {
        let conj = &(&inv * &m.linear.to_rational()) * &basis;
        let conj = conj.to_integer().ok_or_else(|| {
            Error::Invalid("linear part does not preserve the translation lattice".into())
        })?;
        linear.push(conj);
        trans.push(inv.mul_vec(&m.translation));
    }
    let new_gram = &(&basis.transpose() * gram) * &basis;
    let bound = maps.len().max(1);
    let group = SpaceGroup::build(new_gram, &linear, &trans, bound)?;
    let element_of_map = linear
        .iter()
        .map(|l| group.holonomy().index_of(l).expect("generator"))
        .collect();
    Ok(Rebased {
        lattice_basis: basis,
        group,
        element_of_map,
    })
}
