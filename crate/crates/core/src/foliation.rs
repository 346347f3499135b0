//! Foliations of a Bieberbach group by cosets of an invariant L-subspace.
//!
//! Throughout, `V'` is represented by a saturated sublattice `L' = L ∩ V'`
//! with basis `S`, completed to a unimodular `[S | T]`; `P1`, `P2` are the
//! row blocks of its inverse. A vector `v` is in `V'` iff `P2·v = 0`, and
//! `v + λ ∈ V'` for some `λ ∈ Z^n` iff `P2·v` is integral.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::bieberbach::{rebase_on_translations, AffineMap, BieberbachGroup, SpaceGroup};
use crate::exactlin::{
    determinant_rational, to_rat_vec, vec_add, vec_sub, IntMatrix, IntVector, Rat, RatMatrix,
    RatVector,
};
use crate::invariant::is_invariant;
use crate::lattice::{
    orthogonal_complement, orthogonal_residual, quotient_lattice, QuotientLattice, Sublattice,
};
use crate::{Error, Result};

/// Default number of grid candidates tried by [`FoliationContext::sample_generic_coset`].
pub const DEFAULT_SAMPLE_LIMIT: usize = 100_000;

/// A contributing holonomy element of `Σ'` together with its solution coset:
/// `(A, b(A) + offset + l)` lies in `Σ'` for every `l ∈ L'`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaEntry {
    pub element: usize,
    pub offset: IntVector,
}

/// Bieberbach group of a leaf, in a basis of its translation lattice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LeafGroup {
    pub group: BieberbachGroup,
    /// Basis of the leaf lattice in `S`-coordinates.
    pub lattice_basis: RatMatrix,
    /// `[leaf lattice : L']`.
    pub lattice_index: BigInt,
    /// Pairs (ambient holonomy index, leaf holonomy index).
    pub restriction: Vec<(usize, usize)>,
}

impl LeafGroup {
    pub fn covering_degree(&self) -> usize {
        self.group.holonomy().order()
    }
}

/// Stabilizer of the coset `x0 + V'`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CosetStabilizer {
    pub index: usize,
    /// Stabilizing holonomy elements with the lattice shift bringing
    /// `(A − I)·x0 + b(A)` into `V'`.
    pub elements: Vec<SigmaEntry>,
    pub leaf_group: LeafGroup,
}

/// The crystallographic group induced on `E/V'`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrbifoldData {
    pub dim: usize,
    /// Induced inner product on the quotient coordinates `P2`.
    pub gram: RatMatrix,
    /// Distinct induced matrices `P2·A·T`.
    pub point_matrices: Vec<IntMatrix>,
    /// `P2·b(A)` for every ambient holonomy element.
    pub projected_translations: Vec<RatVector>,
    /// Basis (in quotient coordinates) of the induced translation lattice.
    pub translation_basis: RatMatrix,
    /// Coordinate covolume of the induced translation lattice.
    pub covolume: Rat,
    /// The induced group rebased onto its translation lattice.
    pub group: SpaceGroup,
    pub torsion_free: bool,
}

#[derive(Clone, Debug)]
pub struct FoliationContext {
    group: BieberbachGroup,
    vprime: Sublattice,
    quotient: QuotientLattice,
    complement: Sublattice,
    k_prime: Vec<usize>,
    sigma: Vec<SigmaEntry>,
}

impl FoliationContext {
    pub fn new(group: BieberbachGroup, vprime: Sublattice) -> Result<Self> {
        let n = group.dim();
        if vprime.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: vprime.ambient_dim(),
            });
        }
        if !vprime.is_saturated() {
            return Err(Error::NotSaturated);
        }
        if vprime.rank() == 0 || vprime.rank() == n {
            return Err(Error::NotProper {
                rank: vprime.rank(),
                n,
            });
        }
        if !is_invariant(&vprime, group.holonomy()) {
            return Err(Error::NotInvariant);
        }
        let quotient = quotient_lattice(&vprime)?;
        let complement = orthogonal_complement(&vprime, group.ambient())?;
        let hol = group.holonomy();
        let w = complement.basis();
        let k_prime: Vec<usize> = (0..hol.order())
            .filter(|&i| &(hol.element(i) * w) == w)
            .collect();
        let sigma = k_prime
            .iter()
            .filter_map(|&i| {
                quotient
                    .shifts_into_subspace(group.translation(i))
                    .map(|offset| SigmaEntry { element: i, offset })
            })
            .collect();
        Ok(FoliationContext {
            group,
            vprime,
            quotient,
            complement,
            k_prime,
            sigma,
        })
    }

    pub fn group(&self) -> &BieberbachGroup {
        &self.group
    }

    pub fn vprime(&self) -> &Sublattice {
        &self.vprime
    }

    pub fn quotient(&self) -> &QuotientLattice {
        &self.quotient
    }

    /// Saturated basis of the Gram-orthogonal complement of `V'`.
    pub fn complement(&self) -> &Sublattice {
        &self.complement
    }

    /// Holonomy elements acting trivially on the orthogonal complement of `V'`.
    pub fn k_prime(&self) -> &[usize] {
        &self.k_prime
    }

    /// `Σ'` as its contributing holonomy elements and solution cosets.
    pub fn generic_isotropy(&self) -> &[SigmaEntry] {
        &self.sigma
    }

    /// `α(Σ')`, the linear parts of `Σ'`.
    pub fn sigma_holonomy(&self) -> Vec<usize> {
        self.sigma.iter().map(|s| s.element).collect()
    }

    /// Whether `α(Σ')` is all of `K'`.
    pub fn sigma_fills_k_prime(&self) -> bool {
        self.sigma.len() == self.k_prime.len()
    }

    /// Elements `(A, b(A) + λ)` mapping `x0 + V'` onto itself, one per linear part.
    pub fn stabilizing_elements(&self, x0: &[Rat]) -> Result<Vec<SigmaEntry>> {
        self.check_point(x0)?;
        let hol = self.group.holonomy();
        Ok((0..hol.order())
            .filter_map(|i| {
                let moved = vec_sub(&hol.element(i).to_rational().mul_vec(x0), x0);
                let v = vec_add(&moved, self.group.translation(i));
                self.quotient
                    .shifts_into_subspace(&v)
                    .map(|offset| SigmaEntry { element: i, offset })
            })
            .collect())
    }

    /// `[Stab(x0 + V') : Σ']`.
    pub fn stabilizer_index(&self, x0: &[Rat]) -> Result<usize> {
        Ok(self.stabilizing_elements(x0)?.len() / self.sigma.len())
    }

    pub fn is_generic_coset(&self, x0: &[Rat]) -> Result<bool> {
        Ok(self.stabilizer_index(x0)? == 1)
    }

    pub fn coset_stabilizer(&self, x0: &[Rat]) -> Result<CosetStabilizer> {
        let elements = self.stabilizing_elements(x0)?;
        let origin = orthogonal_residual(x0, &self.vprime, self.group.ambient());
        let leaf_group = self.leaf_group_from(&elements, &origin)?;
        Ok(CosetStabilizer {
            index: elements.len() / self.sigma.len(),
            elements,
            leaf_group,
        })
    }

    /// The leaf group of a generic leaf, built from `Σ'` alone.
    pub fn leaf_group_generic(&self) -> Result<LeafGroup> {
        let origin = vec![Rat::zero(); self.group.dim()];
        self.leaf_group_from(&self.sigma, &origin)
    }

    pub fn covering_degree(&self) -> Result<usize> {
        Ok(self.leaf_group_generic()?.covering_degree())
    }

    pub fn leaf_orientable(&self) -> Result<bool> {
        Ok(self.leaf_group_generic()?.group.is_orientable())
    }

    /// Restricts the given stabilizing elements to `origin + V'`, which they
    /// all preserve, and rebases onto the resulting translation lattice.
    fn leaf_group_from(&self, elements: &[SigmaEntry], origin: &[Rat]) -> Result<LeafGroup> {
        let hol = self.group.holonomy();
        let s = self.quotient.sub_basis();
        let p1 = self.quotient.sub_coordinates();
        let p1r = p1.to_rational();
        let maps: Vec<AffineMap> = elements
            .iter()
            .map(|e| {
                let a = hol.element(e.element);
                let linear = &(&p1 * a) * &s;
                let moved = vec_sub(&a.to_rational().mul_vec(origin), origin);
                let c = vec_add(self.group.translation(e.element), &to_rat_vec(&e.offset));
                AffineMap {
                    linear,
                    translation: p1r.mul_vec(&vec_add(&moved, &c)),
                }
            })
            .collect();
        let gram = self.group.ambient().restricted_gram(&s.to_rational());
        let rebased = rebase_on_translations(&gram, &maps)?;
        let lattice_index = rebased.lattice_index();
        let restriction = elements
            .iter()
            .map(|e| e.element)
            .zip(rebased.element_of_map.iter().copied())
            .collect();
        Ok(LeafGroup {
            group: BieberbachGroup::try_from_space_group(rebased.group)?,
            lattice_basis: rebased.lattice_basis,
            lattice_index,
            restriction,
        })
    }

    /// Deterministic grid of coset representatives `x0 = T·q`.
    pub fn coset_grid(&self) -> impl Iterator<Item = RatVector> + '_ {
        let lifts = self.quotient.lifts().to_rational();
        quotient_grid(self.quotient.quotient_rank()).map(move |q| lifts.mul_vec(&q))
    }

    /// First generic coset representative on [`FoliationContext::coset_grid`].
    pub fn sample_generic_coset(&self, limit: usize) -> Result<RatVector> {
        for x0 in self.coset_grid().take(limit) {
            if self.is_generic_coset(&x0)? {
                return Ok(x0);
            }
        }
        Err(Error::SearchExhausted(limit))
    }

    pub fn leaf_space_orbifold(&self) -> Result<OrbifoldData> {
        let hol = self.group.holonomy();
        let t = self.quotient.lifts();
        let p2 = self.quotient.projection_int();
        let p2r = p2.to_rational();
        let amb = self.group.ambient();
        let residuals: Vec<RatVector> = t
            .to_rational()
            .columns()
            .iter()
            .map(|c| orthogonal_residual(c, &self.vprime, amb))
            .collect();
        let m = residuals.len();
        let gram = RatMatrix::from_rows(
            &(0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| amb.inner(&residuals[i], &residuals[j]))
                        .collect()
                })
                .collect::<Vec<_>>(),
        );
        let maps: Vec<AffineMap> = (0..hol.order())
            .map(|i| AffineMap {
                linear: &(&p2 * hol.element(i)) * &t,
                translation: p2r.mul_vec(self.group.translation(i)),
            })
            .collect();
        let point_matrices: Vec<IntMatrix> = maps
            .iter()
            .map(|mp| mp.linear.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let projected_translations = maps.iter().map(|mp| mp.translation.clone()).collect();
        let rebased = rebase_on_translations(&gram, &maps)?;
        let covolume = determinant_rational(&rebased.lattice_basis).abs();
        let torsion_free = rebased.group.is_torsion_free();
        Ok(OrbifoldData {
            dim: m,
            gram,
            point_matrices,
            projected_translations,
            translation_basis: rebased.lattice_basis,
            covolume,
            group: rebased.group,
            torsion_free,
        })
    }

    fn check_point(&self, x0: &[Rat]) -> Result<()> {
        if x0.len() != self.group.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.group.dim(),
                found: x0.len(),
            });
        }
        Ok(())
    }

    /// Full report, with genericity data for each requested coset.
    pub fn report(&self, cosets: &[RatVector]) -> Result<FoliationReport> {
        let leaf = self.leaf_group_generic()?;
        let coset_reports = cosets
            .iter()
            .map(|x0| {
                let st = self.coset_stabilizer(x0)?;
                Ok(CosetReport {
                    point: x0.clone(),
                    generic: st.index == 1,
                    stabilizer_index: st.index,
                    stabilizing_elements: st.elements.iter().map(|e| e.element).collect(),
                    leaf_lattice_index: st.leaf_group.lattice_index.clone(),
                    leaf_holonomy_order: st.leaf_group.covering_degree(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FoliationReport {
            n: self.group.dim(),
            rank: self.vprime.rank(),
            k_prime: self.k_prime.clone(),
            sigma: self.sigma.clone(),
            sigma_equals_k_prime: self.sigma_fills_k_prime(),
            covering_degree: leaf.covering_degree(),
            leaf_orientable: leaf.group.is_orientable(),
            leaf,
            sample_generic: self.sample_generic_coset(DEFAULT_SAMPLE_LIMIT)?,
            cosets: coset_reports,
            orbifold: self.leaf_space_orbifold()?,
        })
    }
}

/// Genericity data for one requested coset.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CosetReport {
    pub point: RatVector,
    pub generic: bool,
    pub stabilizer_index: usize,
    pub stabilizing_elements: Vec<usize>,
    pub leaf_lattice_index: BigInt,
    pub leaf_holonomy_order: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FoliationReport {
    pub n: usize,
    pub rank: usize,
    pub k_prime: Vec<usize>,
    pub sigma: Vec<SigmaEntry>,
    pub sigma_equals_k_prime: bool,
    pub leaf: LeafGroup,
    pub covering_degree: usize,
    pub leaf_orientable: bool,
    pub sample_generic: RatVector,
    pub cosets: Vec<CosetReport>,
    pub orbifold: OrbifoldData,
}

/// Tuples `(j_1/D, …, j_m/D)` with `1 ≤ j_i < D`, for `D = 2, 3, …`, each
/// denominator in lexicographic order.
pub fn quotient_grid(m: usize) -> impl Iterator<Item = RatVector> {
    (2u64..).flat_map(move |d| {
        let count = (d - 1).pow(m as u32);
        (0..count).map(move |mut idx| {
            let mut q = vec![Rat::zero(); m];
            for slot in q.iter_mut().rev() {
                let j = idx % (d - 1) + 1;
                idx /= d - 1;
                *slot = Rat::new(BigInt::from(j), BigInt::from(d));
            }
            q
        })
    })
}
