//! Intersection numbers of generic leaves of two complementary invariant
//! L-subspaces, with brute-force geometric counts for cross-checking.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bieberbach::BieberbachGroup;
use crate::exactlin::{
    determinant, frac_vec, snf, solve_rational_unique, to_int_vec, to_rat_vec, vec_add, vec_sub,
    IntMatrix, IntVector, Rat, RatVector,
};
use crate::foliation::{FoliationContext, DEFAULT_SAMPLE_LIMIT};
use crate::lattice::Sublattice;
use crate::{Error, Result};

/// Upper bound on `|det|^n` for the box enumeration of the torus count.
pub const TORUS_BOX_LIMIT: u64 = 2_000_000;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntersectionReport {
    /// `|L / (L' ⊕ L'')|`.
    pub t: BigInt,
    /// `|H| / |α(Σ')·α(Σ'')|`.
    pub hhat: usize,
    pub m: BigInt,
    pub oracle_t: Option<BigInt>,
    pub oracle_m: Option<BigInt>,
    pub witness1: RatVector,
    pub witness2: RatVector,
}

impl IntersectionReport {
    /// Whether both brute-force counts were run and agree with the formula.
    pub fn oracles_agree(&self) -> Option<bool> {
        match (&self.oracle_t, &self.oracle_m) {
            (Some(t), Some(m)) => Some(*t == self.t && *m == self.m),
            _ => None,
        }
    }
}

/// A complementary pair of foliations of the same group.
#[derive(Clone, Debug)]
pub struct ComplementaryPair {
    pub first: FoliationContext,
    pub second: FoliationContext,
    /// `[S' | S'']`, square of full rank.
    joined: IntMatrix,
}

impl ComplementaryPair {
    pub fn new(g: &BieberbachGroup, v1: &Sublattice, v2: &Sublattice) -> Result<Self> {
        let n = g.dim();
        if v1.ambient_dim() != n || v2.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v1.ambient_dim().min(v2.ambient_dim()),
            });
        }
        if v1.rank() + v2.rank() != n {
            return Err(Error::NotComplementary);
        }
        let joined = v1.basis().hcat(v2.basis());
        if determinant(&joined).is_zero() {
            return Err(Error::NotComplementary);
        }
        let first = FoliationContext::new(g.clone(), v1.clone())?;
        let second = FoliationContext::new(g.clone(), v2.clone())?;
        Ok(ComplementaryPair {
            first,
            second,
            joined,
        })
    }

    pub fn group(&self) -> &BieberbachGroup {
        self.first.group()
    }

    /// `|L / (L' ⊕ L'')|`.
    pub fn torus_index(&self) -> BigInt {
        determinant(&self.joined).abs()
    }

    /// The subgroup `α(Σ')·α(Σ'')` of the holonomy group.
    pub fn sigma_product(&self) -> Vec<usize> {
        let mut gens = self.first.sigma_holonomy();
        gens.extend(self.second.sigma_holonomy());
        self.group().holonomy().subgroup_closure(&gens)
    }

    /// Representatives of `L / (L' ⊕ L'')`, zero first, read off the Smith form.
    pub fn coset_representatives(&self) -> Vec<IntVector> {
        let f = snf(&self.joined);
        let factors = f.factors();
        let n = factors.len();
        let mut reps = Vec::new();
        let mut digits = vec![BigInt::zero(); n];
        loop {
            reps.push(f.u_inv.mul_vec(&digits));
            let mut i = n;
            loop {
                if i == 0 {
                    return reps;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < factors[i] {
                    break;
                }
                digits[i] = BigInt::zero();
            }
        }
    }

    pub fn intersection_numbers(&self) -> Result<IntersectionReport> {
        let t = self.torus_index();
        let hhat = self.group().holonomy().order() / self.sigma_product().len();
        let m = &t * BigInt::from(hhat);
        Ok(IntersectionReport {
            t,
            hhat,
            m,
            oracle_t: None,
            oracle_m: None,
            witness1: self.first.sample_generic_coset(DEFAULT_SAMPLE_LIMIT)?,
            witness2: self.second.sample_generic_coset(DEFAULT_SAMPLE_LIMIT)?,
        })
    }

    /// Counts `(V' / L') ∩ (V'' / L'')` in `V / L` by enumerating every
    /// `λ ∈ [0, d)^n`, `d = |det[S' | S'']|`, solving for the point of
    /// `V' ∩ (λ + V'')` and collecting distinct residues mod `L`.
    pub fn oracle_torus_count(&self) -> Result<BigInt> {
        let n = self.group().dim();
        let d = self.torus_index();
        let du = d
            .to_u64()
            .ok_or_else(|| Error::Invalid("index too large for enumeration".into()))?;
        let total = du.checked_pow(n as u32).filter(|&x| x <= TORUS_BOX_LIMIT);
        let total = total.ok_or_else(|| {
            Error::Invalid(format!("{du}^{n} points exceed the enumeration limit"))
        })?;
        let joined = self.joined.to_rational();
        let k = self.first.vprime().rank();
        let s1 = self.first.vprime().basis_rational();
        let mut seen = BTreeSet::new();
        for idx in 0..total {
            let mut rest = idx;
            let lambda: RatVector = (0..n)
                .map(|_| {
                    let c = rest % du;
                    rest /= du;
                    Rat::from_integer(BigInt::from(c))
                })
                .collect();
            let y = solve_rational_unique(&joined, &lambda)
                .expect("complementary bases are independent");
            let point = s1.mul_vec(&y[..k]);
            seen.insert(frac_vec(&point));
        }
        Ok(BigInt::from(seen.len()))
    }

    /// Counts `M' ∩ M''` for the leaves through `x1 + V'` and `x2 + V''`:
    /// for every `γ = (A, b(A) + λ)` with `λ` running over coset
    /// representatives of `L / (L' ⊕ L'')`, solves for the point of
    /// `(x1 + V') ∩ γ(x2 + V'')`, then merges points in the same orbit.
    pub fn oracle_manifold_count(&self, x1: &[Rat], x2: &[Rat]) -> Result<BigInt> {
        if !self.first.is_generic_coset(x1)? || !self.second.is_generic_coset(x2)? {
            return Err(Error::NotGeneric);
        }
        let g = self.group();
        let hol = g.holonomy();
        let s1 = self.first.vprime().basis_rational();
        let s2 = self.second.vprime().basis_rational();
        let k = s1.cols();
        let reps = self.coset_representatives();
        let mut points: Vec<RatVector> = Vec::new();
        for a in 0..hol.order() {
            let ar = hol.element(a).to_rational();
            let system = s1.hcat(&(&ar * &s2).negated());
            let base = vec_sub(&vec_add(&ar.mul_vec(x2), g.translation(a)), x1);
            for lambda in &reps {
                let rhs = vec_add(&base, &to_rat_vec(lambda));
                let y = solve_rational_unique(&system, &rhs)
                    .expect("complementary subspaces meet in a point");
                let p = vec_add(x1, &s1.mul_vec(&y[..k]));
                if !points.iter().any(|q| g.same_orbit(&p, q).is_some()) {
                    points.push(p);
                }
            }
        }
        Ok(BigInt::from(points.len()))
    }

    /// A nonzero coset representative `λ` with `(I, λ) ∈ Σ'·Σ''`, if any.
    ///
    /// `(I, λ) = σ'σ''` forces `A'A'' = I` and
    /// `λ − A'·(b(A'') + λ0'') − (b(A') + λ0') ∈ L' ⊕ L''`.
    pub fn injectivity_violation(&self) -> Option<IntVector> {
        let g = self.group();
        let hol = g.holonomy();
        let both = Sublattice::from_generators(&self.joined);
        let reps = self.coset_representatives();
        for s1 in self.first.generic_isotropy() {
            for s2 in self.second.generic_isotropy() {
                if hol.mul(s1.element, s2.element) != 0 {
                    continue;
                }
                let a1 = hol.element(s1.element).to_rational();
                let c2 = vec_add(g.translation(s2.element), &to_rat_vec(&s2.offset));
                let c1 = vec_add(g.translation(s1.element), &to_rat_vec(&s1.offset));
                let shift = vec_add(&a1.mul_vec(&c2), &c1);
                for lambda in reps.iter().filter(|l| l.iter().any(|x| !x.is_zero())) {
                    let diff = vec_sub(&to_rat_vec(lambda), &shift);
                    if to_int_vec(&diff).is_some_and(|d| both.contains(&d)) {
                        return Some(lambda.clone());
                    }
                }
            }
        }
        None
    }

    /// Formula values together with both brute-force counts.
    pub fn with_oracles(&self) -> Result<IntersectionReport> {
        let mut r = self.intersection_numbers()?;
        r.oracle_t = Some(self.oracle_torus_count()?);
        r.oracle_m = Some(self.oracle_manifold_count(&r.witness1, &r.witness2)?);
        Ok(r)
    }
}

pub fn intersection_numbers(
    g: &BieberbachGroup,
    v1: &Sublattice,
    v2: &Sublattice,
) -> Result<IntersectionReport> {
    ComplementaryPair::new(g, v1, v2)?.intersection_numbers()
}
