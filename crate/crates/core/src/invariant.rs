//! Finite groups of unimodular integer matrices and their invariant
//! subspaces.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::exactlin::{
    determinant, kernel_rational, primitive_integer_columns, rank_rational, IntMatrix, Rat,
    RatMatrix,
};
use crate::lattice::{quotient_lattice, saturate, Sublattice};
use crate::{Error, Result};

pub const DEFAULT_GROUP_BOUND: usize = 100_000;
pub const DEFAULT_NORM_BOUND: usize = 3;
/// Cap on candidate vectors examined by the orbit-span search.
pub const ORBIT_SEARCH_CAP: usize = 250_000;

/// A finite group of `n × n` unimodular integer matrices with its
/// multiplication and inverse tables.
///
/// Elements are sorted canonically (identity first, then lexicographically by
/// entries), so two groups with the same element set compare equal however
/// they were generated.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixGroup {
    n: usize,
    elements: Vec<IntMatrix>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl MatrixGroup {
    pub fn trivial(n: usize) -> Self {
        MatrixGroup {
            n,
            elements: vec![IntMatrix::identity(n)],
            table: vec![vec![0]],
            inverses: vec![0],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &IntMatrix {
        &self.elements[i]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverses[i]
    }

    pub fn index_of(&self, m: &IntMatrix) -> Option<usize> {
        self.elements.iter().position(|e| e == m)
    }

    /// Order of element `i`.
    pub fn element_order(&self, i: usize) -> usize {
        let mut k = 1;
        let mut cur = i;
        while cur != 0 {
            cur = self.table[cur][i];
            k += 1;
        }
        k
    }

    /// Closure of a set of element indices under the multiplication table.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut members = vec![false; self.order()];
        members[0] = true;
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.table[x][g];
                if !members[y] {
                    members[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&i| members[i]).collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        set.contains(&0)
            && set
                .iter()
                .all(|&a| set.iter().all(|&b| set.contains(&self.table[a][b])))
    }
}

/// Closes `generators` under multiplication.
pub fn close_group(generators: &[IntMatrix], bound: usize) -> Result<MatrixGroup> {
    let n = match generators.first() {
        Some(g) => g.rows(),
        None => {
            return Err(Error::Invalid(
                "no generators; use MatrixGroup::trivial".into(),
            ))
        }
    };
    close_group_in_dim(n, generators, bound)
}

/// As [`close_group`], with an explicit dimension so the generator list may be empty.
pub fn close_group_in_dim(n: usize, generators: &[IntMatrix], bound: usize) -> Result<MatrixGroup> {
    for (i, g) in generators.iter().enumerate() {
        if !g.is_square() || g.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.rows(),
            });
        }
        if !determinant(g).abs().is_one() {
            return Err(Error::NotUnimodular(i));
        }
    }
    let mut elements = vec![IntMatrix::identity(n)];
    let mut index: HashMap<IntMatrix, usize> = HashMap::from([(elements[0].clone(), 0)]);
    // right[i][g] = index of elements[i]·generators[g]
    let mut right: Vec<Vec<usize>> = Vec::new();
    // parent[j] = (i, g) with elements[j] = elements[i]·generators[g]
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut next = 0;
    while next < elements.len() {
        let mut row = Vec::with_capacity(generators.len());
        for (gi, g) in generators.iter().enumerate() {
            let p = &elements[next] * g;
            let idx = match index.get(&p) {
                Some(&k) => k,
                None => {
                    if elements.len() >= bound {
                        return Err(Error::GroupNotFinite(bound));
                    }
                    let k = elements.len();
                    index.insert(p.clone(), k);
                    elements.push(p);
                    parent.push(Some((next, gi)));
                    k
                }
            };
            row.push(idx);
        }
        right.push(row);
        next += 1;
    }
    let order = elements.len();
    // table[i][j]: if elements[j] = elements[p]·g then elements[i]·elements[j] = (elements[i]·elements[p])·g.
    let mut raw = vec![vec![0usize; order]; order];
    for i in 0..order {
        raw[i][0] = i;
        for j in 1..order {
            let (p, g) = parent[j].expect("non-identity elements have a parent");
            raw[i][j] = right[raw[i][p]][g];
        }
    }
    // Canonical order: identity first, then lexicographic.
    let mut perm: Vec<usize> = (0..order).collect();
    perm[1..].sort_by(|&a, &b| elements[a].entries().cmp(elements[b].entries()));
    let mut pos = vec![0usize; order];
    for (new, &old) in perm.iter().enumerate() {
        pos[old] = new;
    }
    let sorted: Vec<IntMatrix> = perm.iter().map(|&old| elements[old].clone()).collect();
    let table: Vec<Vec<usize>> = perm
        .iter()
        .map(|&oi| perm.iter().map(|&oj| pos[raw[oi][oj]]).collect())
        .collect();
    let inverses: Vec<usize> = (0..order)
        .map(|i| {
            (0..order)
                .find(|&j| table[i][j] == 0)
                .expect("finite group")
        })
        .collect();
    Ok(MatrixGroup {
        n,
        elements: sorted,
        table,
        inverses,
    })
}

/// Whether `span(s)` is mapped into itself by every group element.
pub fn is_invariant(s: &Sublattice, g: &MatrixGroup) -> bool {
    if s.is_zero() || s.is_full() {
        return true;
    }
    let sat = saturate(s);
    let q = quotient_lattice(&sat).expect("saturated");
    let p2 = q.projection_int();
    let basis = sat.basis();
    g.elements().iter().all(|a| (&p2 * &(a * basis)).is_zero())
}

/// Unscaled average `Σ_A A·P0·A⁻¹` of the projection `P0` onto `span(s)` along
/// the lifts of its unimodular completion; the averaged projector is this
/// matrix divided by `|g|`.
pub fn averaged_projector_scaled(s: &Sublattice, g: &MatrixGroup) -> Result<IntMatrix> {
    let q = quotient_lattice(s)?;
    let p0 = &q.sub_basis() * &q.sub_coordinates();
    let mut acc = IntMatrix::zeros(g.dim(), g.dim());
    for (i, a) in g.elements().iter().enumerate() {
        let a_inv = g.element(g.inverse(i));
        acc = acc.add_matrix(&(&(a * &p0) * a_inv));
    }
    Ok(acc)
}

/// The averaged projector `P = (1/|g|) Σ_A A·P0·A⁻¹`.
pub fn averaged_projector(s: &Sublattice, g: &MatrixGroup) -> Result<RatMatrix> {
    let scaled = averaged_projector_scaled(s, g)?;
    Ok(scaled
        .to_rational()
        .scale(&Rat::new(BigInt::one(), BigInt::from(g.order()))))
}

/// An invariant saturated sublattice complementary to `s`, obtained as the
/// kernel of the group-averaged projector onto `span(s)`.
pub fn invariant_complement(s: &Sublattice, g: &MatrixGroup) -> Result<Sublattice> {
    if !s.is_saturated() {
        return Err(Error::NotSaturated);
    }
    if !is_invariant(s, g) {
        return Err(Error::NotInvariant);
    }
    let p = averaged_projector_scaled(s, g)?;
    let ker = kernel_rational(&p.to_rational());
    if ker.cols() == 0 {
        return Ok(Sublattice::zero(s.ambient_dim()));
    }
    Ok(saturate(&Sublattice::from_generators(
        &primitive_integer_columns(&ker),
    )))
}

/// Vectors fixed by every element, as a saturated sublattice.
pub fn fixed_subspace(g: &MatrixGroup) -> Sublattice {
    let n = g.dim();
    let id = IntMatrix::identity(n);
    let mut stacked = IntMatrix::zeros(0, n);
    for a in g.elements().iter().skip(1) {
        stacked = stacked.vcat(&a.sub_matrix(&id));
    }
    let ker = kernel_rational(&stacked.to_rational());
    if ker.cols() == 0 {
        return Sublattice::zero(n);
    }
    saturate(&Sublattice::from_generators(&primitive_integer_columns(
        &ker,
    )))
}

fn is_proper(s: &Sublattice) -> bool {
    !s.is_zero() && !s.is_full()
}

/// Saturated span of the orbit `{A·v}`.
pub fn orbit_span(v: &[BigInt], g: &MatrixGroup) -> Sublattice {
    let cols: Vec<Vec<BigInt>> = g.elements().iter().map(|a| a.mul_vec(v)).collect();
    saturate(&Sublattice::from_columns(g.dim(), &cols))
}

/// Nonzero vectors with sup-norm exactly `r` and first nonzero entry positive,
/// ordered by ℓ1 norm and then lexicographically descending (so `e_1` leads).
fn norm_shell(n: usize, r: i64, l1: i64, out: &mut Vec<Vec<i64>>) {
    fn rec(
        n: usize,
        r: i64,
        budget: i64,
        cur: &mut Vec<i64>,
        hit_r: bool,
        out: &mut Vec<Vec<i64>>,
    ) {
        if cur.len() == n {
            if budget == 0 && hit_r {
                out.push(cur.clone());
            }
            return;
        }
        let remaining = (n - cur.len()) as i64;
        let leading = cur.iter().all(|&x| x == 0);
        let lo = if leading { 0 } else { -r };
        for x in (lo..=r).rev() {
            let ax = x.abs();
            if ax > budget || budget - ax > (remaining - 1) * r {
                continue;
            }
            cur.push(x);
            rec(n, r, budget - ax, cur, hit_r || ax == r, out);
            cur.pop();
        }
    }
    rec(n, r, l1, &mut Vec::with_capacity(n), false, out);
}

/// Searches for a saturated invariant sublattice of rank strictly between 0
/// and `n`: the fixed subspace, its averaged complement, then orbit spans of
/// lattice vectors of sup-norm at most `norm_bound` in deterministic order.
pub fn find_proper_invariant_subspace(g: &MatrixGroup, norm_bound: usize) -> Option<Sublattice> {
    let n = g.dim();
    if n < 2 {
        return None;
    }
    let fixed = fixed_subspace(g);
    if is_proper(&fixed) {
        return Some(fixed);
    }
    if let Ok(c) = invariant_complement(&fixed, g) {
        if is_proper(&c) {
            return Some(c);
        }
    }
    let mut examined = 0usize;
    for r in 1..=norm_bound as i64 {
        for l1 in r..=(n as i64) * r {
            let mut shell = Vec::new();
            norm_shell(n, r, l1, &mut shell);
            for v in shell {
                examined += 1;
                if examined > ORBIT_SEARCH_CAP {
                    return None;
                }
                let v: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
                let orbit: Vec<Vec<Rat>> = g
                    .elements()
                    .iter()
                    .map(|a| a.mul_vec(&v).into_iter().map(Rat::from_integer).collect())
                    .collect();
                let rank = rank_rational(&RatMatrix::from_columns(n, &orbit));
                if rank < n {
                    return Some(orbit_span(&v, g));
                }
            }
        }
    }
    None
}

/// One summand of a decomposition into invariant subspaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factor {
    pub sublattice: Sublattice,
    /// No proper invariant subspace was found inside this factor by the
    /// bounded search (always true for rank one).
    pub minimal_at_bound: bool,
}

/// Matrices of the group action restricted to a saturated invariant
/// sublattice, in the coordinates of its basis.
pub fn restricted_action(s: &Sublattice, g: &MatrixGroup) -> Result<MatrixGroup> {
    if !is_invariant(s, g) {
        return Err(Error::NotInvariant);
    }
    let q = quotient_lattice(s)?;
    let p1 = q.sub_coordinates();
    let basis = s.basis();
    let mats: Vec<IntMatrix> = g.elements().iter().map(|a| &(&p1 * a) * basis).collect();
    close_group_in_dim(s.rank(), &mats, DEFAULT_GROUP_BOUND)
}

/// Splits `span(s0)` into a direct sum of invariant subspaces, recursively
/// splitting off any invariant subspace found by
/// [`find_proper_invariant_subspace`] and its averaged complement.
pub fn minimal_decomposition(
    s0: &Sublattice,
    g: &MatrixGroup,
    norm_bound: usize,
) -> Result<Vec<Factor>> {
    if !s0.is_saturated() {
        return Err(Error::NotSaturated);
    }
    if s0.is_zero() {
        return Err(Error::NotProper {
            rank: 0,
            n: s0.ambient_dim(),
        });
    }
    let mut out = Vec::new();
    decompose_into(s0, g, norm_bound, &mut out)?;
    Ok(out)
}

fn decompose_into(
    s: &Sublattice,
    g: &MatrixGroup,
    norm_bound: usize,
    out: &mut Vec<Factor>,
) -> Result<()> {
    if s.rank() == 1 {
        out.push(Factor {
            sublattice: s.clone(),
            minimal_at_bound: true,
        });
        return Ok(());
    }
    let restricted = restricted_action(s, g)?;
    let Some(inner) = find_proper_invariant_subspace(&restricted, norm_bound) else {
        out.push(Factor {
            sublattice: s.clone(),
            minimal_at_bound: true,
        });
        return Ok(());
    };
    let inner_complement = invariant_complement(&inner, &restricted)?;
    let basis = s.basis();
    // Images of direct summands of Z^k under a saturated basis stay saturated.
    let a = Sublattice::from_generators(&(basis * inner.basis()));
    let b = Sublattice::from_generators(&(basis * inner_complement.basis()));
    decompose_into(&a, g, norm_bound, out)?;
    decompose_into(&b, g, norm_bound, out)?;
    Ok(())
}

/// Convenience: sign of determinant of each element.
pub fn determinants(g: &MatrixGroup) -> Vec<BigInt> {
    g.elements().iter().map(determinant).collect()
}
