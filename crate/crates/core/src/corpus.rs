//! Example constructors: generalized Klein bottles, flat tori, and
//! regular-representation fixtures over finite groups.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bieberbach::BieberbachGroup;
use crate::exactlin::{inverse_rational, IntMatrix, IntVector, Rat, RatMatrix};
use crate::invariant::{close_group, MatrixGroup};
use crate::lattice::{Ambient, Sublattice};
use crate::{Error, Result};

/// The flat torus `R^n / Z^n` with the given Gram matrix.
pub fn torus(gram: RatMatrix) -> Result<BieberbachGroup> {
    let n = gram.rows();
    BieberbachGroup::build(gram, &[], &[], 1).inspect(|g| {
        debug_assert_eq!(g.dim(), n);
    })
}

/// Cyclic coordinate shift `e_i ↦ e_{i+1 mod n}`.
fn cyclic_shift(n: usize) -> IntMatrix {
    let mut p = IntMatrix::zeros(n, n);
    for i in 0..n {
        p[((i + 1) % n, i)] = BigInt::one();
    }
    p
}

/// Basis `u_0 = (1,…,1)`, `u_j = e_{j+1} − e_1` of `{v ∈ Z^n : n | Σv}`, as columns.
pub fn klein_basis(n: usize) -> IntMatrix {
    let mut b = IntMatrix::zeros(n, n);
    for i in 0..n {
        b[(i, 0)] = BigInt::one();
    }
    for j in 1..n {
        b[(j, j)] = BigInt::one();
        b[(0, j)] = -BigInt::one();
    }
    b
}

/// The generalized Klein bottle of dimension `n` with its invariant
/// subspaces of constant and of zero-average vectors.
pub fn klein_bottle(n: usize) -> Result<(BieberbachGroup, Sublattice, Sublattice)> {
    if n < 2 {
        return Err(Error::Invalid(format!(
            "Klein bottle needs n >= 2, got {n}"
        )));
    }
    let basis = klein_basis(n);
    let br = basis.to_rational();
    let inv = inverse_rational(&br).expect("basis is invertible");
    let shift = (&(&inv * &cyclic_shift(n).to_rational()) * &br)
        .to_integer()
        .ok_or_else(|| Error::Invalid("shift does not preserve the lattice".into()))?;
    let gram = &br.transpose() * &br;
    let mut b = vec![Rat::zero(); n];
    b[0] = Rat::new(BigInt::one(), BigInt::from(n));
    let g = BieberbachGroup::build(gram, &[shift], &[b], n)?;
    let axes: Vec<usize> = (1..n).collect();
    Ok((
        g,
        Sublattice::coordinate(n, &[0]),
        Sublattice::coordinate(n, &axes),
    ))
}

/// A finite group given by its multiplication table, with identity at 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteGroupTable {
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validates a table (closure, associativity, identity, inverses) and
    /// relabels so that the identity is element 0.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if table
            .iter()
            .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return Err(Error::InvalidTable(
                "table must be square with entries below its order".into(),
            ));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidTable(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let mut inverses = vec![0; n];
        for (a, slot) in inverses.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&b| table[a][b] == e)
                .ok_or_else(|| Error::InvalidTable(format!("element {a} has no inverse")))?;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.swap(0, e);
        let pos: Vec<usize> = {
            let mut p = vec![0; n];
            for (i, &x) in order.iter().enumerate() {
                p[x] = i;
            }
            p
        };
        let relabeled: Vec<Vec<usize>> = order
            .iter()
            .map(|&a| order.iter().map(|&b| pos[table[a][b]]).collect())
            .collect();
        let inverses = order.iter().map(|&a| pos[inverses[a]]).collect();
        Ok(FiniteGroupTable {
            table: relabeled,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::new(table).expect("cyclic table is valid")
    }

    /// The permutation group generated by `gens` (each a permutation of
    /// `0..degree` in one-line notation), composed as `(p·q)(x) = p(q(x))`.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self> {
        let degree = gens.first().map_or(0, Vec::len);
        for g in gens {
            let set: BTreeSet<usize> = g.iter().copied().collect();
            if g.len() != degree || set.len() != degree || set.iter().any(|&x| x >= degree) {
                return Err(Error::InvalidTable(
                    "generators must be permutations of a common degree".into(),
                ));
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p: Vec<usize> = (0..degree).map(|x| elements[i][g[x]]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let table = elements
            .iter()
            .map(|p| {
                elements
                    .iter()
                    .map(|q| index[&(0..degree).map(|x| p[q[x]]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        Self::new(table)
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            gens.push(swap);
            gens.push((0..n).map(|x| (x + 1) % n).collect());
        } else {
            gens.push((0..n).collect());
        }
        Self::from_permutations(&gens).expect("permutations")
    }

    pub fn alternating(n: usize) -> Self {
        let gens: Vec<Vec<usize>> = (2..n)
            .map(|k| {
                let mut p: Vec<usize> = (0..n).collect();
                p[0] = 1;
                p[1] = k;
                p[k] = 0;
                p
            })
            .collect();
        if gens.is_empty() {
            return Self::cyclic(1);
        }
        Self::from_permutations(&gens).expect("permutations")
    }

    /// Symmetries of the regular `n`-gon, of order `2n`.
    pub fn dihedral(n: usize) -> Self {
        let rot: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
        let refl: Vec<usize> = (0..n).map(|x| (n - x) % n).collect();
        Self::from_permutations(&[rot, refl]).expect("permutations")
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        // unit u ∈ {1,i,j,k} with sign s encoded as 4·s + u
        let unit_mul = |a: usize, b: usize| -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 3) => (1, false),
                (3, 1) => (2, false),
                (2, 1) => (3, true),
                (3, 2) => (1, true),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (u, neg) = unit_mul(a % 4, b % 4);
                        let sign = (a / 4 + b / 4 + usize::from(neg)) % 2;
                        4 * sign + u
                    })
                    .collect()
            })
            .collect();
        Self::new(table).expect("quaternion table is valid")
    }

    pub fn direct_product(&self, other: &Self) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| self.mul(a / m, b / m) * m + other.mul(a % m, b % m))
                    .collect()
            })
            .collect();
        Self::new(table).expect("product table is valid")
    }

    /// Smallest subgroup containing `gens`, sorted.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = BTreeSet::from([0usize]);
        let mut queue: VecDeque<usize> = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        s.contains(&0)
            && s.iter()
                .all(|&a| a < self.order() && s.iter().all(|&b| s.contains(&self.mul(a, b))))
    }

    /// All subgroups, as sorted index lists, obtained by repeatedly joining
    /// cyclic subgroups.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let cyclic: BTreeSet<Vec<usize>> = (0..self.order())
            .map(|g| self.subgroup_closure(&[g]))
            .collect();
        let mut all: BTreeSet<Vec<usize>> = cyclic.clone();
        let mut frontier: Vec<Vec<usize>> = all.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for h in &frontier {
                for c in &cyclic {
                    let mut gens = h.clone();
                    gens.extend(c.iter().copied());
                    let joined = self.subgroup_closure(&gens);
                    if all.insert(joined.clone()) {
                        next.push(joined);
                    }
                }
            }
            frontier = next;
        }
        all.into_iter().collect()
    }
}

/// Regular-representation fixture: permutation matrices of `H` on `Z^H`
/// and the invariant subspaces attached to a subgroup `K`.
#[derive(Clone, Debug)]
pub struct RegularRep {
    pub ambient: Ambient,
    pub holonomy: MatrixGroup,
    /// Functions constant on each left coset `aK`.
    pub coset_constant: Sublattice,
    /// Functions summing to zero over each left coset `aK`.
    pub coset_zero_sum: Sublattice,
}

/// Matrices of `f ↦ f∘τ_a`, `τ_a(x) = a·x`, on `Z^H` with the identity Gram.
pub fn regular_rep(h: &FiniteGroupTable, subgroup: &[usize]) -> Result<RegularRep> {
    let n = h.order();
    if !h.is_subgroup(subgroup) {
        return Err(Error::Invalid(
            "subgroup indices are not closed under the table".into(),
        ));
    }
    let mats: Vec<IntMatrix> = (0..n)
        .map(|a| {
            let mut m = IntMatrix::zeros(n, n);
            for x in 0..n {
                m[(x, h.mul(a, x))] = BigInt::one();
            }
            m
        })
        .collect();
    let holonomy = close_group(&mats, n)?;
    let mut cosets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for a in 0..n {
        let mut c: Vec<usize> = subgroup.iter().map(|&k| h.mul(a, k)).collect();
        c.sort_unstable();
        cosets.insert(c);
    }
    let mut constant: Vec<IntVector> = Vec::new();
    let mut zero_sum: Vec<IntVector> = Vec::new();
    for c in &cosets {
        let mut v = vec![BigInt::zero(); n];
        for &x in c {
            v[x] = BigInt::one();
        }
        constant.push(v);
        for &x in &c[1..] {
            let mut w = vec![BigInt::zero(); n];
            w[x] = BigInt::one();
            w[c[0]] = -BigInt::one();
            zero_sum.push(w);
        }
    }
    Ok(RegularRep {
        ambient: Ambient::standard(n),
        holonomy,
        coset_constant: Sublattice::from_columns(n, &constant),
        coset_zero_sum: Sublattice::from_columns(n, &zero_sum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rat, rat_vec};
    use crate::invariant::is_invariant;

    #[test]
    fn klein_two() {
        let (g, vc, vz) = klein_bottle(2).unwrap();
        assert_eq!(g.holonomy().order(), 2);
        assert_eq!(g.gram(), &RatMatrix::diagonal(&[rat(2, 1), rat(2, 1)]));
        assert_eq!(
            g.holonomy().element(1),
            &IntMatrix::from_i64_rows(&[&[1, 0], &[0, -1]])
        );
        assert_eq!(g.translation(1), &rat_vec(&[(1, 2), (0, 1)]));
        assert!(!g.is_orientable());
        assert!(is_invariant(&vc, g.holonomy()) && is_invariant(&vz, g.holonomy()));
    }

    #[test]
    fn klein_general() {
        for n in 2..=6 {
            let (g, _, _) = klein_bottle(n).unwrap();
            assert_eq!(g.holonomy().order(), n);
            assert!(g.is_torsion_free());
            assert_eq!(g.is_orientable(), n % 2 == 1);
            assert_eq!(g.gram()[(0, 0)], rat(n as i64, 1));
            assert_eq!(g.gram()[(1, 1)], rat(2, 1));
            if n > 2 {
                assert_eq!(g.gram()[(1, 2)], rat(1, 1));
            }
        }
        assert!(klein_bottle(1).is_err());
    }

    #[test]
    fn tori() {
        assert!(torus(RatMatrix::identity(2)).is_ok());
        assert!(torus(IntMatrix::from_i64_rows(&[&[2, 1], &[1, 2]]).to_rational()).is_ok());
        let bad = IntMatrix::from_i64_rows(&[&[1, 2], &[2, 1]]).to_rational();
        assert_eq!(torus(bad).unwrap_err(), Error::BadGram);
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroupTable::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroupTable::new(vec![vec![0, 2], vec![1, 0]]).is_err());
        let relabeled = FiniteGroupTable::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(relabeled, FiniteGroupTable::cyclic(2));
    }

    #[test]
    fn named_groups() {
        assert_eq!(FiniteGroupTable::symmetric(3).order(), 6);
        assert_eq!(FiniteGroupTable::symmetric(4).order(), 24);
        assert_eq!(FiniteGroupTable::alternating(4).order(), 12);
        assert_eq!(FiniteGroupTable::dihedral(4).order(), 8);
        assert_eq!(FiniteGroupTable::quaternion().order(), 8);
        let c2 = FiniteGroupTable::cyclic(2);
        assert_eq!(c2.direct_product(&c2).order(), 4);
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(FiniteGroupTable::symmetric(3).subgroups().len(), 6);
        assert_eq!(FiniteGroupTable::symmetric(4).subgroups().len(), 30);
        assert_eq!(FiniteGroupTable::alternating(4).subgroups().len(), 10);
        assert_eq!(FiniteGroupTable::dihedral(4).subgroups().len(), 10);
        assert_eq!(FiniteGroupTable::quaternion().subgroups().len(), 6);
        assert_eq!(FiniteGroupTable::cyclic(12).subgroups().len(), 6);
    }

    #[test]
    fn regular_rep_dimensions() {
        let c2 = FiniteGroupTable::cyclic(2);
        let r = regular_rep(&c2, &[0, 1]).unwrap();
        assert_eq!((r.coset_constant.rank(), r.coset_zero_sum.rank()), (1, 1));
        let r = regular_rep(&c2, &[0]).unwrap();
        assert!(r.coset_constant.is_full() && r.coset_zero_sum.is_zero());

        let s3 = FiniteGroupTable::symmetric(3);
        let a3 = s3.subgroups().into_iter().find(|h| h.len() == 3).unwrap();
        let r = regular_rep(&s3, &a3).unwrap();
        assert_eq!((r.coset_constant.rank(), r.coset_zero_sum.rank()), (2, 4));
        assert_eq!(r.holonomy.order(), 6);
        assert!(is_invariant(&r.coset_constant, &r.holonomy));
        assert!(is_invariant(&r.coset_zero_sum, &r.holonomy));
        assert!(r.coset_constant.is_saturated() && r.coset_zero_sum.is_saturated());
        assert!(regular_rep(&s3, &[0, 1]).is_err() || s3.is_subgroup(&[0, 1]));
    }
}
