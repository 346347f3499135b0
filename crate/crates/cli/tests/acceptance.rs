//! One pass/fail line per acceptance criterion. Run with
//! `cargo test -p flatleaf-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatleaf::bieberbach::{direct_product, BieberbachGroup};
use flatleaf::codec::{GroupDocument, SubspaceDocument};
use flatleaf::corpus::{klein_bottle, regular_rep, torus, FiniteGroupTable};
use flatleaf::exactlin::{rank_rational, rat, IntMatrix, IntVector, Rat, RatMatrix};
use flatleaf::foliation::FoliationContext;
use flatleaf::intersect::ComplementaryPair;
use flatleaf::invariant::{
    averaged_projector, close_group, find_proper_invariant_subspace, invariant_complement,
    is_invariant, MatrixGroup, DEFAULT_GROUP_BOUND,
};
use flatleaf::lattice::{is_direct_summand, meet, saturate, sum, Sublattice};

type Check = Result<String, String>;
type Cols<'a> = &'a [&'a [i64]];

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn vec_i(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn span(n: usize, cols: &[&[i64]]) -> Sublattice {
    let cols: Vec<IntVector> = cols.iter().map(|c| vec_i(c)).collect();
    saturate(&Sublattice::from_columns(n, &cols))
}

/// `s` placed at coordinates `offset..offset + s.ambient_dim()` of `Z^total`.
fn embed(s: &Sublattice, offset: usize, total: usize) -> Vec<IntVector> {
    s.basis()
        .columns()
        .into_iter()
        .map(|c| {
            let mut v = vec![BigInt::from(0); total];
            for (i, x) in c.into_iter().enumerate() {
                v[offset + i] = x;
            }
            v
        })
        .collect()
}

fn join(n: usize, parts: &[Vec<IntVector>]) -> Sublattice {
    let cols: Vec<IntVector> = parts.iter().flatten().cloned().collect();
    Sublattice::from_columns(n, &cols)
}

fn circle() -> BieberbachGroup {
    torus(RatMatrix::identity(1)).unwrap()
}

fn klein(n: usize) -> (BieberbachGroup, Sublattice, Sublattice) {
    klein_bottle(n).unwrap()
}

// ---------------------------------------------------------------- criterion 1

fn criterion_1() -> Check {
    let start = Instant::now();
    for n in 2..=6 {
        let (g, vc, vz) = klein(n);
        ensure(
            g.is_torsion_free() && g.cocycle_violation().is_none(),
            format!("n={n}: validation"),
        )?;
        let c1 = FoliationContext::new(g.clone(), vc).map_err(err)?;
        let c2 = FoliationContext::new(g, vz).map_err(err)?;
        for (name, ctx) in [("V'", &c1), ("V''", &c2)] {
            let pure = ctx.sigma_holonomy() == vec![0]
                && ctx
                    .generic_isotropy()
                    .iter()
                    .all(|e| e.offset.iter().all(|x| *x == BigInt::from(0)));
            ensure(
                pure,
                format!("n={n}: Σ for {name} is not the lattice of {name}"),
            )?;
        }
        let grid: Vec<_> = c2.coset_grid().take(200).collect();
        ensure(grid.len() == 200, "grid too small")?;
        for x in &grid {
            ensure(
                c2.is_generic_coset(x).map_err(err)?,
                format!("n={n}: V''-coset {x:?} not generic"),
            )?;
        }
        let zero = vec![Rat::from_integer(BigInt::from(0)); n];
        let st = c1.coset_stabilizer(&zero).map_err(err)?;
        ensure(
            st.index == n,
            format!("n={n}: stabilizer index {} at 0", st.index),
        )?;
        ensure(
            st.leaf_group.lattice_index == BigInt::from(n),
            format!("n={n}: leaf lattice index {}", st.leaf_group.lattice_index),
        )?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("Klein n=2..6 in {:?}", start.elapsed()))
}

// ---------------------------------------------------------- criteria 2 and 3

struct Instance {
    name: String,
    group: BieberbachGroup,
    v1: Sublattice,
    v2: Sublattice,
    expected: Option<(i64, usize, i64)>,
}

fn instance(name: &str, group: BieberbachGroup, v1: Sublattice, v2: Sublattice) -> Instance {
    Instance {
        name: name.into(),
        group,
        v1,
        v2,
        expected: None,
    }
}

fn intersection_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 2..=5 {
        let (g, vc, vz) = klein(n);
        out.push(Instance {
            name: format!("klein-{n}"),
            group: g,
            v1: vc,
            v2: vz,
            expected: Some((1, n, n as i64)),
        });
    }
    let t2 = torus(RatMatrix::identity(2)).unwrap();
    let hex = torus(RatMatrix::from_rows(&[
        vec![rat(2, 1), rat(1, 1)],
        vec![rat(1, 1), rat(2, 1)],
    ]))
    .unwrap();
    let mut diag = instance(
        "torus2 diagonals",
        t2.clone(),
        span(2, &[&[1, 1]]),
        span(2, &[&[1, -1]]),
    );
    diag.expected = Some((2, 1, 2));
    out.push(diag);
    let lines2: [(&[i64], &[i64]); 5] = [
        (&[1, 0], &[0, 1]),
        (&[1, 2], &[2, -1]),
        (&[1, 0], &[1, 3]),
        (&[2, 1], &[1, 2]),
        (&[1, 1], &[0, 1]),
    ];
    for (a, b) in lines2 {
        out.push(instance(
            &format!("torus2 {a:?} {b:?}"),
            t2.clone(),
            span(2, &[a]),
            span(2, &[b]),
        ));
        out.push(instance(
            &format!("hex {a:?} {b:?}"),
            hex.clone(),
            span(2, &[a]),
            span(2, &[b]),
        ));
    }
    let t3 = torus(RatMatrix::identity(3)).unwrap();
    let planes3: [(Cols, Cols); 4] = [
        (&[&[1, 0, 0], &[0, 1, 0]], &[&[0, 0, 1]]),
        (&[&[1, 1, 0], &[0, 1, 1]], &[&[1, 0, 1]]),
        (&[&[1, 0, 0]], &[&[0, 1, 1], &[0, 1, -1]]),
        (&[&[1, 2, 0], &[0, 0, 1]], &[&[1, -1, 1]]),
    ];
    for (a, b) in planes3 {
        out.push(instance(
            &format!("torus3 {a:?} {b:?}"),
            t3.clone(),
            span(3, a),
            span(3, b),
        ));
    }
    let t4 = torus(RatMatrix::identity(4)).unwrap();
    out.push(instance(
        "torus4 diagonal planes",
        t4.clone(),
        span(4, &[&[1, 1, 0, 0], &[0, 0, 1, 1]]),
        span(4, &[&[1, -1, 0, 0], &[0, 0, 1, -1]]),
    ));
    out.push(instance(
        "torus4 axes",
        t4,
        span(4, &[&[1, 0, 0, 0]]),
        span(4, &[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]),
    ));
    // Klein(n) × circle
    for n in 2..=3 {
        let (k, vc, vz) = klein(n);
        let g = direct_product(&k, &circle());
        let d = n + 1;
        let r = embed(&Sublattice::full(1), n, d);
        let c = embed(&vc, 0, d);
        let z = embed(&vz, 0, d);
        out.push(instance(
            &format!("klein-{n}×S1 (c+R, z)"),
            g.clone(),
            join(d, &[c.clone(), r.clone()]),
            join(d, std::slice::from_ref(&z)),
        ));
        out.push(instance(
            &format!("klein-{n}×S1 (c, z+R)"),
            g.clone(),
            join(d, std::slice::from_ref(&c)),
            join(d, &[z.clone(), r.clone()]),
        ));
        out.push(instance(
            &format!("klein-{n}×S1 (c+z, R)"),
            g,
            join(d, &[c, z]),
            join(d, &[r]),
        ));
    }
    // Klein(2) × Klein(2)
    let (k, vc, vz) = klein(2);
    let g = direct_product(&k, &k);
    let (c1, z1, c2, z2) = (
        embed(&vc, 0, 4),
        embed(&vz, 0, 4),
        embed(&vc, 2, 4),
        embed(&vz, 2, 4),
    );
    out.push(instance(
        "klein-2×klein-2 (cc, zz)",
        g.clone(),
        join(4, &[c1.clone(), c2.clone()]),
        join(4, &[z1.clone(), z2.clone()]),
    ));
    out.push(instance(
        "klein-2×klein-2 (cz, zc)",
        g,
        join(4, &[c1, z2]),
        join(4, &[z1, c2]),
    ));
    out
}

fn cli_intersect_exit_code(inst: &Instance) -> Result<i32, String> {
    let dir = tempfile::tempdir().map_err(err)?;
    let gp = dir.path().join("g.json");
    let p1 = dir.path().join("v1.json");
    let p2 = dir.path().join("v2.json");
    std::fs::write(
        &gp,
        GroupDocument::from_group(inst.group.space_group(), None).to_json(),
    )
    .map_err(err)?;
    std::fs::write(
        &p1,
        SubspaceDocument::from_sublattice(&inst.v1, None).to_json(),
    )
    .map_err(err)?;
    std::fs::write(
        &p2,
        SubspaceDocument::from_sublattice(&inst.v2, None).to_json(),
    )
    .map_err(err)?;
    let out = Command::new(env!("CARGO_BIN_EXE_flatleaf"))
        .arg("intersect")
        .args([&gp, &p1, &p2])
        .arg("--oracle")
        .output()
        .map_err(err)?;
    Ok(out.status.code().unwrap_or(-1))
}

fn criteria_2_and_3() -> (Check, Check) {
    let start = Instant::now();
    let instances = intersection_instances();
    let mut oracle_failures = Vec::new();
    let mut injectivity_failures = Vec::new();
    let others = instances
        .iter()
        .filter(|i| !i.name.starts_with("klein-") || i.name.contains('×'))
        .count();
    for inst in &instances {
        let result = ComplementaryPair::new(&inst.group, &inst.v1, &inst.v2).and_then(|p| {
            let r = p.with_oracles()?;
            Ok((r, p.injectivity_violation()))
        });
        match result {
            Err(e) => oracle_failures.push(format!("{}: {e}", inst.name)),
            Ok((r, violation)) => {
                if r.oracles_agree() != Some(true) {
                    oracle_failures.push(format!(
                        "{}: formula (t={}, m={}), oracles ({:?}, {:?})",
                        inst.name, r.t, r.m, r.oracle_t, r.oracle_m
                    ));
                }
                if let Some((t, h, m)) = inst.expected {
                    if (r.t.clone(), r.hhat, r.m.clone()) != (BigInt::from(t), h, BigInt::from(m)) {
                        oracle_failures
                            .push(format!("{}: got ({}, {}, {})", inst.name, r.t, r.hhat, r.m));
                    }
                }
                if let Some(l) = violation {
                    injectivity_failures.push(format!("{}: {l:?}", inst.name));
                }
            }
        }
    }
    for inst in instances
        .iter()
        .filter(|i| i.name.starts_with("klein-2") || i.name == "torus2 diagonals")
    {
        match cli_intersect_exit_code(inst) {
            Ok(0) => {}
            Ok(code) => oracle_failures.push(format!("{}: CLI exit code {code}", inst.name)),
            Err(e) => oracle_failures.push(format!("{}: {e}", inst.name)),
        }
    }
    if others < 20 {
        oracle_failures.push(format!("only {others} torus/product instances"));
    }
    if let Err(e) = within(start, Duration::from_secs(30)) {
        oracle_failures.push(e);
    }
    let c2 = if oracle_failures.is_empty() {
        Ok(format!(
            "{} instances ({others} torus/product) in {:?}",
            instances.len(),
            start.elapsed()
        ))
    } else {
        Err(oracle_failures.join("; "))
    };
    let c3 = if injectivity_failures.is_empty() {
        Ok(format!("{} instances, no violation", instances.len()))
    } else {
        Err(injectivity_failures.join("; "))
    };
    (c2, c3)
}

// ---------------------------------------------------------------- criterion 4

fn complement_fixtures() -> Vec<(String, MatrixGroup, Sublattice)> {
    let mut out = Vec::new();
    let c2 = FiniteGroupTable::cyclic(2);
    let c3 = FiniteGroupTable::cyclic(3);
    let tables = [
        ("S3", FiniteGroupTable::symmetric(3)),
        ("S4", FiniteGroupTable::symmetric(4)),
        ("A4", FiniteGroupTable::alternating(4)),
        ("D4", FiniteGroupTable::dihedral(4)),
        ("D6", FiniteGroupTable::dihedral(6)),
        ("Q8", FiniteGroupTable::quaternion()),
        ("C12", FiniteGroupTable::cyclic(12)),
        ("C2×C2", c2.direct_product(&c2)),
        ("C2×S3", c2.direct_product(&FiniteGroupTable::symmetric(3))),
        ("C3×C3", c3.direct_product(&c3)),
    ];
    for (name, h) in tables {
        for k in h.subgroups() {
            let rep = regular_rep(&h, &k).unwrap();
            let label = format!("{name}/|K|={}", k.len());
            out.push((
                format!("{label} coset-constant"),
                rep.holonomy.clone(),
                rep.coset_constant,
            ));
            out.push((
                format!("{label} coset-zero-sum"),
                rep.holonomy,
                rep.coset_zero_sum,
            ));
        }
    }
    for n in 2..=6 {
        let (g, vc, vz) = klein(n);
        out.push((format!("klein-{n} constants"), g.holonomy().clone(), vc));
        out.push((format!("klein-{n} zero-average"), g.holonomy().clone(), vz));
    }
    let (k, vc, vz) = klein(3);
    let p = direct_product(&k, &circle());
    out.push((
        "klein-3×S1 c".into(),
        p.holonomy().clone(),
        join(4, &[embed(&vc, 0, 4)]),
    ));
    out.push((
        "klein-3×S1 z+R".into(),
        p.holonomy().clone(),
        join(4, &[embed(&vz, 0, 4), embed(&Sublattice::full(1), 3, 4)]),
    ));
    out
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let fixtures = complement_fixtures();
    ensure(
        fixtures.len() >= 100,
        format!("only {} fixtures", fixtures.len()),
    )?;
    for (name, g, s) in &fixtures {
        ensure(is_invariant(s, g), format!("{name}: input not invariant"))?;
        let c = invariant_complement(s, g).map_err(|e| format!("{name}: {e}"))?;
        ensure(
            c.is_saturated() && is_invariant(&c, g),
            format!("{name}: complement not saturated/invariant"),
        )?;
        let whole = sum(s, &c).map_err(err)?;
        ensure(
            c.rank() + s.rank() == g.dim() && whole.is_full(),
            format!("{name}: not complementary"),
        )?;
        let p = averaged_projector(s, g).map_err(err)?;
        ensure((&p * &p) == p, format!("{name}: P² ≠ P"))?;
        for a in g.elements() {
            let ar = a.to_rational();
            ensure((&ar * &p) == (&p * &ar), format!("{name}: AP ≠ PA"))?;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} fixtures in {:?}",
        fixtures.len(),
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Check {
    let mut corpus: Vec<(String, BieberbachGroup)> = Vec::new();
    for n in 2..=6 {
        corpus.push((format!("klein-{n}"), klein(n).0));
    }
    corpus.push(("torus2".into(), torus(RatMatrix::identity(2)).unwrap()));
    corpus.push(("torus3".into(), torus(RatMatrix::identity(3)).unwrap()));
    corpus.push(("klein-2×S1".into(), direct_product(&klein(2).0, &circle())));
    corpus.push(("klein-3×S1".into(), direct_product(&klein(3).0, &circle())));
    corpus.push((
        "klein-2×klein-2".into(),
        direct_product(&klein(2).0, &klein(2).0),
    ));
    for (name, g) in &corpus {
        let s = find_proper_invariant_subspace(g.holonomy(), 3)
            .ok_or_else(|| format!("{name}: not found"))?;
        let proper = !s.is_zero() && !s.is_full() && s.is_saturated();
        ensure(
            proper && is_invariant(&s, g.holonomy()),
            format!("{name}: bad subspace"),
        )?;
    }
    let c4 = close_group(
        &[IntMatrix::from_i64_rows(&[&[0, -1], &[1, 0]])],
        DEFAULT_GROUP_BOUND,
    )
    .map_err(err)?;
    ensure(
        find_proper_invariant_subspace(&c4, 3).is_none(),
        "C4 rotation group reported reducible",
    )?;
    Ok(format!(
        "{} corpus groups reducible, C4 absent",
        corpus.len()
    ))
}

// ---------------------------------------------------------------- criterion 6

fn random_sublattice(rng: &mut ChaCha8Rng, n: usize) -> (IntMatrix, Sublattice) {
    let cols = rng.gen_range(1..=n);
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|_| {
            (0..cols)
                .map(|_| BigInt::from(rng.gen_range(-4i64..=4)))
                .collect()
        })
        .collect();
    let m = IntMatrix::from_rows(&rows);
    let s = Sublattice::from_generators(&m);
    (m, s)
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=5);
        let (ma, a) = random_sublattice(&mut rng, n);
        let (mb, b) = random_sublattice(&mut rng, n);
        let sat = saturate(&a);
        ensure(
            saturate(&sat) == sat,
            format!("trial {trial}: saturation not idempotent"),
        )?;
        ensure(
            is_direct_summand(&sat) && a.is_sublattice_of(&sat),
            format!("trial {trial}: not a summand"),
        )?;
        ensure(
            sat.rank() == rank_rational(&ma.to_rational()),
            format!("trial {trial}: rank"),
        )?;
        let s = sum(&a, &b).map_err(err)?;
        let i = meet(&a, &b).map_err(err)?;
        ensure(
            s.is_saturated() && i.is_saturated(),
            format!("trial {trial}: sum/meet unsaturated"),
        )?;
        ensure(
            s.rank() == rank_rational(&ma.hcat(&mb).to_rational()),
            format!("trial {trial}: sum rank"),
        )?;
        ensure(
            s.rank() + i.rank() == a.rank() + b.rank(),
            format!("trial {trial}: Grassmann"),
        )?;
        ensure(
            i.is_sublattice_of(&sat) && i.is_sublattice_of(&saturate(&b)),
            format!("trial {trial}: meet"),
        )?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("1000 checks in {:?}", start.elapsed()))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Check {
    for n in 2..=6 {
        let (g, _, vz) = klein(n);
        let o = FoliationContext::new(g, vz)
            .map_err(err)?
            .leaf_space_orbifold()
            .map_err(err)?;
        ensure(
            o.torsion_free && o.dim == 1,
            format!("n={n}: V'' orbifold not a free circle quotient"),
        )?;
        ensure(
            o.covolume == rat(1, n as i64),
            format!("n={n}: covolume {}", o.covolume),
        )?;
    }
    let (g, vc, _) = klein(2);
    let o = FoliationContext::new(g, vc)
        .map_err(err)?
        .leaf_space_orbifold()
        .map_err(err)?;
    ensure(!o.torsion_free, "klein-2 V' orbifold reported torsion-free")?;
    Ok("V'' bases free of covolume 1/n, klein-2 V' singular".into())
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Check {
    for n in 2..=6 {
        let (g, vc, vz) = klein(n);
        ensure(
            g.is_orientable() == (n % 2 == 1),
            format!("n={n}: orientability"),
        )?;
        for v in [vc, vz] {
            let ctx = FoliationContext::new(g.clone(), v).map_err(err)?;
            ensure(
                ctx.leaf_orientable().map_err(err)?,
                format!("n={n}: leaf not orientable"),
            )?;
        }
    }
    let g = direct_product(&klein(2).0, &circle());
    let ctx = FoliationContext::new(g, Sublattice::coordinate(3, &[0, 1])).map_err(err)?;
    ensure(
        !ctx.leaf_orientable().map_err(err)?,
        "klein-2×S1 plane leaves orientable",
    )?;
    Ok("Klein parity and leaf orientability as expected".into())
}

#[test]
fn acceptance() {
    let (c2, c3) = criteria_2_and_3();
    let results = [
        ("1 Klein-bottle regression", criterion_1()),
        ("2 intersection theorem with oracles", c2),
        ("3 injectivity", c3),
        ("4 invariant-complement properties", criterion_4()),
        ("5 reducibility search", criterion_5()),
        ("6 lattice-algebra properties", criterion_6()),
        ("7 fibration/orbifold dichotomy", criterion_7()),
        ("8 orientability", criterion_8()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
