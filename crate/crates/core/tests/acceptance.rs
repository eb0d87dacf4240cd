//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taf_core::ideal::levelwise_closure;
use taf_core::nest::KernelStatus;
use taf_core::oracle::{
    enumerate_ideals_two_level, ideals_from_generators, verify_envelope_theorem, verify_envelope_theorem_two_level,
    verify_wedge_theorem, OracleBounds,
};
use taf_core::primitivity::Layered;
use taf_core::{
    analyze_envelope, build_envelope, build_state_chain, check_nest, descendant_matrices, find_essential_path,
    finite_gns_stage, fixtures, generate_ideal, ideal_from_mi_chain, is_prime_pairwise, kernel_check,
    mi_chain_from_ideal, validate_presentation, verify_essential_path, EmbeddingArm, EnvelopeDiagram, IdealTable,
    MatrixUnit, NodeRef, PrimenessStatus, SubordinateRule, TafPresentation, TypeGraph, Violation,
};

use common::{random_presentation, random_unit};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Debug>(r: std::result::Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() <= limit, || format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn wedge_theorem() -> Outcome {
    let start = Instant::now();
    let bounds = OracleBounds::default();
    let mut counts = Vec::new();
    for n in 1..=5 {
        let r = ok(verify_wedge_theorem(n, &bounds))?;
        ensure(r.passed, || format!("T_{n}: {r:?}"))?;
        counts.push(r.ideal_count);
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("ideal counts {counts:?}"))
}

fn envelope_theorem() -> Outcome {
    let start = Instant::now();
    let bounds = OracleBounds::default();
    let mut mi = Vec::new();
    for n in 1..=5 {
        let r = ok(verify_envelope_theorem(n, &bounds))?;
        ensure(r.passed && r.mi_count == n * (n + 1) / 2, || format!("T_{n}: {r:?}"))?;
        mi.push(r.mi_count);
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("meet-irreducible counts {mi:?}"))
}

fn two_level_lattices() -> Outcome {
    let bounds = OracleBounds::default();
    let mut sizes = Vec::new();
    for (name, p) in [("REF2", fixtures::ref2(2)), ("STD2", fixtures::std2(2))] {
        let p = ok(p.truncated(2))?;
        let lattice = ok(enumerate_ideals_two_level(&p, &bounds))?;
        for idx in 0..lattice.len() {
            let table = ok(lattice.to_table(&p, idx))?;
            let regenerated = ok(generate_ideal(&p, &lattice.units(idx), 2))?;
            ensure(regenerated == table, || format!("{name}: member {idx} does not regenerate"))?;
        }
        for level in 1..=2 {
            for u in p.units_at(level) {
                let j = ok(generate_ideal(&p, &[u], 2))?;
                ensure(lattice.find_table(&j).is_some(), || format!("{name}: Id({u}) not in the lattice"))?;
            }
        }
        let generated = ideals_from_generators(&lattice);
        let listed: std::collections::BTreeSet<_> = lattice.ideals.iter().cloned().collect();
        ensure(generated == listed, || format!("{name}: generator closure differs from the lattice"))?;
        let r = ok(verify_envelope_theorem_two_level(&p, &bounds))?;
        ensure(r.passed, || format!("{name}: {r:?}"))?;
        sizes.push(format!("{name} {} ideals, {} mi", lattice.len(), r.mi_count));
    }
    Ok(sizes.join("; "))
}

fn descendants(env: &EnvelopeDiagram, from: NodeRef) -> HashSet<NodeRef> {
    let mut seen = HashSet::from([from]);
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        for s in env.successors(n) {
            if seen.insert(s) {
                stack.push(s);
            }
        }
    }
    seen
}

fn primeness_fixtures() -> Outcome {
    let (depth, horizon) = (8, 2);
    let p = fixtures::swap(depth);
    let env = ok(build_envelope(&p, &ok(IdealTable::zero(&p, depth))?, depth, horizon))?;
    let v = ok(analyze_envelope(&env))?;
    ensure(v.status == PrimenessStatus::NotPrime && v.exact, || format!("SWAP: {v:?}"))?;
    let (s, t) = v.counterexample.ok_or("SWAP: no counterexample")?;
    let ds = descendants(&env, s);
    ensure(descendants(&env, t).iter().all(|n| !ds.contains(n)), || "SWAP: counterexample nodes meet".into())?;
    let tail = env.stationary_tail().ok_or("SWAP: no stationary tail")?;
    let (ts, tt) = (type_of(&tail.types, s), type_of(&tail.types, t));
    let mats = descendant_matrices(&tail.graph);
    ensure((1..=mats.window()).all(|d| !mats.power(d).rows_meet(ts, tt)), || "SWAP: types meet in window".into())?;
    let mut lines = vec![format!("SWAP not prime, window {:?}", v.window)];
    for (name, p) in [("REF2", fixtures::ref2(depth)), ("STD2", fixtures::std2(depth))] {
        let env = ok(build_envelope(&p, &ok(IdealTable::zero(&p, depth))?, depth, horizon))?;
        let v = ok(analyze_envelope(&env))?;
        ensure(v.status == PrimenessStatus::Primitive && v.exact, || format!("{name}: {v:?}"))?;
        let path = ok(find_essential_path(&env, 6))?;
        ensure(path.nodes.len() >= 6, || format!("{name}: path of length {}", path.nodes.len()))?;
        ensure(verify_essential_path(&env, &path.nodes, depth - horizon), || format!("{name}: path fails"))?;
        lines.push(format!("{name} primitive, path length {}", path.nodes.len()));
    }
    Ok(lines.join("; "))
}

fn type_of(types: &[Vec<usize>], n: NodeRef) -> usize {
    types[0].iter().position(|&i| i == n.index).expect("counterexample at the tail start")
}

fn chain_round_trip() -> Outcome {
    let (depth, horizon) = (6, 3);
    let p = fixtures::ref2(depth);
    let zero = ok(IdealTable::zero(&p, depth))?;
    let chain = ok(mi_chain_from_ideal(&p, &zero, depth, horizon))?;
    let back = ok(ideal_from_mi_chain(&p, &chain, depth, horizon))?;
    ensure(back.trusted_through >= 3, || format!("trusted through {}", back.trusted_through))?;
    for level in 1..=back.trusted_through {
        for u in p.units_at(level) {
            ensure(back.table.contains_unit(&u) == zero.contains_unit(&u), || format!("REF2 disagrees at {u}"))?;
        }
    }
    let mut wedges = 0;
    for n in 1..=5 {
        let p = fixtures::tn(n);
        for i0 in 1..=n {
            for j0 in i0..=n {
                let outside: Vec<MatrixUnit> = p.units_at(1).filter(|u| !(i0 <= u.row && u.col <= j0)).collect();
                let j = ok(generate_ideal(&p, &outside, 1))?;
                let chain = ok(mi_chain_from_ideal(&p, &j, 1, 1))?;
                let back = ok(ideal_from_mi_chain(&p, &chain, 1, 1))?;
                ensure(back.exact && back.table == j, || format!("T_{n} wedge ({i0},{j0}) does not round-trip"))?;
                wedges += 1;
            }
        }
    }
    Ok(format!("REF2 agrees through level {}; {wedges} wedges round-trip", back.trusted_through))
}

fn nest_representation() -> Outcome {
    let (depth, horizon) = (6, 2);
    let p = fixtures::ref2(depth);
    let zero = ok(IdealTable::zero(&p, depth))?;
    let corner = ok(generate_ideal(&p, &[MatrixUnit::new(1, 0, 1, 1)], depth))?;
    let mut lines = Vec::new();
    for (name, j) in [("J=0", &zero), ("J=Id(e11)", &corner)] {
        let env = ok(build_envelope(&p, j, depth, horizon))?;
        let path = ok(find_essential_path(&env, 1))?;
        let chain = ok(build_state_chain(&env, &path.nodes, SubordinateRule::Leftmost))?;
        let units: Vec<MatrixUnit> = (1..=3).flat_map(|l| p.units_at(l).collect::<Vec<_>>()).collect();
        let entries = ok(kernel_check(&p, j, &env, &chain, &units, depth))?;
        let (mut vanish, mut nonzero) = (0, 0);
        for e in &entries {
            match e.status {
                KernelStatus::Vanishes(_) if e.in_ideal => vanish += 1,
                KernelStatus::NonzeroAt(d) if !e.in_ideal && d <= 4 => nonzero += 1,
                other => return Err(format!("{name}: {} gives {other:?}", e.unit)),
            }
        }
        let top = chain.top_level();
        let stage = ok(finite_gns_stage::<i64>(&p, j, &env, &chain, top, &units))?;
        ensure(check_nest(&stage).full_stage_nest, || format!("{name}: stage nest is not full"))?;
        lines.push(format!("{name}: {vanish} vanish, {nonzero} nonzero"));
    }

    let env = ok(build_envelope(&p, &zero, depth, horizon))?;
    let path = ok(find_essential_path(&env, 1))?;
    let chain = ok(build_state_chain(&env, &path.nodes, SubordinateRule::Leftmost))?;
    let d = chain.top_level();
    let diag: Vec<MatrixUnit> =
        (1..=d).flat_map(|l| p.units_at(l).filter(|u| u.is_diagonal()).collect::<Vec<_>>()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut products = Vec::new();
    for _ in 0..100 {
        let level = rng.gen_range(1..=d);
        let n = p.size(level, 0);
        let (mut k, mut l, mut m) = (rng.gen_range(1..=n), rng.gen_range(1..=n), rng.gen_range(1..=n));
        let mut sorted = [k, l, m];
        sorted.sort_unstable();
        [k, l, m] = sorted;
        products.push([
            MatrixUnit::new(level, 0, k, l),
            MatrixUnit::new(level, 0, l, m),
            MatrixUnit::new(level, 0, k, m),
        ]);
    }
    let mut ops = diag.clone();
    ops.extend(products.iter().flatten().copied());
    let stage = ok(finite_gns_stage::<i64>(&p, &zero, &env, &chain, d, &ops))?;
    let index = |u: &MatrixUnit| ops.iter().position(|x| x == u).expect("requested unit");
    for a in &diag {
        for b in &diag {
            let same = a.level == b.level && a.row == b.row;
            if a.level == b.level {
                let expected = if same { stage.omega(index(a)) } else { 0 };
                ensure(stage.omega(index(a)) * stage.omega(index(b)) == expected, || format!("omega({a}{b})"))?;
            }
        }
    }
    for [u, v, uv] in &products {
        let lhs = stage.operators[index(u)].1.mul(&stage.operators[index(v)].1);
        ensure(lhs == stage.operators[index(uv)].1, || format!("tau({u}) tau({v}) != tau({uv})"))?;
    }
    lines.push(format!("omega on {} diagonal units, tau on {} products", diag.len(), products.len()));
    Ok(lines.join("; "))
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(29);

    for _ in 0..100 {
        let p = random_presentation(&mut rng, 3, 3, 3);
        let level = rng.gen_range(1..=3);
        let units: Vec<_> = (0..rng.gen_range(0..5)).map(|_| random_unit(&mut rng, &p, level)).collect();
        let once = ok(levelwise_closure(&p, level, &units))?;
        let again: Vec<MatrixUnit> = once
            .iter()
            .enumerate()
            .flat_map(|(s, set)| set.units().map(move |(k, l)| MatrixUnit::new(level, s, k, l)))
            .collect();
        ensure(ok(levelwise_closure(&p, level, &again))? == once, || "closure is not idempotent".into())?;
    }

    let mut monotone = 0;
    for _ in 0..120 {
        let p = random_presentation(&mut rng, 4, 2, 3);
        let d1 = rng.gen_range(1..=3);
        let gens: Vec<MatrixUnit> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let level = rng.gen_range(1..=d1);
                random_unit(&mut rng, &p, level)
            })
            .collect();
        let shallow = ok(generate_ideal(&p, &gens, d1))?;
        let deep = ok(generate_ideal(&p, &gens, 4))?;
        for level in 1..=d1 {
            for u in p.units_at(level) {
                ensure(!shallow.contains_unit(&u) || deep.contains_unit(&u), || format!("{u} revoked"))?;
            }
        }
        monotone += 1;
    }

    let mut fuzzed = 0;
    for _ in 0..220 {
        let depth = rng.gen_range(2..=4);
        let p = random_presentation(&mut rng, depth, 3, 3);
        ensure(validate_presentation(&p).is_valid(), || "generated presentation invalid".into())?;
        let mut arms: Vec<EmbeddingArm> = p.arms().to_vec();
        let Some(idx) = arms.iter().position(|a| p.size(a.level + 1, a.target) >= 2) else { continue };
        let n = p.size(arms[idx].level + 1, arms[idx].target);
        let old = arms[idx].injection[0];
        arms[idx].injection[0] = if old == 1 { n } else { old - 1 };
        let bad = ok(TafPresentation::new(p.levels().to_vec(), arms, None))?;
        let v = validate_presentation(&bad).violations;
        ensure(
            v.iter().any(|x| matches!(x, Violation::Overlap { .. }))
                && v.iter().any(|x| matches!(x, Violation::Gap { .. })),
            || format!("mutation not detected: {v:?}"),
        )?;
        fuzzed += 1;
    }
    ensure(fuzzed >= 200, || format!("only {fuzzed} mutated presentations"))?;

    let mut graphs = 0;
    for _ in 0..60 {
        let n = rng.gen_range(1..=5);
        let mut edges = std::collections::BTreeMap::new();
        for _ in 0..rng.gen_range(0..=2 * n) {
            *edges.entry((rng.gen_range(0..n), rng.gen_range(0..n))).or_insert(0) += 1;
        }
        let g = TypeGraph::new((0..n).map(|i| i.to_string()).collect(), edges);
        let mats = descendant_matrices(&g);
        for a in 1..=8 {
            for b in 1..=8 {
                ensure(*mats.power(a + b) == mats.power(a).mul(mats.power(b)), || format!("R^{a}R^{b} on {g:?}"))?;
            }
        }
        let _ = is_prime_pairwise(&g);
        graphs += 1;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{monotone} monotone cases, {fuzzed} fuzzed presentations, {graphs} power checks"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("wedge theorem on T_1..T_5", wedge_theorem),
        ("envelope theorem on T_1..T_5", envelope_theorem),
        ("two-level REF2 and STD2 lattices", two_level_lattices),
        ("primeness of SWAP, REF2 and STD2", primeness_fixtures),
        ("chain round trip", chain_round_trip),
        ("nest representation stages", nest_representation),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
