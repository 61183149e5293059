//! End-to-end acceptance checks.  Each test covers one numbered criterion and
//! prints exactly one `criterion N: PASS/FAIL` line (visible under
//! `cargo test --test acceptance -- --nocapture`).  Budgets are wall-clock
//! upper bounds; a criterion fails if its checks fail or its budget is blown.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stable_hhh_core::cli::{cmd_verify_identities, RunConfig};
use stable_hhh_core::groebner::{
    certify_regular_sequence, hilbert_function, ideal_equal, GbConfig, IdealPresentation,
    QuotientPresentation,
};
use stable_hhh_core::hhh::{
    cycle_types, full_hhh, hh0_specialize, literal_ideal_pair, permutation_of_cycle_type,
    poincare_series, stable_homology_presentation, verify_e_isomorphism, FormalMatrices,
    Permutation,
};
use stable_hhh_core::mf::{
    build_mn, dg_square_residual, phi_chain_map_residual, simplify_mn, to_dg_module,
    KoszulFactorization,
};
use stable_hhh_core::oracle::{
    bidegree_homology, compare, homology_with_exterior, DimensionTable, Window,
};
use stable_hhh_core::poly::{rat, rat_frac, Poly, Rat, Registry, TriDegree, VarDecl};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn report(id: u32, what: &str, budget_secs: f64, body: impl FnOnce() -> Result<(), String>) {
    let t0 = Instant::now();
    let result = body();
    let dt = t0.elapsed().as_secs_f64();
    match result {
        Ok(()) if dt <= budget_secs => println!("criterion {id}: PASS - {what} ({dt:.1}s)"),
        Ok(()) => {
            println!("criterion {id}: FAIL - {what} passed its checks but took {dt:.1}s (budget {budget_secs:.0}s)");
            panic!("criterion {id} exceeded its time budget");
        }
        Err(msg) => {
            println!("criterion {id}: FAIL - {what}: {msg}");
            panic!("criterion {id} failed: {msg}");
        }
    }
}

fn cfg() -> GbConfig {
    GbConfig::default()
}

fn block_twist(n: u8, ct: &[u8]) -> (Permutation, Option<Permutation>) {
    let w = permutation_of_cycle_type(n, ct);
    let twist = (w != Permutation::identity(n)).then(|| w.clone());
    (w, twist)
}

fn all_permutations(n: u8) -> Vec<Permutation> {
    fn rec(remaining: &mut Vec<u8>, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for idx in 0..remaining.len() {
            let v = remaining.remove(idx);
            prefix.push(v);
            rec(remaining, prefix, out);
            prefix.pop();
            remaining.insert(idx, v);
        }
    }
    let mut images = Vec::new();
    rec(&mut (1..=n).collect(), &mut Vec::new(), &mut images);
    images
        .into_iter()
        .map(|im| Permutation::from_images(im).expect("valid images"))
        .collect()
}

fn random_permutation(n: u8, rng: &mut ChaCha8Rng) -> Permutation {
    let mut images: Vec<u8> = (1..=n).collect();
    for i in (1..images.len()).rev() {
        let j = rng.random_range(0..=i);
        images.swap(i, j);
    }
    Permutation::from_images(images).expect("valid images")
}

#[test]
fn criterion_01_polynomial_identity_suite() {
    report(1, "column identities, relation forms, trace pairing for n <= 6", 60.0, || {
        for n in 2u8..=6 {
            let out = cmd_verify_identities(&RunConfig::new(n)).map_err(err)?;
            ensure!(out.passed, "identity suite failed at n={n}: {}", out.document);
        }
        Ok(())
    });
}

#[test]
fn criterion_02_dg_consistency() {
    report(2, "squared differentials vanish; inclusion is a chain map", 60.0, || {
        let cfg = cfg();
        for n in 2u8..=5 {
            let dg = to_dg_module(&build_mn(n, None, &cfg).map_err(err)?);
            ensure!(dg_square_residual(&dg).is_empty(), "d^2 != 0 untwisted at n={n}");
            for ct in cycle_types(n) {
                let (w, _) = block_twist(n, &ct);
                let dg = to_dg_module(&build_mn(n, Some(&w), &cfg).map_err(err)?);
                ensure!(dg_square_residual(&dg).is_empty(), "d^2 != 0 at n={n} twist {w}");
            }
        }
        for n in 2u8..=4 {
            let res = phi_chain_map_residual(n, &cfg).map_err(err)?;
            ensure!(res.is_empty(), "inclusion fails to chain-commute at n={n}");
        }
        Ok(())
    });
}

#[test]
fn criterion_03_simplification_traces() {
    report(3, "pinned row-move traces for n=2,3 with exact endpoints", f64::INFINITY, || {
        let fixtures: [(u8, &str); 2] = [
            (2, include_str!("fixtures/simplify_n2.json")),
            (3, include_str!("fixtures/simplify_n3.json")),
        ];
        for (n, fixture) in fixtures {
            let trace = simplify_mn(n, None, &cfg()).map_err(err)?;
            let text = serde_json::to_string_pretty(&trace.to_json()).map_err(err)? + "\n";
            ensure!(text == fixture, "trace for n={n} no longer byte-matches its fixture");
            ensure!(
                trace.initial.potential().is_zero(),
                "initial potential nonzero at n={n}"
            );
            for (i, (_, state)) in trace.steps.iter().enumerate() {
                ensure!(
                    state.potential().is_zero(),
                    "potential became nonzero after step {i} at n={n}"
                );
            }
        }

        // Endpoint for n=2: a single row (y2 - x2 | (y1 - x2) u2) with u1 gone.
        let two = simplify_mn(2, None, &cfg()).map_err(err)?;
        let k2 = two.final_state();
        let reg2 = k2.registry();
        ensure!(reg2.idx_of("u1").is_none(), "u1 survived the n=2 reduction");
        ensure!(k2.rows.len() == 1, "n=2 endpoint has {} rows, wanted 1", k2.rows.len());
        let p22 = &Poly::var(reg2, "y2") - &Poly::var(reg2, "x2");
        let p12u2 = &(&Poly::var(reg2, "y1") - &Poly::var(reg2, "x2")) * &Poly::var(reg2, "u2");
        let nf = |p: &Poly| k2.base.normal_form(p);
        ensure!(nf(&k2.rows[0].a) == nf(&p22), "n=2 left entry is {}", k2.rows[0].a);
        ensure!(nf(&k2.rows[0].b) == nf(&p12u2), "n=2 right entry is {}", k2.rows[0].b);

        // Endpoint for n=3: exactly the two-row form over the u1-free ring.
        let three = simplify_mn(3, None, &cfg()).map_err(err)?;
        let k3 = three.final_state();
        let reg3 = k3.registry();
        ensure!(reg3.idx_of("u1").is_none(), "u1 survived the n=3 reduction");
        ensure!(k3.rows.len() == 2, "n=3 endpoint has {} rows, wanted 2", k3.rows.len());
        let var = |s: &str| Poly::var(reg3, s);
        let a22 = &var("y1") - &var("x2");
        let a23 = &(&var("y1") - &var("x2")) + &(&var("y2") - &var("x3"));
        let a33 = &(&var("y1") - &var("x3")) * &(&var("y2") - &var("x3"));
        let want0 = (&var("y2") - &var("x2"), &var("u2") * &a22);
        let want1 = (
            &var("y3") - &var("x3"),
            &(&var("u2") * &a23) + &(&var("u3") * &a33),
        );
        let nf3 = |p: &Poly| k3.base.normal_form(p);
        ensure!(nf3(&k3.rows[0].a) == nf3(&want0.0), "n=3 row 0 left entry is {}", k3.rows[0].a);
        ensure!(nf3(&k3.rows[0].b) == nf3(&want0.1), "n=3 row 0 right entry is {}", k3.rows[0].b);
        ensure!(nf3(&k3.rows[1].a) == nf3(&want1.0), "n=3 row 1 left entry is {}", k3.rows[1].a);
        ensure!(nf3(&k3.rows[1].b) == nf3(&want1.1), "n=3 row 1 right entry is {}", k3.rows[1].b);
        Ok(())
    });
}

#[test]
fn criterion_04_ideal_equality_and_regular_sequences() {
    report(4, "block and diagonal ideals agree; defining sequences are regular", 600.0, || {
        let cfg = cfg();
        let window = Window::bigraded(-20, 20, 10);
        for n in 1u8..=4 {
            for ct in cycle_types(n) {
                let (w, _) = block_twist(n, &ct);
                let (blocks, diagonal) = literal_ideal_pair(&w).map_err(err)?;
                ensure!(
                    ideal_equal(&blocks, &diagonal, &cfg).map_err(err)?,
                    "literal ideals disagree at n={n} type {ct:?}"
                );
                let pres = stable_homology_presentation(&w, &cfg).map_err(err)?;
                let verdict = certify_regular_sequence(
                    &pres.ring.ideal.generators,
                    pres.ring.registry(),
                    &window,
                    &cfg,
                )
                .map_err(err)?;
                ensure!(
                    verdict.accepted(),
                    "defining sequence not certified regular at n={n} type {ct:?}: {verdict:?}"
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_05_flag_ring_isomorphism() {
    report(5, "flag-matrix model matches the diagonal quotient for n <= 3", 300.0, || {
        let cfg = cfg();
        let window = Window::bigraded(-12, 12, 8);
        for n in 2u8..=3 {
            let rep = verify_e_isomorphism(n, &window, &cfg).map_err(err)?;
            ensure!(
                rep.passed(),
                "model comparison failed at n={n}: forward {:?} backward {:?} hilbert mismatches {}",
                rep.forward_ok,
                rep.backward_ok,
                rep.hilbert_mismatches.len()
            );
        }
        let fm = FormalMatrices::new(2);
        let rels = fm.relations();
        let expected = &(&Poly::var(&fm.registry, "x1") - &Poly::var(&fm.registry, "x2"))
            * &Poly::var(&fm.registry, "v12");
        ensure!(
            rels.len() == 1 && rels[0] == expected,
            "rank-two model relations are {rels:?}"
        );
        Ok(())
    });
}

#[test]
fn criterion_06_series_against_oracle() {
    report(6, "closed series equal chain-level homology for n <= 4, all types", 1800.0, || {
        let cfg = cfg();
        for n in 2u8..=4 {
            let window = Window::trigraded(-16, 16, 8, n as i32);
            for ct in cycle_types(n) {
                let (w, twist) = block_twist(n, &ct);
                let pres = stable_homology_presentation(&w, &cfg).map_err(err)?;
                let series = poincare_series(n, &ct);
                let specialized =
                    hh0_specialize(&build_mn(n, twist.as_ref(), &cfg).map_err(err)?).map_err(err)?;
                let table =
                    homology_with_exterior(&specialized, &pres.exterior_degrees, &window, 0)
                        .map_err(err)?;
                let rep = compare(&table, &series, &window).map_err(err)?;
                ensure!(
                    rep.agrees(),
                    "n={n} type {ct:?}: {} mismatches, first {:?}",
                    rep.total_mismatches,
                    rep.mismatches.first()
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_07_closed_form_regressions() {
    report(7, "pinned small-rank rings and shifts", 60.0, || {
        let cfg = cfg();
        let window = Window::bigraded(-10, 10, 6);

        // Rank two, untwisted: Q[x1, alpha, u2]/(alpha u2), unshifted unit.
        let id2 = stable_homology_presentation(&Permutation::identity(2), &cfg).map_err(err)?;
        ensure!(id2.unit_shift == TriDegree::ZERO, "untwisted rank-two unit moved");
        let model_reg = Registry::new(vec![VarDecl::x(1), VarDecl::alpha(), VarDecl::u(2)]);
        let rel = &Poly::var(&model_reg, "alpha") * &Poly::var(&model_reg, "u2");
        let model = QuotientPresentation::new(
            IdealPresentation::new(model_reg, vec![rel]).map_err(err)?,
            &cfg,
        )
        .map_err(err)?;
        let hf_model = hilbert_function(&model, &window).map_err(err)?;
        let hf_ring = hilbert_function(&id2.ring, &window).map_err(err)?;
        ensure!(
            hf_model.mismatches(&hf_ring).is_empty(),
            "untwisted rank-two ring drifted from its model"
        );

        // Rank two, transposed: free Q[x1, u2] with unit shift (-2, 1).
        let tr2 = stable_homology_presentation(
            &Permutation::parse_cycles("(1 2)", 2).map_err(err)?,
            &cfg,
        )
        .map_err(err)?;
        ensure!(
            tr2.unit_shift == TriDegree::new(-2, 1, 0),
            "transposition unit shift is {}",
            tr2.unit_shift
        );
        let free2 = QuotientPresentation::free(Registry::new(vec![VarDecl::x(1), VarDecl::u(2)]));
        let hf_free = hilbert_function(&free2, &window).map_err(err)?;
        let hf_tr = hilbert_function(&tr2.ring, &window).map_err(err)?;
        ensure!(
            hf_free.mismatches(&hf_tr).is_empty(),
            "transposition ring is not free on x1, u2"
        );

        // Rank three, full twist: free Q[x1, u2, u3], three odd generators,
        // unit shift (-4, 2).
        let cyc3 = stable_homology_presentation(
            &Permutation::parse_cycles("(1 2 3)", 3).map_err(err)?,
            &cfg,
        )
        .map_err(err)?;
        ensure!(
            cyc3.unit_shift == TriDegree::new(-4, 2, 0),
            "three-cycle unit shift is {}",
            cyc3.unit_shift
        );
        ensure!(
            cyc3.exterior_degrees.len() == 3,
            "three-cycle should carry three odd generators"
        );
        let free3 = QuotientPresentation::free(Registry::new(vec![
            VarDecl::x(1),
            VarDecl::u(2),
            VarDecl::u(3),
        ]));
        let hf_free3 = hilbert_function(&free3, &window).map_err(err)?;
        let hf_cyc3 = hilbert_function(&cyc3.ring, &window).map_err(err)?;
        ensure!(
            hf_free3.mismatches(&hf_cyc3).is_empty(),
            "three-cycle ring is not free on x1, u2, u3"
        );
        Ok(())
    });
}

#[test]
fn criterion_08_conjugacy_invariance() {
    report(8, "conjugate twists give identical full tables (n <= 5)", f64::INFINITY, || {
        let cfg = cfg();
        for n in 2u8..=4 {
            let window = Window::standard(n);
            let mut seen: HashMap<Vec<u8>, (Permutation, DimensionTable)> = HashMap::new();
            for w in all_permutations(n) {
                let pres = stable_homology_presentation(&w, &cfg).map_err(err)?;
                let table = full_hhh(&pres, &window).map_err(err)?;
                match seen.entry(w.cycle_type()) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        let (rep, expected) = e.get();
                        ensure!(
                            expected.mismatches(&table).is_empty(),
                            "n={n}: {w} and {rep} differ despite equal cycle type"
                        );
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert((w, table));
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        let window = Window::standard(5);
        for k in 0..20 {
            let w = random_permutation(5, &mut rng);
            let g = random_permutation(5, &mut rng);
            let wc = w.conjugate_by(&g);
            let ta = full_hhh(&stable_homology_presentation(&w, &cfg).map_err(err)?, &window)
                .map_err(err)?;
            let tb = full_hhh(&stable_homology_presentation(&wc, &cfg).map_err(err)?, &window)
                .map_err(err)?;
            ensure!(
                ta.mismatches(&tb).is_empty(),
                "pair {k}: {w} and its conjugate {wc} differ"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_09_series_positivity() {
    report(9, "series coefficients are nonnegative on standard windows (n <= 4)", f64::INFINITY, || {
        for n in 1u8..=4 {
            let window = Window::standard(n);
            for ct in cycle_types(n) {
                // Expansion rejects any negative coefficient inside the window.
                let table = poincare_series(n, &ct).expand(&window).map_err(err)?;
                ensure!(table.total() > 0, "empty expansion at n={n} type {ct:?}");
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_10_move_invariance() {
    report(10, "random row-move sequences preserve chain-level homology", f64::INFINITY, || {
        let cfg = cfg();
        struct BaseCase {
            k: KoszulFactorization,
            window: Window,
            baseline: DimensionTable,
        }
        let mut bases: Vec<BaseCase> = Vec::new();
        for n in 2u8..=3 {
            for ct in cycle_types(n) {
                let (_, twist) = block_twist(n, &ct);
                let k = hh0_specialize(&build_mn(n, twist.as_ref(), &cfg).map_err(err)?)
                    .map_err(err)?;
                let window = Window::bigraded(-10, 6, 4);
                let baseline = bidegree_homology(&k, &window, 1).map_err(err)?;
                bases.push(BaseCase { k, window, baseline });
            }
        }

        let lambdas: [Rat; 6] = [rat(1), rat(-1), rat(2), rat(-2), rat_frac(1, 2), rat(3)];
        let scales: [Rat; 5] = [rat(2), rat(-1), rat(3), rat_frac(-1, 2), rat(5)];
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
        let mut exclusions = 0usize;
        for seq in 0..200 {
            let case = &bases[rng.random_range(0..bases.len())];
            let mut k = case.k.clone();
            let steps = 2 + rng.random_range(0..5);
            for _ in 0..steps {
                let kind = rng.random_range(0..6u32);
                let mut moved = false;
                if kind == 0 {
                    // Try to solve away a variable through a (0 | u - p) row.
                    'rows: for row in 0..k.rows.len() {
                        if !k.rows[row].a.is_zero() {
                            continue;
                        }
                        for i in 1..=3u8 {
                            let var = format!("u{i}");
                            if k.registry().idx_of(&var).is_none() {
                                continue;
                            }
                            if let Ok(next) = k.exclude_variable(row, &var) {
                                k = next;
                                exclusions += 1;
                                moved = true;
                                break 'rows;
                            }
                        }
                    }
                }
                if !moved && kind < 4 && k.rows.len() >= 2 {
                    let i = rng.random_range(0..k.rows.len());
                    let mut j = rng.random_range(0..k.rows.len() - 1);
                    if j >= i {
                        j += 1;
                    }
                    let lambda = Poly::constant(
                        k.registry(),
                        lambdas[rng.random_range(0..lambdas.len())].clone(),
                    );
                    k = k.row_transform(i, j, &lambda).map_err(err)?;
                    moved = true;
                }
                if !moved && !k.rows.is_empty() {
                    let i = rng.random_range(0..k.rows.len());
                    let c = scales[rng.random_range(0..scales.len())].clone();
                    k = k.scale_row(i, &c).map_err(err)?;
                }
            }
            let table = bidegree_homology(&k, &case.window, 1).map_err(err)?;
            ensure!(
                table.mismatches(&case.baseline).is_empty(),
                "sequence {seq} changed the homology table"
            );
        }
        ensure!(exclusions > 0, "no exclusion move was ever exercised");
        Ok(())
    });
}
