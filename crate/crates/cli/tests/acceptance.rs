//! acceptance suite: one pass/fail line per criterion.
//!
//! run with `cargo test --test acceptance -- --nocapture` to see the lines.

use homlab::bar::regular_stalk;
use homlab::homalg::{
    e_complex, ext_oracle, free_module, regular, simple, stable_hom_oracle, Complex, EComplex,
    Module,
};
use homlab::linalg::FieldSpec;
use homlab::ncforms::omega_bar_square_holds;
use homlab::samples;
use homlab::singyoneda::sy_cohomology;
use homlab::stabilization::{comparison_c, complete_resolution, gorenstein_probe, stab, vartheta};
use homlab::yoneda::HomCtx;
use homlab_cli::suite::identity_suite;
use std::process::Command;

fn report(n: usize, desc: &str, ok: bool, detail: &str) {
    println!(
        "criterion {n} ({desc}): {}",
        if ok { "pass" } else { "fail" }
    );
    assert!(ok, "criterion {n} ({desc}) failed: {detail}");
}

fn stalk(alg: &homlab::algebra::Algebra, m: &Module) -> EComplex {
    e_complex(alg, &Complex::stalk(alg.field, m.clone(), 0))
}

#[test]
fn criterion_1_identity_suite() {
    let t0 = std::time::Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for f in [FieldSpec::prime(2), FieldSpec::prime(3), FieldSpec::rationals()] {
        for (a, name) in samples::all(f).iter().zip(samples::names()) {
            let out = identity_suite(a, 7, 8);
            if out.elements < 100 {
                ok = false;
                detail.push_str(&format!("{name}: only {} elements; ", out.elements));
            }
            for (check, passed) in &out.checks {
                if !passed {
                    ok = false;
                    detail.push_str(&format!("{name} char {}: {check}; ", f.characteristic));
                }
            }
        }
    }
    let within_budget = t0.elapsed().as_secs() < 120;
    if !within_budget {
        detail.push_str(&format!("took {:?}; ", t0.elapsed()));
    }
    report(1, "dg identity suite", ok && within_budget, &detail);
}

#[test]
fn criterion_2_ext_agreement() {
    let mut ok = true;
    let mut detail = String::new();
    for f in [FieldSpec::prime(2), FieldSpec::rationals()] {
        for (a, name) in samples::all(f).iter().zip(samples::names()) {
            let mut mods: Vec<Module> = Vec::new();
            for i in 0..a.num_idempotents() {
                mods.push(simple(a, i));
                mods.push(free_module(a, &[i]).module);
            }
            for m in &mods {
                for n in &mods {
                    let x = stalk(a, m);
                    let y = stalk(a, n);
                    let ctx = HomCtx::new(a, &x, &y, 8);
                    let w = ctx.window(-1, 7);
                    for d in 0..=6i64 {
                        let got = w.complex.cohomology_dim(d).unwrap();
                        let want = ext_oracle(a, m, n, d as usize).unwrap();
                        if got != want {
                            ok = false;
                            detail.push_str(&format!("{name} deg {d}: {got} vs {want}; "));
                        }
                    }
                }
            }
        }
    }
    report(2, "Ext agreement through degree 6", ok, &detail);
}

#[test]
fn criterion_3_singularity_agreement() {
    let mut ok = true;
    let mut detail = String::new();
    // self-injective: stabilized dims match the syzygy oracle
    for f in [FieldSpec::prime(2), FieldSpec::prime(3)] {
        for (mk, name) in [
            (samples::dual_numbers as fn(FieldSpec) -> _, "dual"),
            (samples::kx3, "kx3"),
            (samples::nakayama, "nakayama"),
        ] {
            let a = mk(f);
            let pairs: Vec<(usize, usize)> = if a.num_idempotents() == 1 {
                vec![(0, 0)]
            } else {
                vec![(0, 0), (0, 1)]
            };
            for (i, j) in pairs {
                let m = simple(&a, i);
                let n = simple(&a, j);
                for d in -4..=4i64 {
                    let rep = sy_cohomology(&a, &m, &n, d, 10, 3).unwrap();
                    let want = stable_hom_oracle(&a, &m, &n, d).unwrap();
                    if !rep.stable || rep.value != Some(want) {
                        ok = false;
                        detail.push_str(&format!(
                            "{name} char {} S{i},S{j} deg {d}: {:?} vs {want}; ",
                            f.characteristic, rep.value
                        ));
                    }
                }
            }
        }
    }
    // finite global dimension: everything stabilizes to zero
    for f in [FieldSpec::prime(2), FieldSpec::rationals()] {
        let a = samples::a2(f);
        for i in 0..2 {
            for j in 0..2 {
                for d in -4..=4i64 {
                    let rep =
                        sy_cohomology(&a, &simple(&a, i), &simple(&a, j), d, 10, 3).unwrap();
                    if !rep.stable || rep.value != Some(0) {
                        ok = false;
                        detail.push_str(&format!("a2 S{i},S{j} deg {d}: {:?}; ", rep.value));
                    }
                }
            }
        }
    }
    report(3, "singularity-category agreement", ok, &detail);
}

#[test]
fn criterion_4_splice_square() {
    let mut ok = true;
    let mut detail = String::new();
    for f in [FieldSpec::prime(2), FieldSpec::prime(3)] {
        for (a, name) in samples::all(f).iter().zip(samples::names()) {
            let x = stalk(a, &simple(a, 0));
            for p in 0..=2usize {
                if !omega_bar_square_holds(a, &x, p, 3) {
                    ok = false;
                    detail.push_str(&format!("{name} p={p}; "));
                }
            }
        }
    }
    report(4, "splice square commutes for p <= 2", ok, &detail);
}

#[test]
fn criterion_5_stab_window_soundness() {
    let mut ok = true;
    let mut detail = String::new();
    let f2 = FieldSpec::prime(2);
    // full [-3,3] honest cones on the small algebras
    for (a, name, idx) in [
        (samples::dual_numbers(f2), "dual", vec![0]),
        (samples::a2(f2), "a2", vec![0, 1]),
        (samples::nakayama(f2), "nakayama", vec![0, 1]),
    ] {
        for i in idx {
            let x = stalk(&a, &simple(&a, i));
            let sw = stab(&a, &x, -3, 3).unwrap();
            if !sw.acyclic_interior || !sw.components_injective {
                ok = false;
                detail.push_str(&format!("{name} S{i}; "));
            }
        }
    }
    // dual numbers: dims 2, ranks 1, matching the syzygy-oracle resolution
    let a = samples::dual_numbers(f2);
    let sw = stab(&a, &stalk(&a, &simple(&a, 0)), -3, 3).unwrap();
    let red = sw.reduced.as_ref().unwrap();
    for n in -3..=3i64 {
        if red.dims[&n] != 2 {
            ok = false;
            detail.push_str(&format!("dual dim at {n}: {}; ", red.dims[&n]));
        }
    }
    for n in -3..3i64 {
        if red.ranks[&n] != 1 {
            ok = false;
            detail.push_str(&format!("dual rank at {n}: {}; ", red.ranks[&n]));
        }
    }
    // kx3: narrower honest window, reduced window carries the shape
    let a = samples::kx3(FieldSpec::prime(3));
    let sw = stab(&a, &stalk(&a, &simple(&a, 0)), 0, 1).unwrap();
    if !sw.acyclic_interior || !sw.components_injective {
        ok = false;
        detail.push_str("kx3 honest window; ");
    }
    let red = complete_resolution(&a, &simple(&a, 0), -2, 2).unwrap();
    if !red.acyclic || (-2..=2i64).any(|n| red.dims[&n] != 3) {
        ok = false;
        detail.push_str("kx3 reduced window; ");
    }
    report(5, "stabilization window soundness", ok, &detail);
}

#[test]
fn criterion_6_triangle_dimension_law() {
    let mut ok = true;
    let mut detail = String::new();
    let f2 = FieldSpec::prime(2);
    let cases: Vec<(homlab::algebra::Algebra, Module, &str)> = vec![
        (samples::dual_numbers(f2), simple(&samples::dual_numbers(f2), 0), "k"),
        (samples::dual_numbers(f2), regular(&samples::dual_numbers(f2)), "Lambda"),
        (samples::a2(f2), simple(&samples::a2(f2), 1), "S1"),
    ];
    for (a, m, name) in &cases {
        let x = stalk(a, m);
        let p = 5;
        let mw = vartheta(a, &x, p, -2, 2).unwrap();
        if !mw.cochain {
            ok = false;
            detail.push_str(&format!("{name}: vartheta not a cochain map; "));
        }
        // mapping-cone dimension law at each interior degree
        for n in -2..1i64 {
            let cone_dim = mw.cone_diff(n).cols;
            if cone_dim != mw.src_dims[&(n + 1)] + mw.tgt_dims[&n] {
                ok = false;
                detail.push_str(&format!("{name} deg {n}: cone dim law; "));
            }
        }
        // the cone realizes the stabilized hom out of the regular stalk,
        // which vanishes for these inputs
        let h = mw.cone_cohomology_interior().unwrap();
        let rep = sy_cohomology(a, &regular(a), m, 0, 10, 3).unwrap();
        if rep.value != Some(0) {
            ok = false;
            detail.push_str(&format!("{name}: stabilized hom {:?}; ", rep.value));
        }
        for (n, d) in &h {
            if *d != 0 {
                ok = false;
                detail.push_str(&format!("{name} H^{n} of cone = {d}; "));
            }
        }
    }
    report(6, "triangle dimension law", ok, &detail);
}

#[test]
fn criterion_7_comparison_certification() {
    let mut ok = true;
    let mut detail = String::new();
    let f2 = FieldSpec::prime(2);
    let a = samples::dual_numbers(f2);
    let rep = comparison_c(&a, &simple(&a, 0), -3, 3, 3).unwrap();
    if !rep.certified || !rep.dims_agree {
        ok = false;
        detail.push_str("dual k; ");
    }
    let b = samples::a2(f2);
    for i in 0..2 {
        let rep = comparison_c(&b, &simple(&b, i), -3, 3, 3).unwrap();
        if !rep.certified || !rep.dims_agree || rep.sy_dims.values().any(|&d| d != 0) {
            ok = false;
            detail.push_str(&format!("a2 S{i}; "));
        }
    }
    let c = samples::kx3(FieldSpec::prime(3));
    let rep = comparison_c(&c, &simple(&c, 0), -1, 1, 2).unwrap();
    if !rep.certified || !rep.dims_agree || (-1..=1i64).any(|n| rep.sy_dims[&n] != 3) {
        ok = false;
        detail.push_str(&format!("kx3: {:?} {:?}; ", rep.sy_dims, rep.warnings));
    }
    report(7, "comparison certification", ok, &detail);
}

#[test]
fn criterion_8_gorenstein_probe() {
    let mut ok = true;
    let mut detail = String::new();
    let f2 = FieldSpec::prime(2);
    let rep = gorenstein_probe(&samples::dual_numbers(f2), 8).unwrap();
    if !rep.consistent || !rep.nonzero[0].is_empty() {
        ok = false;
        detail.push_str("dual; ");
    }
    let rep = gorenstein_probe(&samples::kx3(f2), 8).unwrap();
    if !rep.consistent || !rep.nonzero[0].is_empty() {
        ok = false;
        detail.push_str("kx3; ");
    }
    let rep = gorenstein_probe(&samples::kxy(f2), 8).unwrap();
    if rep.consistent || rep.nonzero[0] != (1..=8).collect::<Vec<_>>() {
        ok = false;
        detail.push_str("kxy; ");
    }
    report(8, "Gorenstein probe through degree 8", ok, &detail);
}

#[test]
fn criterion_9_determinism() {
    let bin = env!("CARGO_BIN_EXE_homlab");
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../..");
    let mut ok = true;
    let mut detail = String::new();
    for args in [
        vec!["verify", "configs/a2.alg", "--seed", "7", "--format", "json"],
        vec!["ext", "configs/dual_numbers.alg", "k", "k", "--max-deg", "4", "--format", "json"],
        vec!["gorenstein", "configs/kxy.alg", "--format", "json"],
    ] {
        let run = || {
            Command::new(bin)
                .current_dir(root)
                .args(&args)
                .output()
                .expect("cli run")
        };
        let first = run();
        let second = run();
        if !first.status.success() || first.stdout != second.stdout {
            ok = false;
            detail.push_str(&format!("{args:?}; "));
        }
        if serde_json::from_slice::<serde_json::Value>(&first.stdout).is_err() {
            ok = false;
            detail.push_str(&format!("{args:?} not json; "));
        }
    }
    report(9, "byte-identical JSON output", ok, &detail);
}
