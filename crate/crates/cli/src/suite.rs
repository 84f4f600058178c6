//! the randomized identity suite: exact dg identities checked on random
//! homogeneous elements, shared by `verify` and the acceptance tests.

use homlab::algebra::Algebra;
use homlab::bar::{bar_complex, bar_tensor, epsilon_tensor, regular_stalk};
use homlab::homalg::{e_complex, simple, Complex, EComplex};
use homlab::linalg::FieldSpec;
use homlab::ncforms::{omega, omega_on_morphism, omega_tower, theta};
use homlab::singyoneda::{sy_compose, sy_equal, SYElement};
use homlab::yoneda::{alpha, compose, iota, phi, HomCtx, YonedaElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SuiteOutcome {
    pub checks: Vec<(String, bool)>,
    /// number of random homogeneous elements drawn
    pub elements: usize,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn random_element(ctx: &HomCtx, degree: i64, rng: &mut ChaCha8Rng) -> YonedaElement {
    let coords = ctx.coords(degree);
    let fld = ctx.field();
    let vals: Vec<_> = coords
        .iter()
        .map(|_| fld.from_int(rng.gen_range(-6i64..7)))
        .collect();
    ctx.from_coords(degree, &coords, &vals)
}

fn stalk(alg: &Algebra, i: usize) -> EComplex {
    e_complex(alg, &Complex::stalk(alg.field, simple(alg, i), 0))
}

/// run every identity on `trials` random elements per degree; all equalities
/// are exact.
pub fn identity_suite(alg: &Algebra, seed: u64, trials: usize) -> SuiteOutcome {
    let f = alg.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut elements = 0usize;

    // rational arithmetic is an order of magnitude costlier than prime
    // fields; shrink the ambient bar complex there so the suite stays fast
    let bar_cap = if f.characteristic == 0 { 1 } else { 2 };
    let bt = bar_complex(alg, bar_cap);
    let x = e_complex(alg, &bt.complex);
    let ctx = HomCtx::new(alg, &x, &x, 4);

    // delta squared
    let mut ok = true;
    for _ in 0..trials {
        for deg in -1..=1i64 {
            let g = random_element(&ctx, deg, &mut rng);
            elements += 1;
            ok &= ctx.delta(&ctx.delta(&g)).is_zero();
        }
    }
    checks.push(("delta squared vanishes".into(), ok));

    // graded leibniz for the composition product
    let mut ok = true;
    for _ in 0..trials {
        for (dg, dh) in [(0i64, 0i64), (1, -1), (-1, 1), (1, 1)] {
            let g = random_element(&ctx, dg, &mut rng);
            let h = random_element(&ctx, dh, &mut rng);
            elements += 2;
            let lhs = ctx.delta(&compose(&ctx, &ctx, &g, &h));
            let t1 = compose(&ctx, &ctx, &ctx.delta(&g), &h);
            let t2 = ctx.scale(&f.sign(dg), &compose(&ctx, &ctx, &g, &ctx.delta(&h)));
            ok &= lhs == ctx.add(&t1, &t2);
        }
    }
    checks.push(("graded leibniz rule".into(), ok));

    // associativity and unit of the composition product
    let mut ok = true;
    let id = ctx.identity();
    ok &= ctx.delta(&id).is_zero();
    for _ in 0..trials {
        let g = random_element(&ctx, 1, &mut rng);
        let h = random_element(&ctx, -1, &mut rng);
        let k = random_element(&ctx, 0, &mut rng);
        elements += 3;
        let l = compose(&ctx, &ctx, &compose(&ctx, &ctx, &g, &h), &k);
        let r = compose(&ctx, &ctx, &g, &compose(&ctx, &ctx, &h, &k));
        ok &= l == r;
        ok &= compose(&ctx, &ctx, &id, &g) == g;
        ok &= compose(&ctx, &ctx, &g, &id) == g;
    }
    checks.push(("composition associative and unital".into(), ok));

    // alpha is a cochain map on the bar-tensor side
    let xs = stalk(alg, 0);
    let bts = bar_tensor(alg, &xs, 4);
    let cs = HomCtx::new(alg, &xs, &xs, 4);
    let mut ok = true;
    for _ in 0..trials.min(4) {
        for deg in 0..=2i64 {
            let g = random_element(&cs, deg, &mut rng);
            elements += 1;
            let ag = alpha(&cs, &bts, &g);
            let adg = alpha(&cs, &bts, &cs.delta(&g));
            for (&d0, m0) in &ag {
                let dsrc = bts.complex.diff_at(d0);
                let lhs1 = xs.ediff_at(d0 + deg).mul(m0);
                let m1 = ag.get(&(d0 + 1)).cloned().unwrap_or_else(|| {
                    homlab::linalg::Matrix::zero(xs.dim_at(d0 + 1 + deg), dsrc.rows, f)
                });
                let lhs2 = m1.mul(&dsrc).scale(&f.sign(deg + 1));
                let want = adg.get(&d0).cloned().unwrap_or_else(|| {
                    homlab::linalg::Matrix::zero(xs.dim_at(d0 + deg + 1), m0.cols, f)
                });
                ok &= lhs1.add(&lhs2) == want;
            }
        }
    }
    checks.push(("alpha is a cochain map".into(), ok));

    // alpha inverts: the represented functional recovers the element
    let reg = regular_stalk(alg);
    let clx = HomCtx::new(alg, &reg, &x, 4);
    let mut ok = true;
    for _ in 0..trials.min(4) {
        for deg in -1..=1i64 {
            let g = random_element(&ctx, deg, &mut rng);
            elements += 1;
            let back = phi(&ctx, &clx, &clx, |h| compose(&clx, &ctx, &g, h), deg);
            ok &= back == g;
        }
    }
    checks.push(("alpha is invertible".into(), ok));

    // theta is closed and natural for the twist
    let om = omega(alg, &x);
    let ox = &om.complex;
    let cxo = HomCtx::new(alg, &x, ox, 4);
    let coo = HomCtx::new(alg, ox, ox, 4);
    let cxy = HomCtx::new(alg, &x, &x, 4);
    let th = theta(&cxo, &om);
    let mut ok = cxo.delta(&th).is_zero();
    for _ in 0..trials.min(4) {
        for deg in -1..=1i64 {
            let g = random_element(&cxy, deg, &mut rng);
            elements += 1;
            let og = omega_on_morphism(&cxy, &om, &om, &coo, &g);
            ok &= compose(&cxo, &coo, &og, &th) == compose(&cxo, &cxy, &th, &g);
        }
    }
    checks.push(("theta closed and natural".into(), ok));

    // the twist is a dg functor
    let cxy5 = HomCtx::new(alg, &x, &x, 4);
    let coo5 = HomCtx::new(alg, ox, ox, 4);
    let mut ok =
        omega_on_morphism(&cxy5, &om, &om, &coo5, &cxy5.identity()) == coo5.identity();
    for _ in 0..trials.min(4) {
        for (dg, dh) in [(0i64, 0i64), (1, -1), (1, 1)] {
            let g = random_element(&cxy5, dg, &mut rng);
            let h = random_element(&cxy5, dh, &mut rng);
            elements += 2;
            let og = omega_on_morphism(&cxy5, &om, &om, &coo5, &g);
            let oh = omega_on_morphism(&cxy5, &om, &om, &coo5, &h);
            let ogh =
                omega_on_morphism(&cxy5, &om, &om, &coo5, &compose(&cxy5, &cxy5, &g, &h));
            ok &= ogh == compose(&coo5, &coo5, &og, &oh);
            let odg = omega_on_morphism(&cxy5, &om, &om, &coo5, &cxy5.delta(&g));
            ok &= odg == coo5.delta(&og);
        }
    }
    checks.push(("twist is a dg functor".into(), ok));

    // the counit absorbs iota
    let bxs = e_complex(alg, &bts.complex);
    let cxb = HomCtx::new(alg, &xs, &bxs, 4);
    let cbx = HomCtx::new(alg, &bxs, &xs, 4);
    let cxx = HomCtx::new(alg, &xs, &xs, 4);
    let io = iota(&cxb, &bts);
    let mut ok = cxb.delta(&io).is_zero();
    let eps = epsilon_tensor(alg, &bts, &xs);
    let mut ee = YonedaElement::zero(0);
    for (deg, m) in &eps.comps {
        if !m.is_zero() {
            ee.blocks.insert((0, *deg), m.clone());
        }
    }
    ok &= cbx.delta(&ee).is_zero();
    ok &= compose(&cxx, &cbx, &ee, &io) == cxx.identity();
    checks.push(("counit absorbs iota".into(), ok));

    // singular composition: unital and associative in the colimit
    let tower = omega_tower(alg, &xs, 6);
    let cap = 4usize;
    let c0 = HomCtx::new(alg, &xs, &xs, cap);
    let sid = SYElement {
        stage: 0,
        rep: c0.identity(),
    };
    let mut ok = true;
    for _ in 0..trials.min(3) {
        let g = SYElement {
            stage: 0,
            rep: random_element(&c0, 0, &mut rng),
        };
        let h = SYElement {
            stage: 0,
            rep: random_element(&c0, 0, &mut rng),
        };
        let k = SYElement {
            stage: 1,
            rep: random_element(&HomCtx::new(alg, &xs, &tower[0].complex, cap), 0, &mut rng),
        };
        elements += 3;
        ok &= sy_equal(alg, &xs, &xs, &tower, cap, 2, &sy_compose(alg, &xs, &tower, cap, &sid, &g), &g);
        ok &= sy_equal(alg, &xs, &xs, &tower, cap, 2, &sy_compose(alg, &xs, &tower, cap, &g, &sid), &g);
        let l = sy_compose(alg, &xs, &tower, cap, &sy_compose(alg, &xs, &tower, cap, &k, &h), &g);
        let r = sy_compose(alg, &xs, &tower, cap, &k, &sy_compose(alg, &xs, &tower, cap, &h, &g));
        ok &= sy_equal(alg, &xs, &xs, &tower, cap, 2, &l, &r);
    }
    checks.push(("singular composition associative and unital".into(), ok));

    SuiteOutcome { checks, elements }
}

/// the full matrix of shipped sample algebras and fields.
pub fn fields() -> Vec<FieldSpec> {
    vec![FieldSpec::prime(2), FieldSpec::prime(3), FieldSpec::rationals()]
}
