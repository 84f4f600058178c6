//! the noncommutative-forms twist: Omega X = s Lbar (x) X with the twisted
//! module structure, its action on hom elements, the tautological element
//! theta, and the splice maps varsigma into the bar tensor.

use crate::algebra::Algebra;
use crate::bar::{bar_tensor, BarBasisElt, BarTensor};
use crate::homalg::{CochainMap, Complex, EComplex, Module};
use crate::linalg::Matrix;
use crate::yoneda::{HomCtx, YonedaElement};
use std::collections::{BTreeMap, HashMap};

/// Omega X, with its basis bookkeeping: at degree n the basis pairs a
/// bar-basis element with an adapted basis vector of X^{n+1}.
pub struct Omega {
    pub complex: EComplex,
    /// basis[n] = (bar index, adapted index into X^{n+1}), r matching idem
    pub basis: BTreeMap<i64, Vec<(usize, usize)>>,
    index: BTreeMap<i64, HashMap<(usize, usize), usize>>,
}

impl Omega {
    pub fn position(&self, n: i64, b: usize, k: usize) -> Option<usize> {
        self.index.get(&n)?.get(&(b, k)).copied()
    }
}

/// build Omega X: degree of s a (x) x is |x| - 1, the differential is
/// -(1 (x) d_X), and c acts by c . (s a (x) x) = s(ca) (x) x - s c (x) ax.
pub fn omega(alg: &Algebra, x: &EComplex) -> Omega {
    let f = alg.field;
    let mut basis: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    if let Some((xlo, xhi)) = x.support() {
        for m in xlo..=xhi {
            let mut v = Vec::new();
            for b in 0..alg.bar_dim() {
                let r = alg.bar_bidegree(b).1;
                for k in 0..x.dim_at(m) {
                    if x.idem_of(m, k) == r {
                        v.push((b, k));
                    }
                }
            }
            basis.insert(m - 1, v);
        }
    }
    let mut index = BTreeMap::new();
    for (n, v) in &basis {
        let mut h = HashMap::new();
        for (i, &bk) in v.iter().enumerate() {
            h.insert(bk, i);
        }
        index.insert(*n, h);
    }
    let mut components = BTreeMap::new();
    let mut diff = BTreeMap::new();
    for (n, v) in &basis {
        let dim = v.len();
        let mut action = Vec::with_capacity(alg.dim);
        for c in 0..alg.dim {
            let mut mtx = Matrix::zero(dim, dim, f);
            let c_bar = alg.bar_basis.iter().position(|&t| t == c);
            for (col, &(b, k)) in v.iter().enumerate() {
                // s(ca) (x) x
                let prod = alg.project_to_bar(alg.mul_basis(c, alg.bar_basis[b]));
                for (b2, s) in prod.iter().enumerate() {
                    if !f.is_zero(s) {
                        if let Some(row) = index[n].get(&(b2, k)) {
                            mtx.add_assign_at(*row, col, s);
                        }
                    }
                }
                // - s c (x) ax
                if let Some(cb) = c_bar {
                    if let Some(act) = x.eact(n + 1, alg.bar_basis[b]) {
                        for k2 in 0..act.rows {
                            let s = act.get(k2, k);
                            if !f.is_zero(s) {
                                if let Some(row) = index[n].get(&(cb, k2)) {
                                    mtx.add_assign_at(*row, col, &f.neg(s));
                                }
                            }
                        }
                    }
                }
            }
            action.push(mtx);
        }
        components.insert(*n, Module { dim, action });
        // differential: -(1 (x) d_X)
        let tgt = basis.get(&(n + 1)).map(|w| w.len()).unwrap_or(0);
        let mut d = Matrix::zero(tgt, dim, f);
        if tgt > 0 {
            let dx = x.ediff_at(n + 1);
            for (col, &(b, k)) in v.iter().enumerate() {
                for k2 in 0..dx.rows {
                    let s = dx.get(k2, k);
                    if !f.is_zero(s) {
                        if let Some(row) = index[&(n + 1)].get(&(b, k2)) {
                            d.add_assign_at(*row, col, &f.neg(s));
                        }
                    }
                }
            }
        }
        diff.insert(*n, d);
    }
    let complex = Complex {
        field: f,
        components,
        diff,
    };
    Omega {
        complex: crate::homalg::e_complex(alg, &complex),
        basis,
        index,
    }
}

/// the iterated twist; tower[j] is Omega^{j+1} X built on the previous stage.
pub fn omega_tower(alg: &Algebra, x: &EComplex, p: usize) -> Vec<Omega> {
    let mut tower: Vec<Omega> = Vec::with_capacity(p);
    for j in 0..p {
        let next = if j == 0 {
            omega(alg, x)
        } else {
            omega(alg, &tower[j - 1].complex)
        };
        tower.push(next);
    }
    tower
}

/// expand an adapted basis vector of Omega^p X at the given degree into the
/// outer-to-inner bar tuple and the underlying X-basis index at degree+p.
pub fn unfold(tower: &[Omega], deg: i64, k: usize) -> (Vec<usize>, usize) {
    let mut tuple = Vec::with_capacity(tower.len());
    let mut d = deg;
    let mut idx = k;
    for om in tower.iter().rev() {
        let (b, inner) = om.basis[&d][idx];
        tuple.push(b);
        d += 1;
        idx = inner;
    }
    (tuple, idx)
}

/// theta: the tautological degree-0, filtration-1 element of the hom space
/// from X to Omega X, sending s a (x) x to itself.
pub fn theta(ctx: &HomCtx, om: &Omega) -> YonedaElement {
    let f = ctx.field();
    let mut out = YonedaElement::zero(0);
    let Some((xlo, xhi)) = ctx.x.support() else {
        return out;
    };
    for m in xlo..=xhi {
        let cols = ctx.src_basis(1, m).len();
        let rows = ctx.y.dim_at(m - 1);
        if cols == 0 || rows == 0 {
            continue;
        }
        let mut b = Matrix::zero(rows, cols, f);
        for (col, &(t, k)) in ctx.src_basis(1, m).iter().enumerate() {
            let bar = ctx.tuples[1][t][0];
            if let Some(row) = om.position(m - 1, bar, k) {
                b.set(row, col, f.one());
            }
        }
        if !b.is_zero() {
            out.blocks.insert((1, m), b);
        }
    }
    out
}

/// the twist on hom elements: strip the outermost bar factor of the argument,
/// apply f to the rest, and restore it, with the sign (-1)^{|f|}.
pub fn omega_on_morphism(
    ctx_xy: &HomCtx,
    om_x: &Omega,
    om_y: &Omega,
    ctx_oxy: &HomCtx,
    f: &YonedaElement,
) -> YonedaElement {
    let fld = ctx_xy.field();
    let sgn = fld.sign(f.degree);
    let mut out = YonedaElement::zero(f.degree);
    let Some((olo, ohi)) = ctx_oxy.x.support() else {
        return out;
    };
    for q in 0..=ctx_oxy.cap {
        for m in olo..=ohi {
            let cols = ctx_oxy.src_basis(q, m).len();
            let rows = ctx_oxy.y.dim_at(m - q as i64 + f.degree);
            if cols == 0 || rows == 0 {
                continue;
            }
            let mut blk = Matrix::zero(rows, cols, fld);
            for (col, &(t, k)) in ctx_oxy.src_basis(q, m).iter().enumerate() {
                let (b0, kx) = om_x.basis[&m][k];
                // combined tuple (a_1 .. a_q, b0); strip its head
                let mut combined: Vec<usize> = ctx_oxy.tuples[q][t].clone();
                combined.push(b0);
                let head = combined[0];
                let tail = &combined[1..];
                let Some(fb) = f.block(q, m + 1) else { continue };
                let tf = if q == 0 {
                    0
                } else {
                    match ctx_xy.tuples[q].iter().position(|u| u == tail) {
                        Some(i) => i,
                        None => continue,
                    }
                };
                let Some(cf) = ctx_xy.col_of(q, m + 1, tf, kx) else {
                    continue;
                };
                let ydeg = m + 1 - q as i64 + f.degree;
                for j in 0..fb.rows {
                    let v = fb.get(j, cf);
                    if fld.is_zero(v) {
                        continue;
                    }
                    if let Some(row) = om_y.position(ydeg - 1, head, j) {
                        blk.add_assign_at(row, col, &fld.mul(&sgn, v));
                    }
                }
            }
            if !blk.is_zero() {
                out.blocks.insert((q, m), blk);
            }
        }
    }
    out
}

/// varsigma_p: splice the bar tuple of Omega^p X onto the bar factors,
/// (a (x) s a_{1,n} (x) 1) (x) (s a_{n+1,n+p} (x) x) -> (a (x) s a_{1,n+p} (x) 1) (x) x;
/// a cochain map from the bar tensor over Omega^p X into the quotient of the
/// one over X by bar degrees below p (the raw components returned here hit
/// lower bar degrees only through terms the quotient kills).
pub fn varsigma(
    alg: &Algebra,
    tower: &[Omega],
    src: &BarTensor,
    tgt: &BarTensor,
) -> CochainMap {
    let f = alg.field;
    let p = tower.len();
    let mut comps = BTreeMap::new();
    for (deg, v) in &src.basis {
        let tgt_dim = tgt.complex.dim_at(*deg);
        let mut m = Matrix::zero(tgt_dim, v.len(), f);
        for (col, e) in v.iter().enumerate() {
            let (btuple, kx) = unfold(tower, e.xdeg, e.k);
            let mut tuple: Vec<usize> = src.tuples[e.n][e.t].clone();
            tuple.extend_from_slice(&btuple);
            let Some(t2) = tgt.tuple_index(e.n + p, &tuple) else {
                continue;
            };
            let elt = BarBasisElt {
                n: e.n + p,
                a: e.a,
                t: t2,
                xdeg: e.xdeg + p as i64,
                k: kx,
            };
            if let Some(row) = tgt.position(*deg, &elt) {
                m.set(row, col, f.one());
            }
        }
        comps.insert(*deg, m);
    }
    CochainMap {
        source: src.complex.clone(),
        target: tgt.complex.clone(),
        comps,
    }
}

/// zero out the blocks whose image lies in bar degree at most p of the bar
/// tensor target; the coordinate form of pushing forward along pi_p.
pub fn kill_bar_degrees_up_to(
    bt: &BarTensor,
    f: &YonedaElement,
    p: usize,
) -> YonedaElement {
    let fld = bt.complex.field;
    let mut out = YonedaElement::zero(f.degree);
    for (&(q, m), blk) in &f.blocks {
        let ydeg = m - q as i64 + f.degree;
        let Some(v) = bt.basis.get(&ydeg) else { continue };
        let mut nb = blk.clone();
        for (row, e) in v.iter().enumerate() {
            if e.n <= p {
                for c in 0..nb.cols {
                    nb.set(row, c, fld.zero());
                }
            }
        }
        if !nb.is_zero() {
            out.blocks.insert((q, m), nb);
        }
    }
    out
}

/// the splice square: spliced inclusion of Omega^{p+1} X composed with theta
/// equals the bar-degree-p kill of the spliced inclusion of Omega^p X.
pub fn omega_bar_square_holds(alg: &Algebra, x: &EComplex, p: usize, cap: usize) -> bool {
    let tower = omega_tower(alg, x, p + 1);
    let omp: &EComplex = if p == 0 { x } else { &tower[p - 1].complex };
    let omp1 = &tower[p].complex;

    let bar_cap = cap + p + 1;
    let tgt_bar = crate::bar::bar_tensor(alg, x, bar_cap);
    let tgt_e = crate::homalg::e_complex(alg, &tgt_bar.complex);

    // right side: varsigma_p . iota_{Omega^p X}, then kill bar degrees <= p
    let src_bar_p = bar_tensor(alg, omp, cap.max(1));
    let src_p_e = crate::homalg::e_complex(alg, &src_bar_p.complex);
    let ctx_p_bar = HomCtx::new(alg, omp, &src_p_e, cap);
    let io_p = crate::yoneda::iota(&ctx_p_bar, &src_bar_p);
    let vs_p = varsigma(alg, &tower[..p], &src_bar_p, &tgt_bar);
    let rhs_full = crate::yoneda::map_target(&io_p, &vs_p.comps);
    let rhs = kill_bar_degrees_up_to(&tgt_bar, &rhs_full, p);

    // left side: (varsigma_{p+1} . iota_{Omega^{p+1} X}) composed with theta
    let src_bar_p1 = bar_tensor(alg, omp1, cap.max(1));
    let src_p1_e = crate::homalg::e_complex(alg, &src_bar_p1.complex);
    let ctx_p1_bar = HomCtx::new(alg, omp1, &src_p1_e, cap);
    let io_p1 = crate::yoneda::iota(&ctx_p1_bar, &src_bar_p1);
    let vs_p1 = varsigma(alg, &tower[..p + 1], &src_bar_p1, &tgt_bar);
    let g = crate::yoneda::map_target(&io_p1, &vs_p1.comps);

    let ctx_theta = HomCtx::new(alg, omp, omp1, cap);
    let th = theta(&ctx_theta, &tower[p]);
    let cxz = HomCtx::new(alg, omp, &tgt_e, cap);
    let cyz = HomCtx::new(alg, omp1, &tgt_e, cap);
    let lhs = crate::yoneda::compose(&cxz, &cyz, &g, &th);

    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::{e_complex, simple, Complex};
    use crate::linalg::FieldSpec;
    use crate::samples;
    use crate::yoneda::compose;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stalk(alg: &crate::algebra::Algebra, i: usize) -> EComplex {
        e_complex(alg, &Complex::stalk(alg.field, simple(alg, i), 0))
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

    #[test]
    fn omega_is_a_valid_complex() {
        for f in [FieldSpec::prime(2), FieldSpec::prime(3), FieldSpec::rationals()] {
            for a in samples::all(f) {
                let bt = crate::bar::bar_complex(&a, 2);
                let x = e_complex(&a, &bt.complex);
                let om = omega(&a, &x);
                om.complex.complex.validate(&a).unwrap();
                let om2 = omega(&a, &om.complex);
                om2.complex.complex.validate(&a).unwrap();
            }
        }
    }

    #[test]
    fn omega_dims() {
        let f = FieldSpec::prime(2);
        let a = samples::dual_numbers(f);
        let om = omega(&a, &stalk(&a, 0));
        assert_eq!(om.complex.dim_at(-1), 1);
        assert_eq!(om.complex.complex.support(), Some((-1, -1)));

        let a = samples::kxy(f);
        let om = omega(&a, &stalk(&a, 0));
        assert_eq!(om.complex.dim_at(-1), 2);

        // over the two-vertex quiver the simple at the arrow's source has a
        // one-dimensional twist, the one at its target has none
        let a = samples::a2(f);
        let om = omega(&a, &stalk(&a, 0));
        assert_eq!(om.complex.dim_at(-1), 1);
        let om = omega(&a, &stalk(&a, 1));
        assert_eq!(om.complex.dim_at(-1), 0);
    }

    #[test]
    fn twist_square_fixes_sign() {
        // Omega(f) . theta_X = theta_Y . f, which pins the Koszul sign in the
        // morphism twist
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for f in [FieldSpec::prime(3), FieldSpec::rationals()] {
            for a in samples::all(f) {
                let bt = crate::bar::bar_complex(&a, 2);
                let x = e_complex(&a, &bt.complex);
                let om = omega(&a, &x);
                let ox = &om.complex;
                let cxy = HomCtx::new(&a, &x, &x, 4);
                let coo = HomCtx::new(&a, ox, ox, 4);
                let cxo = HomCtx::new(&a, &x, ox, 4);
                let th = theta(&cxo, &om);
                for deg in -1..=1i64 {
                    let g = random_element(&cxy, deg, &mut rng);
                    let og = omega_on_morphism(&cxy, &om, &om, &coo, &g);
                    let lhs = compose(&cxo, &coo, &og, &th);
                    let rhs = compose(&cxo, &cxy, &th, &g);
                    assert_eq!(lhs, rhs, "degree {deg}");
                }
            }
        }
    }

    #[test]
    fn twist_is_a_dg_functor() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for f in [FieldSpec::prime(2), FieldSpec::rationals()] {
            for a in samples::all(f) {
                let bt = crate::bar::bar_complex(&a, 2);
                let x = e_complex(&a, &bt.complex);
                let om = omega(&a, &x);
                let ox = &om.complex;
                let cxy = HomCtx::new(&a, &x, &x, 5);
                let coo = HomCtx::new(&a, ox, ox, 5);
                let id = cxy.identity();
                assert_eq!(
                    omega_on_morphism(&cxy, &om, &om, &coo, &id),
                    coo.identity()
                );
                for (dg, dh) in [(0i64, 0i64), (1, -1), (1, 1)] {
                    let g = random_element(&cxy, dg, &mut rng);
                    let h = random_element(&cxy, dh, &mut rng);
                    let og = omega_on_morphism(&cxy, &om, &om, &coo, &g);
                    let oh = omega_on_morphism(&cxy, &om, &om, &coo, &h);
                    let ogh = omega_on_morphism(
                        &cxy,
                        &om,
                        &om,
                        &coo,
                        &compose(&cxy, &cxy, &g, &h),
                    );
                    assert_eq!(ogh, compose(&coo, &coo, &og, &oh));
                    // compatibility with delta
                    let odg = omega_on_morphism(&cxy, &om, &om, &coo, &cxy.delta(&g));
                    assert_eq!(odg, coo.delta(&og));
                }
            }
        }
    }

    #[test]
    fn varsigma_is_a_cochain_map() {
        for f in [FieldSpec::prime(2), FieldSpec::prime(3)] {
            for a in samples::all(f) {
                let x = stalk(&a, 0);
                for p in 1..=2usize {
                    let tower = omega_tower(&a, &x, p);
                    let top = &tower[p - 1].complex;
                    let src = bar_tensor(&a, top, 2);
                    let tgt = bar_tensor(&a, &x, 2 + p);
                    let vs = varsigma(&a, &tower, &src, &tgt);
                    // the splice is a cochain map into the quotient killing
                    // bar degrees below p
                    let (quot, proj) = crate::bar::truncate_at_least(&tgt, p);
                    let comps = vs
                        .comps
                        .iter()
                        .map(|(d, m)| (*d, proj[d].mul(m)))
                        .collect();
                    let reduced = CochainMap {
                        source: src.complex.clone(),
                        target: quot,
                        comps,
                    };
                    reduced.validate().unwrap();
                }
            }
        }
    }

    #[test]
    fn splice_square() {
        for f in [FieldSpec::prime(2), FieldSpec::prime(3)] {
            for a in samples::all(f) {
                let x = stalk(&a, 0);
                for p in 0..=2usize {
                    assert!(
                        omega_bar_square_holds(&a, &x, p, 3),
                        "p = {p}, algebra {:?}",
                        a.labels
                    );
                }
            }
        }
    }
}
