//! modules, bounded complexes, cones and hom complexes, plus the classical
//! oracles everything else is validated against: minimal projective
//! resolutions by iterated covers, Ext groups, injective envelopes,
//! syzygy-based stable homs.

use crate::algebra::Algebra;
use crate::linalg::{cohomology_dims, FieldSpec, Matrix, Scalar, SpanReducer, Subquotient};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum HomalgError {
    #[error("module axiom violated: {0}")]
    ModuleAxiom(String),
    #[error("not a complex: d.d != 0 at degree {0}")]
    NotAComplex(i64),
    #[error("differential at degree {0} is not a module map")]
    NotLinear(i64),
    #[error("not a cochain map at degree {0}")]
    NotCochain(i64),
    #[error("algebra is not self-injective; the syzygy oracle needs that")]
    NotSelfInjective,
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// a finite-dimensional left module, given by one action matrix per algebra
/// basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct Module {
    pub dim: usize,
    pub action: Vec<Matrix>,
}

impl Module {
    pub fn new(alg: &Algebra, action: Vec<Matrix>) -> Result<Module, HomalgError> {
        let dim = if action.is_empty() { 0 } else { action[0].rows };
        let m = Module { dim, action };
        m.validate(alg)?;
        Ok(m)
    }

    pub fn validate(&self, alg: &Algebra) -> Result<(), HomalgError> {
        let f = alg.field;
        if self.action.len() != alg.dim {
            return Err(HomalgError::ModuleAxiom("one action matrix per basis element".into()));
        }
        for a in &self.action {
            if a.rows != self.dim || a.cols != self.dim {
                return Err(HomalgError::ModuleAxiom("action matrix shape".into()));
            }
        }
        // unit acts as identity
        let mut unit = Matrix::zero(self.dim, self.dim, f);
        for (i, c) in alg.unit.iter().enumerate() {
            if !f.is_zero(c) {
                unit = unit.add(&self.action[i].scale(c));
            }
        }
        if unit != Matrix::identity(self.dim, f) {
            return Err(HomalgError::ModuleAxiom("unit does not act as identity".into()));
        }
        // structure constants
        for i in 0..alg.dim {
            for j in 0..alg.dim {
                let lhs = self.action[i].mul(&self.action[j]);
                let mut rhs = Matrix::zero(self.dim, self.dim, f);
                for (k, c) in alg.mul_basis(i, j).iter().enumerate() {
                    if !f.is_zero(c) {
                        rhs = rhs.add(&self.action[k].scale(c));
                    }
                }
                if lhs != rhs {
                    return Err(HomalgError::ModuleAxiom(format!(
                        "action incompatible with {} * {}",
                        alg.labels[i], alg.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn zero(alg: &Algebra) -> Module {
        Module {
            dim: 0,
            action: vec![Matrix::zero(0, 0, alg.field); alg.dim],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    /// action of a general algebra element.
    pub fn act(&self, alg: &Algebra, coeffs: &[Scalar]) -> Matrix {
        let f = alg.field;
        let mut out = Matrix::zero(self.dim, self.dim, f);
        for (i, c) in coeffs.iter().enumerate() {
            if !f.is_zero(c) {
                out = out.add(&self.action[i].scale(c));
            }
        }
        out
    }

    /// action matrix of the idempotent at position `pos`.
    pub fn idem_action(&self, alg: &Algebra, pos: usize) -> &Matrix {
        &self.action[alg.idempotents[pos]]
    }
}

/// the left regular module.
pub fn regular(alg: &Algebra) -> Module {
    Module {
        dim: alg.dim,
        action: (0..alg.dim).map(|i| alg.left_mult_matrix(i)).collect(),
    }
}

/// the simple module at idempotent position i (top of Lambda e_i).
pub fn simple(alg: &Algebra, i: usize) -> Module {
    let f = alg.field;
    let e = alg.idempotents[i];
    let action = (0..alg.dim)
        .map(|b| {
            if b == e {
                Matrix::identity(1, f)
            } else {
                Matrix::zero(1, 1, f)
            }
        })
        .collect();
    Module { dim: 1, action }
}

/// a finite direct sum with its inclusion matrices.
pub fn direct_sum(alg: &Algebra, parts: &[Module]) -> (Module, Vec<Matrix>) {
    let f = alg.field;
    let dim: usize = parts.iter().map(|m| m.dim).sum();
    let mut action = Vec::with_capacity(alg.dim);
    for b in 0..alg.dim {
        let mut m = Matrix::zero(dim, dim, f);
        let mut off = 0;
        for p in parts {
            for i in 0..p.dim {
                for j in 0..p.dim {
                    m.set(off + i, off + j, p.action[b].get(i, j).clone());
                }
            }
            off += p.dim;
        }
        action.push(m);
    }
    let mut inclusions = Vec::new();
    let mut off = 0;
    for p in parts {
        let mut inc = Matrix::zero(dim, p.dim, f);
        for i in 0..p.dim {
            inc.set(off + i, i, f.one());
        }
        inclusions.push(inc);
        off += p.dim;
    }
    (Module { dim, action }, inclusions)
}

/// a free module with generator bookkeeping: a direct sum of Lambda e_g.
#[derive(Clone, Debug)]
pub struct FreeModule {
    /// idempotent position of each generator
    pub gens: Vec<usize>,
    pub module: Module,
    /// basis of the module: (generator, algebra basis index), in order
    pub basis: Vec<(usize, usize)>,
}

/// the indecomposable projective Lambda e_i as a FreeModule on one generator.
fn projective_basis(alg: &Algebra, i: usize) -> Vec<usize> {
    (0..alg.dim).filter(|&b| alg.bidegree[b].1 == i).collect()
}

pub fn free_module(alg: &Algebra, gens: &[usize]) -> FreeModule {
    let f = alg.field;
    let mut basis = Vec::new();
    for (t, &g) in gens.iter().enumerate() {
        for b in projective_basis(alg, g) {
            basis.push((t, b));
        }
    }
    let dim = basis.len();
    let mut action = Vec::with_capacity(alg.dim);
    for a in 0..alg.dim {
        let mut m = Matrix::zero(dim, dim, f);
        for (col, &(t, b)) in basis.iter().enumerate() {
            let prod = alg.mul_basis(a, b);
            for (row, &(t2, b2)) in basis.iter().enumerate() {
                if t2 == t && !f.is_zero(&prod[b2]) {
                    m.set(row, col, prod[b2].clone());
                }
            }
        }
        action.push(m);
    }
    FreeModule {
        gens: gens.to_vec(),
        module: Module { dim, action },
        basis,
    }
}

impl FreeModule {
    /// position of the generator basis vector (t, e_{g_t}).
    pub fn gen_position(&self, alg: &Algebra, t: usize) -> usize {
        let e = alg.idempotents[self.gens[t]];
        self.basis.iter().position(|&(s, b)| s == t && b == e).unwrap()
    }
}

/// the span of J.M, as vectors.
fn radical_span(alg: &Algebra, m: &Module) -> Vec<Vec<Scalar>> {
    let f = alg.field;
    let mut out = Vec::new();
    for &t in &alg.bar_basis {
        for j in 0..m.dim {
            let col = m.action[t].col(j);
            if col.iter().any(|x| !f.is_zero(x)) {
                out.push(col);
            }
        }
    }
    out
}

/// submodule on a spanning set (must be action-invariant): module + inclusion.
pub fn submodule(alg: &Algebra, m: &Module, span: &[Vec<Scalar>]) -> Result<(Module, Matrix), HomalgError> {
    let f = alg.field;
    let mut red = SpanReducer::new(m.dim, f);
    for v in span {
        red.insert(v);
    }
    // deterministic echelon basis: for each pivot p, the span member
    // (unit at p) - (its canonical residue)
    let pivots = red.pivots();
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    for &p in &pivots {
        // the echelon row with pivot p, as a column vector
        let mut v = vec![f.zero(); m.dim];
        v[p] = f.one();
        let residue = red.reduce(&v);
        let mut w = v.clone();
        for (i, r) in residue.iter().enumerate() {
            w[i] = f.sub(&v[i], r);
        }
        basis.push(w);
    }
    let incl = Matrix::from_cols(m.dim, f, &basis);
    let sub_dim = basis.len();
    let mut action = Vec::with_capacity(alg.dim);
    for b in 0..alg.dim {
        let img = m.action[b].mul(&incl);
        let coords = incl.solve(&img).map_err(|_| {
            HomalgError::ModuleAxiom("submodule span is not action-invariant".into())
        })?;
        debug_assert_eq!(coords.rows, sub_dim);
        action.push(coords);
    }
    Ok((Module { dim: sub_dim, action }, incl))
}

/// quotient by an action-invariant span: module + projection.
pub fn quotient(alg: &Algebra, m: &Module, span: &[Vec<Scalar>]) -> Result<(Module, Matrix), HomalgError> {
    let f = alg.field;
    let mut red = SpanReducer::new(m.dim, f);
    for v in span {
        red.insert(v);
    }
    let pivots = red.pivots();
    let rest: Vec<usize> = (0..m.dim).filter(|i| !pivots.contains(i)).collect();
    let q_dim = rest.len();
    // projection: canonical residue restricted to non-pivot coordinates
    let mut proj = Matrix::zero(q_dim, m.dim, f);
    for j in 0..m.dim {
        let mut v = vec![f.zero(); m.dim];
        v[j] = f.one();
        let r = red.reduce(&v);
        for (qi, &i) in rest.iter().enumerate() {
            proj.set(qi, j, r[i].clone());
        }
    }
    // section: unit vectors at the non-pivot coordinates
    let mut sect = Matrix::zero(m.dim, q_dim, f);
    for (qi, &i) in rest.iter().enumerate() {
        sect.set(i, qi, f.one());
    }
    let mut action = Vec::with_capacity(alg.dim);
    for b in 0..alg.dim {
        action.push(proj.mul(&m.action[b]).mul(&sect));
    }
    let q = Module { dim: q_dim, action };
    q.validate(alg)?;
    Ok((q, proj))
}

/// top = M/JM with its projection.
pub fn top(alg: &Algebra, m: &Module) -> Result<(Module, Matrix), HomalgError> {
    quotient(alg, m, &radical_span(alg, m))
}

/// projective cover: a free module surjecting onto M, minimal.
pub fn projective_cover(alg: &Algebra, m: &Module) -> Result<(FreeModule, Matrix), HomalgError> {
    let f = alg.field;
    let (t, proj) = top(alg, m)?;
    // generators: for each idempotent position, a basis of e_i . top,
    // lifted to elements of e_i . M
    let mut gens = Vec::new();
    let mut lifts: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..alg.num_idempotents() {
        let ei_top = t.idem_action(alg, i).column_space_basis();
        for j in 0..ei_top.cols {
            // any preimage, then corner it into e_i M
            let rhs = Matrix::from_cols(t.dim, f, &[ei_top.col(j)]);
            let pre = proj.solve(&rhs)?;
            let v = m.idem_action(alg, i).apply(&pre.col(0));
            gens.push(i);
            lifts.push(v);
        }
    }
    let p = free_module(alg, &gens);
    // cover map: (t, b) -> b . lift_t
    let mut cover = Matrix::zero(m.dim, p.module.dim, f);
    for (col, &(t_, b)) in p.basis.iter().enumerate() {
        let img = m.action[b].apply(&lifts[t_]);
        for (row, x) in img.into_iter().enumerate() {
            cover.set(row, col, x);
        }
    }
    debug_assert_eq!(cover.rank(), m.dim, "cover must be surjective");
    Ok((p, cover))
}

/// minimal projective resolution P_len -> ... -> P_0 -> M.
pub struct Resolution {
    pub steps: Vec<FreeModule>,
    /// maps[i]: P_{i+1} -> P_i
    pub maps: Vec<Matrix>,
    /// P_0 -> M
    pub augmentation: Matrix,
}

pub fn proj_resolution(alg: &Algebra, m: &Module, length: usize) -> Result<Resolution, HomalgError> {
    let (p0, aug) = projective_cover(alg, m)?;
    let mut steps = vec![p0];
    let mut maps = Vec::new();
    let mut current_surj = aug.clone();
    for _ in 0..length {
        let prev = steps.last().unwrap();
        let kernel = current_surj.kernel_basis();
        let span: Vec<Vec<Scalar>> = (0..kernel.cols).map(|j| kernel.col(j)).collect();
        let (k_mod, incl) = submodule(alg, &prev.module, &span)?;
        if k_mod.is_zero() {
            let p_next = free_module(alg, &[]);
            maps.push(Matrix::zero(prev.module.dim, 0, alg.field));
            current_surj = Matrix::zero(0, 0, alg.field);
            steps.push(p_next);
            continue;
        }
        let (p_next, cover) = projective_cover(alg, &k_mod)?;
        maps.push(incl.mul(&cover));
        current_surj = cover;
        steps.push(p_next);
    }
    Ok(Resolution { steps, maps, augmentation: aug })
}

/// hom from a free module: Hom(P, N) = direct sum of e_{g_t} N.
pub struct HomFromFree {
    /// per generator, a basis (columns) of e_{g_t} N in N coordinates
    pub gen_spaces: Vec<Matrix>,
    pub dim: usize,
}

pub fn hom_from_free(alg: &Algebra, p: &FreeModule, n: &Module) -> HomFromFree {
    let gen_spaces: Vec<Matrix> = p
        .gens
        .iter()
        .map(|&g| n.idem_action(alg, g).column_space_basis())
        .collect();
    let dim = gen_spaces.iter().map(|m| m.cols).sum();
    HomFromFree { gen_spaces, dim }
}

impl HomFromFree {
    /// realize a coordinate vector as the full matrix P -> N.
    pub fn to_matrix(&self, alg: &Algebra, p: &FreeModule, n: &Module, coords: &[Scalar]) -> Matrix {
        let f = alg.field;
        let mut out = Matrix::zero(n.dim, p.module.dim, f);
        let mut off = 0;
        for (t, space) in self.gen_spaces.iter().enumerate() {
            let w = space.apply(&coords[off..off + space.cols]);
            off += space.cols;
            for (col, &(t2, b)) in p.basis.iter().enumerate() {
                if t2 != t {
                    continue;
                }
                let img = n.action[b].apply(&w);
                for (row, x) in img.into_iter().enumerate() {
                    if !f.is_zero(&x) {
                        out.add_assign_at(row, col, &x);
                    }
                }
            }
        }
        out
    }

    /// coordinates of a module map P -> N given as a full matrix.
    pub fn from_matrix(&self, alg: &Algebra, p: &FreeModule, mat: &Matrix) -> Result<Vec<Scalar>, HomalgError> {
        let f = alg.field;
        let mut out = Vec::with_capacity(self.dim);
        for (t, space) in self.gen_spaces.iter().enumerate() {
            let pos = p.gen_position(alg, t);
            let w = mat.col(pos);
            let rhs = Matrix::from_cols(mat.rows, f, &[w]);
            let c = space.solve(&rhs)?;
            for i in 0..space.cols {
                out.push(c.get(i, 0).clone());
            }
        }
        Ok(out)
    }
}

/// matrix of Hom(P_a, N) -> Hom(P_b, N), precomposition with d: P_b -> P_a.
pub fn hom_precompose(
    alg: &Algebra,
    pa: &FreeModule,
    pb: &FreeModule,
    d: &Matrix,
    n: &Module,
    ha: &HomFromFree,
    hb: &HomFromFree,
) -> Result<Matrix, HomalgError> {
    let f = alg.field;
    let mut out = Matrix::zero(hb.dim, ha.dim, f);
    for j in 0..ha.dim {
        let mut coords = vec![f.zero(); ha.dim];
        coords[j] = f.one();
        let full = ha.to_matrix(alg, pa, n, &coords);
        let comp = full.mul(d);
        let c = hb.from_matrix(alg, pb, &comp)?;
        for (i, x) in c.into_iter().enumerate() {
            out.set(i, j, x);
        }
    }
    Ok(out)
}

/// dim Ext^deg(M, N) by the minimal-resolution oracle.
pub fn ext_oracle(alg: &Algebra, m: &Module, n: &Module, deg: usize) -> Result<usize, HomalgError> {
    let res = proj_resolution(alg, m, deg + 1)?;
    let homs: Vec<HomFromFree> = res.steps.iter().map(|p| hom_from_free(alg, p, n)).collect();
    let d_out = hom_precompose(
        alg,
        &res.steps[deg],
        &res.steps[deg + 1],
        &res.maps[deg],
        n,
        &homs[deg],
        &homs[deg + 1],
    )?;
    let d_in = if deg == 0 {
        Matrix::zero(homs[0].dim, 0, alg.field)
    } else {
        hom_precompose(
            alg,
            &res.steps[deg - 1],
            &res.steps[deg],
            &res.maps[deg - 1],
            n,
            &homs[deg - 1],
            &homs[deg],
        )?
    };
    Ok(cohomology_dims(&d_in, &d_out)?)
}

/// full space of module maps M -> N as matrices (small modules only).
pub fn hom_module(alg: &Algebra, m: &Module, n: &Module) -> Vec<Matrix> {
    let f = alg.field;
    let unknowns = m.dim * n.dim;
    if unknowns == 0 {
        return Vec::new();
    }
    // constraints: rho_N(b) F - F rho_M(b) = 0 for every basis element
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for b in 0..alg.dim {
        for i in 0..n.dim {
            for j in 0..m.dim {
                let mut row = vec![f.zero(); unknowns];
                // (rho_N(b) F)_{ij} = sum_k rho_N(b)_{ik} F_{kj}
                for k in 0..n.dim {
                    let c = n.action[b].get(i, k);
                    if !f.is_zero(c) {
                        row[k * m.dim + j] = f.add(&row[k * m.dim + j], c);
                    }
                }
                // (F rho_M(b))_{ij} = sum_k F_{ik} rho_M(b)_{kj}
                for k in 0..m.dim {
                    let c = m.action[b].get(k, j);
                    if !f.is_zero(c) {
                        row[i * m.dim + k] = f.sub(&row[i * m.dim + k], c);
                    }
                }
                if row.iter().any(|x| !f.is_zero(x)) {
                    rows.push(row);
                }
            }
        }
    }
    let constraint = if rows.is_empty() {
        Matrix::zero(0, unknowns, f)
    } else {
        Matrix::from_fn(rows.len(), unknowns, f, |i, j| rows[i][j].clone())
    };
    let kernel = constraint.kernel_basis();
    (0..kernel.cols)
        .map(|c| {
            let v = kernel.col(c);
            Matrix::from_fn(n.dim, m.dim, f, |i, j| v[i * m.dim + j].clone())
        })
        .collect()
}

/// the syzygy ker(P(M) -> M).
pub fn syzygy(alg: &Algebra, m: &Module) -> Result<Module, HomalgError> {
    let (p, cover) = projective_cover(alg, m)?;
    let kernel = cover.kernel_basis();
    let span: Vec<Vec<Scalar>> = (0..kernel.cols).map(|j| kernel.col(j)).collect();
    Ok(submodule(alg, &p.module, &span)?.0)
}

/// the indecomposable injective D(e_i Lambda) as a left module.
pub fn injective(alg: &Algebra, i: usize) -> Module {
    let f = alg.field;
    // e_i Lambda has basis the elements with left idempotent e_i
    let basis: Vec<usize> = (0..alg.dim).filter(|&b| alg.bidegree[b].0 == i).collect();
    let dim = basis.len();
    // right multiplication by b on e_i Lambda, then transpose for the dual
    let mut action = Vec::with_capacity(alg.dim);
    for b in 0..alg.dim {
        let mut r = Matrix::zero(dim, dim, f);
        for (col, &x) in basis.iter().enumerate() {
            let prod = alg.mul_basis(x, b);
            for (row, &y) in basis.iter().enumerate() {
                if !f.is_zero(&prod[y]) {
                    r.set(row, col, prod[y].clone());
                }
            }
        }
        // dual action: (b . phi)(m) = phi(m b), so rho_D(b) = R_b^T
        action.push(r.transpose());
    }
    Module { dim, action }
}

/// socle: the subspace killed by the radical.
pub fn socle_basis(alg: &Algebra, m: &Module) -> Matrix {
    let f = alg.field;
    if alg.bar_basis.is_empty() {
        return Matrix::identity(m.dim, f);
    }
    let mut stacked = Matrix::zero(0, m.dim, f);
    for &t in &alg.bar_basis {
        stacked = stacked.vstack(&m.action[t]);
    }
    stacked.kernel_basis()
}

/// injective envelope: the sum of D(e_i Lambda) matching socle multiplicities,
/// with an embedding that is a dual-basis pairing on the socle.
pub fn injective_envelope(alg: &Algebra, m: &Module) -> Result<(Module, Matrix), HomalgError> {
    let f = alg.field;
    let soc = socle_basis(alg, m);
    let mut parts: Vec<Module> = Vec::new();
    let mut functionals: Vec<(usize, Vec<Scalar>)> = Vec::new(); // (idempotent pos, row functional on M)
    for i in 0..alg.num_idempotents() {
        // basis of e_i . soc
        let ei = m.idem_action(alg, i);
        let mut soc_i: Vec<Vec<Scalar>> = Vec::new();
        let mut red = SpanReducer::new(m.dim, f);
        for j in 0..soc.cols {
            let v = ei.apply(&soc.col(j));
            if red.insert(&v) {
                soc_i.push(v);
            }
        }
        if soc_i.is_empty() {
            continue;
        }
        // extend to a basis of e_i M and take the dual rows
        let ei_m = ei.column_space_basis();
        let mut ext = Matrix::from_cols(m.dim, f, &soc_i);
        for j in 0..ei_m.cols {
            let cand = Matrix::from_cols(m.dim, f, &[ei_m.col(j)]);
            if ext.solve(&cand).is_err() {
                ext = ext.hstack(&cand);
            }
        }
        // functionals on M: dual basis on the extended basis of e_i M,
        // anything (zero) outside; rows of a left inverse of `ext` do the job
        let lt_sol = solve_left_inverse(&ext, &Matrix::identity(ext.cols, f))?;
        for (s, _) in soc_i.iter().enumerate() {
            let row: Vec<Scalar> = (0..m.dim).map(|c| lt_sol.get(s, c).clone()).collect();
            functionals.push((i, row));
            parts.push(injective(alg, i));
        }
    }
    let (env, _inclusions) = direct_sum(alg, &parts);
    // embedding: for functional f at idempotent i, component m |-> (x_s |-> f(x_s m))
    let mut emb = Matrix::zero(env.dim, m.dim, f);
    let mut off = 0;
    for ((i, fl), part) in functionals.iter().zip(parts.iter()) {
        let basis: Vec<usize> = (0..alg.dim).filter(|&b| alg.bidegree[b].0 == *i).collect();
        for (s, &x) in basis.iter().enumerate() {
            // row: m-coordinates of f(x . -)
            for c in 0..m.dim {
                let xm = m.action[x].col(c);
                let mut val = f.zero();
                for (ci, fc) in fl.iter().enumerate() {
                    if !f.is_zero(fc) {
                        val = f.add(&val, &f.mul(fc, &xm[ci]));
                    }
                }
                if !f.is_zero(&val) {
                    emb.add_assign_at(off + s, c, &val);
                }
            }
        }
        off += part.dim;
    }
    debug_assert_eq!(emb.rank(), m.dim, "envelope embedding must be injective");
    Ok((env, emb))
}

fn solve_left_inverse(ext: &Matrix, id_k: &Matrix) -> Result<Matrix, HomalgError> {
    // find L with L . ext = I_k, i.e. ext^T . L^T = I_k
    let sol = ext.transpose().solve(&id_k.transpose())?;
    Ok(sol.transpose())
}

/// the cosyzygy coker(M -> I(M)).
pub fn cosyzygy(alg: &Algebra, m: &Module) -> Result<Module, HomalgError> {
    let (env, emb) = injective_envelope(alg, m)?;
    let span: Vec<Vec<Scalar>> = (0..emb.cols).map(|j| emb.col(j)).collect();
    Ok(quotient(alg, &env, &span)?.0)
}

/// true iff Ext^1(S, m) = 0 for every simple S.
pub fn is_injective(alg: &Algebra, m: &Module) -> Result<bool, HomalgError> {
    for i in 0..alg.num_idempotents() {
        let s = simple(alg, i);
        if ext_oracle(alg, &s, m, 1)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_projective(alg: &Algebra, m: &Module) -> Result<bool, HomalgError> {
    Ok(syzygy(alg, m)?.is_zero())
}

/// dim of stable Hom(Omega^deg M, N): syzygy-based oracle, self-injective only.
pub fn stable_hom_oracle(alg: &Algebra, m: &Module, n: &Module, deg: i64) -> Result<usize, HomalgError> {
    if !is_injective(alg, &regular(alg))? {
        return Err(HomalgError::NotSelfInjective);
    }
    let mut cur = m.clone();
    if deg >= 0 {
        for _ in 0..deg {
            cur = syzygy(alg, &cur)?;
        }
    } else {
        for _ in 0..(-deg) {
            cur = cosyzygy(alg, &cur)?;
        }
    }
    stable_hom_dim(alg, &cur, n)
}

/// dim Hom(M,N) modulo maps factoring through projectives.
pub fn stable_hom_dim(alg: &Algebra, m: &Module, n: &Module) -> Result<usize, HomalgError> {
    let f = alg.field;
    if m.is_zero() || n.is_zero() {
        return Ok(0);
    }
    let homs = hom_module(alg, m, n);
    if homs.is_empty() {
        return Ok(0);
    }
    // maps factoring through projectives = image of Hom(M, P(N)) -> Hom(M, N)
    let (p, cover) = projective_cover(alg, n)?;
    let lifts = hom_module(alg, m, &p.module);
    let mut red = SpanReducer::new(m.dim * n.dim, f);
    let flatten = |mat: &Matrix| -> Vec<Scalar> {
        let mut v = Vec::with_capacity(m.dim * n.dim);
        for i in 0..n.dim {
            for j in 0..m.dim {
                v.push(mat.get(i, j).clone());
            }
        }
        v
    };
    for l in &lifts {
        red.insert(&flatten(&cover.mul(l)));
    }
    let factoring_rank = red.rank();
    let mut full = SpanReducer::new(m.dim * n.dim, f);
    for h in &homs {
        full.insert(&flatten(h));
    }
    Ok(full.rank() - factoring_rank)
}

// ---------------------------------------------------------------------------
// bounded complexes

/// a bounded complex of modules; missing degrees are zero.
#[derive(Clone, Debug)]
pub struct Complex {
    pub field: FieldSpec,
    pub components: BTreeMap<i64, Module>,
    /// diff[n]: X^n -> X^{n+1}
    pub diff: BTreeMap<i64, Matrix>,
}

impl Complex {
    pub fn empty(field: FieldSpec) -> Complex {
        Complex {
            field,
            components: BTreeMap::new(),
            diff: BTreeMap::new(),
        }
    }

    pub fn stalk(field: FieldSpec, m: Module, deg: i64) -> Complex {
        let mut c = Complex::empty(field);
        if !m.is_zero() {
            c.components.insert(deg, m);
        }
        c
    }

    pub fn dim_at(&self, n: i64) -> usize {
        self.components.get(&n).map(|m| m.dim).unwrap_or(0)
    }

    pub fn module_at<'a>(&'a self, alg: &Algebra, n: i64) -> Module {
        self.components.get(&n).cloned().unwrap_or_else(|| Module::zero(alg))
    }

    pub fn diff_at(&self, n: i64) -> Matrix {
        self.diff
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.dim_at(n + 1), self.dim_at(n), self.field))
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = self.components.keys().next()?;
        let hi = self.components.keys().last()?;
        Some((*lo, *hi))
    }

    pub fn validate(&self, alg: &Algebra) -> Result<(), HomalgError> {
        for (n, m) in &self.components {
            m.validate(alg).map_err(|_| HomalgError::NotLinear(*n))?;
        }
        if let Some((lo, hi)) = self.support() {
            for n in lo..=hi {
                let d = self.diff_at(n);
                let d2 = self.diff_at(n + 1).mul(&d);
                if !d2.is_zero() {
                    return Err(HomalgError::NotAComplex(n));
                }
                // module map check
                let src = self.module_at(alg, n);
                let tgt = self.module_at(alg, n + 1);
                for b in 0..alg.dim {
                    if d.mul(&src.action[b]) != tgt.action[b].mul(&d) {
                        return Err(HomalgError::NotLinear(n));
                    }
                }
            }
        }
        Ok(())
    }

    /// suspended complex: Sigma(X)^n = X^{n+1}, d = -d.
    pub fn shift(&self) -> Complex {
        let mut c = Complex::empty(self.field);
        for (n, m) in &self.components {
            c.components.insert(n - 1, m.clone());
        }
        for (n, d) in &self.diff {
            c.diff.insert(n - 1, d.neg());
        }
        c
    }

    pub fn shift_by(&self, k: i64) -> Complex {
        let mut c = self.clone();
        for _ in 0..k.abs() {
            c = if k > 0 { c.shift() } else { c.unshift() };
        }
        c
    }

    fn unshift(&self) -> Complex {
        let mut c = Complex::empty(self.field);
        for (n, m) in &self.components {
            c.components.insert(n + 1, m.clone());
        }
        for (n, d) in &self.diff {
            c.diff.insert(n + 1, d.neg());
        }
        c
    }

    pub fn cohomology_dim(&self, n: i64) -> Result<usize, HomalgError> {
        Ok(cohomology_dims(&self.diff_at(n - 1), &self.diff_at(n))?)
    }

    pub fn cohomology(&self, n: i64) -> Result<Subquotient, HomalgError> {
        Ok(Subquotient::cohomology(&self.diff_at(n - 1), &self.diff_at(n))?)
    }

    pub fn is_acyclic_on(&self, lo: i64, hi: i64) -> Result<bool, HomalgError> {
        for n in lo..=hi {
            if self.cohomology_dim(n)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// a degreewise map of complexes.
#[derive(Clone, Debug)]
pub struct CochainMap {
    pub source: Complex,
    pub target: Complex,
    pub comps: BTreeMap<i64, Matrix>,
}

impl CochainMap {
    pub fn comp_at(&self, n: i64) -> Matrix {
        self.comps
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.target.dim_at(n), self.source.dim_at(n), self.source.field))
    }

    pub fn validate(&self) -> Result<(), HomalgError> {
        let lo = self
            .source
            .support()
            .iter()
            .chain(self.target.support().iter())
            .map(|s| s.0)
            .min();
        let hi = self
            .source
            .support()
            .iter()
            .chain(self.target.support().iter())
            .map(|s| s.1)
            .max();
        let (Some(lo), Some(hi)) = (lo, hi) else { return Ok(()) };
        for n in lo..=hi {
            let lhs = self.comp_at(n + 1).mul(&self.source.diff_at(n));
            let rhs = self.target.diff_at(n).mul(&self.comp_at(n));
            if lhs != rhs {
                return Err(HomalgError::NotCochain(n));
            }
        }
        Ok(())
    }
}

/// mapping cone: Cone(f)^n = Y^n + X^{n+1}, block differential.
pub fn cone(alg: &Algebra, f: &CochainMap) -> Complex {
    let fld = f.source.field;
    let mut c = Complex::empty(fld);
    let lo = f
        .source
        .support()
        .iter()
        .chain(f.target.support().iter())
        .map(|s| s.0)
        .min()
        .unwrap_or(0)
        - 1;
    let hi = f
        .source
        .support()
        .iter()
        .chain(f.target.support().iter())
        .map(|s| s.1)
        .max()
        .unwrap_or(0);
    for n in lo..=hi {
        let y = f.target.module_at(alg, n);
        let x1 = f.source.module_at(alg, n + 1);
        if y.dim + x1.dim == 0 {
            continue;
        }
        let (sum, _) = direct_sum(alg, &[y, x1]);
        c.components.insert(n, sum);
    }
    for n in lo..=hi {
        let rows = c.dim_at(n + 1);
        let cols = c.dim_at(n);
        if rows == 0 || cols == 0 {
            continue;
        }
        let dy = f.target.diff_at(n);
        let dx = f.source.diff_at(n + 1);
        let fc = f.comp_at(n + 1);
        let y_dim = f.target.dim_at(n);
        let y1_dim = f.target.dim_at(n + 1);
        let mut d = Matrix::zero(rows, cols, fld);
        for i in 0..dy.rows {
            for j in 0..dy.cols {
                d.set(i, j, dy.get(i, j).clone());
            }
        }
        for i in 0..fc.rows {
            for j in 0..fc.cols {
                d.set(i, y_dim + j, fc.get(i, j).clone());
            }
        }
        for i in 0..dx.rows {
            for j in 0..dx.cols {
                d.set(y1_dim + i, y_dim + j, fld.neg(dx.get(i, j)));
            }
        }
        c.diff.insert(n, d);
    }
    c
}

/// H^n(Cone(f)) = 0 for all n in [lo, hi]?
pub fn quasi_iso_window(alg: &Algebra, f: &CochainMap, lo: i64, hi: i64) -> Result<bool, HomalgError> {
    let c = cone(alg, f);
    c.is_acyclic_on(lo, hi)
}

/// the complex of graded module maps Hom(X, Y) with its basis of block maps.
pub struct HomComplexBasis {
    /// per degree n: list of elements, each a map m -> matrix X^m -> Y^{m+n}
    pub degrees: BTreeMap<i64, Vec<BTreeMap<i64, Matrix>>>,
    pub complex: crate::yoneda::VComplex,
}

/// hom_complex(X, Y): degree-n component = all graded Lambda-maps of degree n.
pub fn hom_complex(alg: &Algebra, x: &Complex, y: &Complex) -> Result<HomComplexBasis, HomalgError> {
    let f = x.field;
    let (Some((xlo, xhi)), Some((ylo, yhi))) = (x.support(), y.support()) else {
        return Ok(HomComplexBasis {
            degrees: BTreeMap::new(),
            complex: crate::yoneda::VComplex::empty(f),
        });
    };
    let nlo = ylo - xhi;
    let nhi = yhi - xlo;
    let mut degrees: BTreeMap<i64, Vec<BTreeMap<i64, Matrix>>> = BTreeMap::new();
    for n in nlo..=nhi {
        let mut elems = Vec::new();
        for m in xlo..=xhi {
            let xm = x.module_at(alg, m);
            let ym = y.module_at(alg, m + n);
            if xm.dim == 0 || ym.dim == 0 {
                continue;
            }
            for h in hom_module(alg, &xm, &ym) {
                let mut e = BTreeMap::new();
                e.insert(m, h);
                elems.push(e);
            }
        }
        degrees.insert(n, elems);
    }
    // coordinates of an arbitrary graded map in the chosen basis
    let coords_of = |n: i64, elem: &BTreeMap<i64, Matrix>| -> Vec<Scalar> {
        let basis = &degrees[&n];
        let total: usize = basis.len();
        let mut out = vec![f.zero(); total];
        // flatten per degree and solve against the block basis
        for m in xlo..=xhi {
            let xm_dim = x.dim_at(m);
            let ym_dim = y.dim_at(m + n);
            if xm_dim == 0 || ym_dim == 0 {
                continue;
            }
            let zero_blk = Matrix::zero(ym_dim, xm_dim, f);
            let target = elem.get(&m).unwrap_or(&zero_blk);
            // basis elements supported at m
            let idxs: Vec<usize> = basis
                .iter()
                .enumerate()
                .filter(|(_, b)| b.contains_key(&m))
                .map(|(i, _)| i)
                .collect();
            if idxs.is_empty() {
                assert!(target.is_zero(), "map outside the hom space");
                continue;
            }
            let flat = |mat: &Matrix| -> Vec<Scalar> {
                let mut v = Vec::new();
                for i in 0..mat.rows {
                    for j in 0..mat.cols {
                        v.push(mat.get(i, j).clone());
                    }
                }
                v
            };
            let cols: Vec<Vec<Scalar>> = idxs.iter().map(|&i| flat(&basis[i][&m])).collect();
            let bmat = Matrix::from_cols(ym_dim * xm_dim, f, &cols);
            let rhs = Matrix::from_cols(ym_dim * xm_dim, f, &[flat(target)]);
            let sol = bmat.solve(&rhs).expect("map inside the hom space");
            for (k, &i) in idxs.iter().enumerate() {
                out[i] = sol.get(k, 0).clone();
            }
        }
        out
    };
    // differential d(f) = d_Y . f - (-1)^n f . d_X
    let mut vdims = BTreeMap::new();
    let mut vdiff = BTreeMap::new();
    for (n, elems) in &degrees {
        vdims.insert(*n, elems.len());
    }
    for n in nlo..=nhi {
        let elems = &degrees[&n];
        let next_count = degrees.get(&(n + 1)).map(|e| e.len()).unwrap_or(0);
        let mut dmat = Matrix::zero(next_count, elems.len(), f);
        for (j, e) in elems.iter().enumerate() {
            let mut img: BTreeMap<i64, Matrix> = BTreeMap::new();
            for (m, blk) in e {
                // d_Y component: X^m -> Y^{m+n} -> Y^{m+n+1}
                let dy = y.diff_at(m + n).mul(blk);
                if !dy.is_zero() {
                    let entry = img.entry(*m).or_insert_with(|| Matrix::zero(y.dim_at(m + n + 1), x.dim_at(*m), f));
                    *entry = entry.add(&dy);
                }
                // f d_X component: X^{m-1} -> X^m -> Y^{m+n}
                let fdx = blk.mul(&x.diff_at(m - 1));
                if !fdx.is_zero() {
                    let signed = if n.rem_euclid(2) == 0 { fdx.neg() } else { fdx };
                    let entry = img
                        .entry(m - 1)
                        .or_insert_with(|| Matrix::zero(y.dim_at(m + n), x.dim_at(m - 1), f));
                    *entry = entry.add(&signed);
                }
            }
            if degrees.contains_key(&(n + 1)) {
                let coords = coords_of(n + 1, &img);
                for (i, c) in coords.into_iter().enumerate() {
                    dmat.set(i, j, c);
                }
            }
        }
        vdiff.insert(n, dmat);
    }
    Ok(HomComplexBasis {
        degrees,
        complex: crate::yoneda::VComplex { field: f, dims: vdims, diff: vdiff },
    })
}

// ---------------------------------------------------------------------------
// E-adapted bases: coordinates in which every basis vector lies in one e_i M

/// a basis of a module adapted to the idempotent decomposition M = + e_i M.
#[derive(Clone, Debug)]
pub struct EBasis {
    /// idempotent position of each adapted basis vector
    pub idem: Vec<usize>,
    /// columns: adapted basis in native coordinates
    pub to_native: Matrix,
    pub from_native: Matrix,
}

pub fn e_basis(alg: &Algebra, m: &Module) -> EBasis {
    let f = alg.field;
    // prefer the native basis when it is already adapted
    let mut native_idem = Vec::with_capacity(m.dim);
    let mut adapted = true;
    'outer: for j in 0..m.dim {
        for i in 0..alg.num_idempotents() {
            let col = m.idem_action(alg, i).col(j);
            let is_self = col
                .iter()
                .enumerate()
                .all(|(k, x)| if k == j { *x == f.one() } else { f.is_zero(x) });
            if is_self {
                native_idem.push(i);
                continue 'outer;
            }
        }
        adapted = false;
        break;
    }
    if adapted {
        return EBasis {
            idem: native_idem,
            to_native: Matrix::identity(m.dim, f),
            from_native: Matrix::identity(m.dim, f),
        };
    }
    let mut idem = Vec::new();
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..alg.num_idempotents() {
        let basis = m.idem_action(alg, i).column_space_basis();
        for j in 0..basis.cols {
            idem.push(i);
            cols.push(basis.col(j));
        }
    }
    let to_native = Matrix::from_cols(m.dim, f, &cols);
    assert_eq!(to_native.cols, m.dim, "module does not decompose over E");
    let from_native = to_native.solve(&Matrix::identity(m.dim, f)).expect("basis invertible");
    EBasis { idem, to_native, from_native }
}

/// a bounded complex together with E-adapted bases and cached translations.
#[derive(Clone, Debug)]
pub struct EComplex {
    pub complex: Complex,
    pub ebases: BTreeMap<i64, EBasis>,
    /// per degree, the differential in adapted coordinates
    pub ediff: BTreeMap<i64, Matrix>,
    /// per degree, each algebra basis element's action in adapted coordinates
    pub eaction: BTreeMap<i64, Vec<Matrix>>,
}

pub fn e_complex(alg: &Algebra, c: &Complex) -> EComplex {
    let mut ebases = BTreeMap::new();
    let mut ediff = BTreeMap::new();
    let mut eaction = BTreeMap::new();
    for (n, m) in &c.components {
        ebases.insert(*n, e_basis(alg, m));
    }
    for (n, m) in &c.components {
        let eb = &ebases[n];
        let acts = (0..alg.dim)
            .map(|b| eb.from_native.mul(&m.action[b]).mul(&eb.to_native))
            .collect();
        eaction.insert(*n, acts);
        if let Some(next) = ebases.get(&(n + 1)) {
            ediff.insert(*n, next.from_native.mul(&c.diff_at(*n)).mul(&eb.to_native));
        }
    }
    EComplex { complex: c.clone(), ebases, ediff, eaction }
}

impl EComplex {
    pub fn dim_at(&self, n: i64) -> usize {
        self.complex.dim_at(n)
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        self.complex.support()
    }

    /// idempotent position of the k-th adapted basis vector in degree n.
    pub fn idem_of(&self, n: i64, k: usize) -> usize {
        self.ebases[&n].idem[k]
    }

    /// differential in adapted coordinates.
    pub fn ediff_at(&self, n: i64) -> Matrix {
        self.ediff
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.dim_at(n + 1), self.dim_at(n), self.complex.field))
    }

    /// action of algebra basis element b in adapted coordinates at degree n.
    pub fn eact(&self, n: i64, b: usize) -> Option<&Matrix> {
        self.eaction.get(&n).map(|v| &v[b])
    }
}
