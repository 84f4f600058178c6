//! finite-dimensional algebras presented by structure constants over a split
//! semisimple subalgebra E spanned by orthogonal idempotents.
//!
//! the non-idempotent basis elements are required to be bidegree-homogeneous
//! (e_i b e_j = b for a unique pair), so their span is an E-subbimodule
//! complement of E and its image is a basis of the quotient bimodule
//! "Lbar" = Lambda/E.  all tensor and hom bookkeeping over E downstream is
//! done through these bidegrees.

use crate::linalg::{FieldSpec, Matrix, Scalar, SpanReducer};
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("associativity fails at basis triple ({0}, {1}, {2})")]
    Associativity(String, String, String),
    #[error("unit law fails at basis element {0}")]
    Unit(String),
    #[error("idempotent axiom fails: {0}")]
    Idempotent(String),
    #[error("basis element {0} is not E-bidegree homogeneous")]
    Bidegree(String),
    #[error("the non-idempotent span is not a nilpotent ideal: {0}")]
    NotNilpotent(String),
    #[error("quiver error: {0}")]
    Quiver(String),
}

/// a finite-dimensional algebra with a distinguished split semisimple
/// subalgebra E = span of orthogonal idempotents summing to 1.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub field: FieldSpec,
    pub dim: usize,
    pub labels: Vec<String>,
    /// mult[i][j] = coordinates of b_i . b_j
    mult: Vec<Vec<Vec<Scalar>>>,
    pub unit: Vec<Scalar>,
    /// basis indices of e_1 .. e_r
    pub idempotents: Vec<usize>,
    /// per basis element (l, r) as positions into `idempotents`: e_l b e_r = b
    pub bidegree: Vec<(usize, usize)>,
    /// basis indices of the non-idempotent complement (a basis of Lbar)
    pub bar_basis: Vec<usize>,
    bar_pos: Vec<Option<usize>>,
}

impl Algebra {
    /// position of a basis element inside `bar_basis`, if it lies in Lbar.
    pub fn bar_index_of(&self, t: usize) -> Option<usize> {
        self.bar_pos[t]
    }

    pub fn new(
        field: FieldSpec,
        labels: Vec<String>,
        mult: Vec<Vec<Vec<Scalar>>>,
        idempotents: Vec<usize>,
    ) -> Result<Algebra, AlgebraError> {
        let dim = labels.len();
        assert_eq!(mult.len(), dim);
        for row in &mult {
            assert_eq!(row.len(), dim);
            for v in row {
                assert_eq!(v.len(), dim);
            }
        }
        let mul = |a: &[Scalar], b: &[Scalar]| -> Vec<Scalar> {
            let mut out = vec![field.zero(); dim];
            for (i, x) in a.iter().enumerate() {
                if field.is_zero(x) {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    if field.is_zero(y) {
                        continue;
                    }
                    let c = field.mul(x, y);
                    for (k, m) in mult[i][j].iter().enumerate() {
                        if !field.is_zero(m) {
                            out[k] = field.add(&out[k], &field.mul(&c, m));
                        }
                    }
                }
            }
            out
        };
        let basis_vec = |i: usize| -> Vec<Scalar> {
            let mut v = vec![field.zero(); dim];
            v[i] = field.one();
            v
        };

        // orthogonal idempotents
        for (a, &i) in idempotents.iter().enumerate() {
            for (b, &j) in idempotents.iter().enumerate() {
                let prod = mul(&basis_vec(i), &basis_vec(j));
                let expect = if a == b { basis_vec(i) } else { vec![field.zero(); dim] };
                if prod != expect {
                    return Err(AlgebraError::Idempotent(format!(
                        "{} * {} is not {}",
                        labels[i],
                        labels[j],
                        if a == b { &labels[i] } else { "0" }
                    )));
                }
            }
        }

        // unit = sum of idempotents
        let mut unit = vec![field.zero(); dim];
        for &i in &idempotents {
            unit[i] = field.one();
        }
        for t in 0..dim {
            let b = basis_vec(t);
            if mul(&unit, &b) != b || mul(&b, &unit) != b {
                return Err(AlgebraError::Unit(labels[t].clone()));
            }
        }

        // associativity on all basis triples
        for i in 0..dim {
            for j in 0..dim {
                let ij = mul(&basis_vec(i), &basis_vec(j));
                for k in 0..dim {
                    let left = mul(&ij, &basis_vec(k));
                    let right = mul(&basis_vec(i), &mul(&basis_vec(j), &basis_vec(k)));
                    if left != right {
                        return Err(AlgebraError::Associativity(
                            labels[i].clone(),
                            labels[j].clone(),
                            labels[k].clone(),
                        ));
                    }
                }
            }
        }

        // bidegrees: e_l b e_r = b for exactly one pair, all other corners zero
        let mut bidegree = vec![(0usize, 0usize); dim];
        let mut bar_basis = Vec::new();
        let mut bar_pos = vec![None; dim];
        for t in 0..dim {
            if let Some(pos) = idempotents.iter().position(|&i| i == t) {
                bidegree[t] = (pos, pos);
                continue;
            }
            let b = basis_vec(t);
            let mut home = None;
            for (li, &l) in idempotents.iter().enumerate() {
                for (ri, &r) in idempotents.iter().enumerate() {
                    let corner = mul(&basis_vec(l), &mul(&b, &basis_vec(r)));
                    if corner == b {
                        if home.is_some() {
                            return Err(AlgebraError::Bidegree(labels[t].clone()));
                        }
                        home = Some((li, ri));
                    } else if corner.iter().any(|x| !field.is_zero(x)) {
                        return Err(AlgebraError::Bidegree(labels[t].clone()));
                    }
                }
            }
            let Some(hm) = home else {
                return Err(AlgebraError::Bidegree(labels[t].clone()));
            };
            bidegree[t] = hm;
            bar_pos[t] = Some(bar_basis.len());
            bar_basis.push(t);
        }

        Ok(Algebra {
            field,
            dim,
            labels,
            mult,
            unit,
            idempotents,
            bidegree,
            bar_basis,
            bar_pos,
        })
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i] = self.field.one();
        v
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &[Scalar] {
        &self.mult[i][j]
    }

    pub fn mul_elems(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.dim];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if f.is_zero(y) {
                    continue;
                }
                let c = f.mul(x, y);
                for (k, m) in self.mult[i][j].iter().enumerate() {
                    if !f.is_zero(m) {
                        out[k] = f.add(&out[k], &f.mul(&c, m));
                    }
                }
            }
        }
        out
    }

    /// matrix of left multiplication by b_i on the regular module.
    pub fn left_mult_matrix(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, self.field, |k, j| self.mult[i][j][k].clone())
    }

    pub fn right_mult_matrix(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, self.field, |k, j| self.mult[j][i][k].clone())
    }

    pub fn num_idempotents(&self) -> usize {
        self.idempotents.len()
    }

    pub fn bar_dim(&self) -> usize {
        self.bar_basis.len()
    }

    /// bidegree of a bar-basis element, as positions into `idempotents`.
    pub fn bar_bidegree(&self, bi: usize) -> (usize, usize) {
        self.bidegree[self.bar_basis[bi]]
    }

    pub fn bar_label(&self, bi: usize) -> &str {
        &self.labels[self.bar_basis[bi]]
    }

    /// image of a full coordinate vector in Lbar = Lambda/E.
    pub fn project_to_bar(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.bar_basis.iter().map(|&t| v[t].clone()).collect()
    }

    /// product of two bar-basis elements, projected back to Lbar.
    pub fn bar_mul(&self, b1: usize, b2: usize) -> Vec<Scalar> {
        self.project_to_bar(self.mul_basis(self.bar_basis[b1], self.bar_basis[b2]))
    }

    /// composable p-tuples of bar-basis elements (r of each = l of the next),
    /// lexicographically ordered; p >= 1.
    pub fn bar_tuples(&self, p: usize) -> Vec<Vec<usize>> {
        assert!(p >= 1);
        let mut tuples: Vec<Vec<usize>> = (0..self.bar_dim()).map(|b| vec![b]).collect();
        for _ in 1..p {
            let mut next = Vec::new();
            for t in &tuples {
                let (_, r) = self.bar_bidegree(*t.last().unwrap());
                for b in 0..self.bar_dim() {
                    if self.bar_bidegree(b).0 == r {
                        let mut t2 = t.clone();
                        t2.push(b);
                        next.push(t2);
                    }
                }
            }
            tuples = next;
        }
        tuples
    }

    /// labels of a basis of Lbar^{tensor p over E}; p = 0 gives E itself.
    pub fn barlambda_tensor_power(&self, p: usize) -> Vec<String> {
        if p == 0 {
            return self.idempotents.iter().map(|&i| self.labels[i].clone()).collect();
        }
        self.bar_tuples(p)
            .iter()
            .map(|t| t.iter().map(|&b| self.bar_label(b)).collect::<Vec<_>>().join("|"))
            .collect()
    }

    /// the radical as the span of the non-idempotent basis, verified to be a
    /// nilpotent two-sided ideal; errors if the presented basis is not
    /// adapted this way.
    pub fn radical(&self) -> Result<Vec<usize>, AlgebraError> {
        let f = self.field;
        // two-sided ideal: products with the whole basis stay in the span
        for &t in &self.bar_basis {
            for j in 0..self.dim {
                for prod in [self.mul_basis(t, j), self.mul_basis(j, t)] {
                    for &e in &self.idempotents {
                        if !f.is_zero(&prod[e]) {
                            return Err(AlgebraError::NotNilpotent(format!(
                                "product involving {} has a component on {}",
                                self.labels[t], self.labels[e]
                            )));
                        }
                    }
                }
            }
        }
        // nilpotency: powers of the span must shrink to zero
        let mut layer: Vec<Vec<Scalar>> = self.bar_basis.iter().map(|&t| self.basis_vec(t)).collect();
        for _ in 0..=self.dim {
            if layer.is_empty() {
                return Ok(self.bar_basis.clone());
            }
            let mut red = SpanReducer::new(self.dim, f);
            let mut next = Vec::new();
            for v in &layer {
                for &t in &self.bar_basis {
                    let prod = self.mul_elems(v, &self.basis_vec(t));
                    if red.insert(&prod) {
                        next.push(prod);
                    }
                }
            }
            layer = next;
        }
        Err(AlgebraError::NotNilpotent("radical powers do not vanish".into()))
    }
}

/// a quiver with relations, to be collapsed to a based algebra.
#[derive(Clone, Debug)]
pub struct QuiverPresentation {
    pub field: FieldSpec,
    pub vertices: Vec<String>,
    /// (label, source vertex, target vertex)
    pub arrows: Vec<(String, usize, usize)>,
    /// each relation: sum of coeff * path, paths as arrow index sequences in
    /// traversal order
    pub relations: Vec<Vec<(Scalar, Vec<usize>)>>,
    pub max_len: usize,
}

fn path_src(q: &QuiverPresentation, p: &[usize]) -> usize {
    q.arrows[p[0]].1
}

fn path_tgt(q: &QuiverPresentation, p: &[usize]) -> usize {
    q.arrows[*p.last().unwrap()].2
}

fn path_composable(q: &QuiverPresentation, a: &[usize], b: &[usize]) -> bool {
    path_tgt(q, a) == path_src(q, b)
}

pub fn quiver_to_algebra(q: &QuiverPresentation) -> Result<Algebra, AlgebraError> {
    let f = q.field;
    let nv = q.vertices.len();
    if nv == 0 {
        return Err(AlgebraError::Quiver("no vertices".into()));
    }
    for rel in &q.relations {
        if rel.is_empty() {
            return Err(AlgebraError::Quiver("empty relation".into()));
        }
        for (_, p) in rel {
            if p.len() < 2 {
                return Err(AlgebraError::Quiver(
                    "relation touches a path of length < 2 (ideal not admissible)".into(),
                ));
            }
        }
        let (s, t) = (path_src(q, &rel[0].1), path_tgt(q, &rel[0].1));
        for (_, p) in rel {
            if path_src(q, p) != s || path_tgt(q, p) != t {
                return Err(AlgebraError::Quiver("relation mixes sources or targets".into()));
            }
        }
    }

    // paths of length 1..=max_len, ordered by length then lexicographically
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut by_len: Vec<Vec<usize>> = vec![Vec::new()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut frontier: Vec<Vec<usize>> = (0..q.arrows.len()).map(|a| vec![a]).collect();
    for _len in 1..=q.max_len {
        let mut layer_ids = Vec::new();
        for p in &frontier {
            index.insert(p.clone(), paths.len());
            layer_ids.push(paths.len());
            paths.push(p.clone());
        }
        by_len.push(layer_ids);
        let mut next = Vec::new();
        for p in &frontier {
            for a in 0..q.arrows.len() {
                if q.arrows[a].1 == path_tgt(q, p) {
                    let mut p2 = p.clone();
                    p2.push(a);
                    next.push(p2);
                }
            }
        }
        frontier = next;
    }
    let npaths = paths.len();

    // the ideal generated by the relations, inside the span of paths
    let mut ideal = SpanReducer::new(npaths, f);
    for rel in &q.relations {
        let (s, t) = (path_src(q, &rel[0].1), path_tgt(q, &rel[0].1));
        let rel_len_max = rel.iter().map(|(_, p)| p.len()).max().unwrap();
        // pad with all path (or trivial) factors u . rel . v, traversal order u, rel, v
        let mut lefts: Vec<Vec<usize>> = vec![vec![]];
        let mut rights: Vec<Vec<usize>> = vec![vec![]];
        for p in &paths {
            if path_tgt(q, p) == s {
                lefts.push(p.clone());
            }
            if path_src(q, p) == t {
                rights.push(p.clone());
            }
        }
        for u in &lefts {
            for v in &rights {
                if u.len() + rel_len_max + v.len() > q.max_len {
                    continue;
                }
                let mut vecf = vec![f.zero(); npaths];
                let mut fits = true;
                for (c, p) in rel {
                    let mut full = u.clone();
                    full.extend_from_slice(p);
                    full.extend_from_slice(v);
                    match index.get(&full) {
                        Some(&i) => vecf[i] = f.add(&vecf[i], c),
                        None => {
                            fits = false;
                            break;
                        }
                    }
                }
                if fits {
                    ideal.insert(&vecf);
                }
            }
        }
    }

    // finite-dimensionality within the bound: all longest paths must die
    for &pid in &by_len[q.max_len] {
        let mut v = vec![f.zero(); npaths];
        v[pid] = f.one();
        if !ideal.contains(&v) {
            return Err(AlgebraError::Quiver(format!(
                "path of length {} survives the relations; dimension not finite within the bound",
                q.max_len
            )));
        }
    }

    // quotient basis: paths whose residue is themselves nonzero after reduction
    let mut basis_paths = Vec::new();
    for (pid, _) in paths.iter().enumerate() {
        let mut v = vec![f.zero(); npaths];
        v[pid] = f.one();
        let r = ideal.reduce(&v);
        if !f.is_zero(&r[pid]) {
            basis_paths.push(pid);
        }
    }
    let coord_of = |pid: usize| -> Option<usize> { basis_paths.iter().position(|&b| b == pid) };

    let dim = nv + basis_paths.len();
    let mut labels: Vec<String> = q.vertices.clone();
    for &pid in &basis_paths {
        labels.push(
            paths[pid]
                .iter()
                .map(|&a| q.arrows[a].0.clone())
                .collect::<Vec<_>>()
                .join("*"),
        );
    }

    // residue of a path vector expressed in the quotient basis
    let residue_coords = |v: &[Scalar]| -> Result<Vec<Scalar>, AlgebraError> {
        let r = ideal.reduce(v);
        let mut out = vec![f.zero(); basis_paths.len()];
        for (pid, c) in r.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            match coord_of(pid) {
                Some(k) => out[k] = c.clone(),
                None => {
                    return Err(AlgebraError::Quiver(
                        "internal: residue not supported on the quotient basis".into(),
                    ))
                }
            }
        }
        Ok(out)
    };

    // structure constants; algebra product x.y = traversal "y then x"
    let zero = || vec![f.zero(); dim];
    let mut mult = vec![vec![zero(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut out = zero();
            if i < nv && j < nv {
                if i == j {
                    out[i] = f.one();
                }
            } else if i < nv {
                // e_i . path_j
                let pid = basis_paths[j - nv];
                if path_tgt(q, &paths[pid]) == i {
                    out[j] = f.one();
                }
            } else if j < nv {
                let pid = basis_paths[i - nv];
                if path_src(q, &paths[pid]) == j {
                    out[i] = f.one();
                }
            } else {
                let pi = &paths[basis_paths[i - nv]];
                let pj = &paths[basis_paths[j - nv]];
                if path_composable(q, pj, pi) {
                    let mut concat = pj.clone();
                    concat.extend_from_slice(pi);
                    if concat.len() <= q.max_len {
                        let mut v = vec![f.zero(); npaths];
                        v[*index.get(&concat).unwrap()] = f.one();
                        let rc = residue_coords(&v)?;
                        for (k, c) in rc.into_iter().enumerate() {
                            out[nv + k] = c;
                        }
                    }
                    // longer concatenations contain a dead length-max_len subpath
                }
            }
            mult[i][j] = out;
        }
    }

    Algebra::new(f, labels, mult, (0..nv).collect())
}

// ---------------------------------------------------------------------------
// structured-text ingestion

fn parse_scalar(field: FieldSpec, s: &str) -> Result<Scalar, AlgebraError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| AlgebraError::Parse(format!("bad scalar {s}")))?;
        let d: i64 = d.trim().parse().map_err(|_| AlgebraError::Parse(format!("bad scalar {s}")))?;
        if d == 0 {
            return Err(AlgebraError::Parse("zero denominator".into()));
        }
        let dn = field.from_int(d);
        if field.is_zero(&dn) {
            return Err(AlgebraError::Parse(format!("denominator {d} vanishes in the field")));
        }
        Ok(field.mul(&field.from_int(n), &field.inv(&dn)))
    } else {
        let n: i64 = s.parse().map_err(|_| AlgebraError::Parse(format!("bad scalar {s}")))?;
        Ok(field.from_int(n))
    }
}

/// a linear combination like "x + 2*y - x2" over named generators.
fn parse_combination(
    field: FieldSpec,
    expr: &str,
    resolve: &dyn Fn(&str) -> Option<usize>,
    dim: usize,
) -> Result<Vec<Scalar>, AlgebraError> {
    let mut out = vec![field.zero(); dim];
    let expr = expr.trim();
    if expr == "0" {
        return Ok(out);
    }
    // split into signed terms
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    for ch in expr.chars() {
        match ch {
            '+' | '-' => {
                if !cur.trim().is_empty() {
                    terms.push((sign, cur.trim().to_string()));
                }
                sign = if ch == '-' { -1 } else { 1 };
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign, cur.trim().to_string()));
    }
    if terms.is_empty() {
        return Err(AlgebraError::Parse(format!("empty expression: {expr}")));
    }
    for (sg, term) in terms {
        let (coeff, name) = match term.rsplit_once('*') {
            Some((c, n)) if c.trim().parse::<i64>().is_ok() || c.contains('/') => {
                (parse_scalar(field, c)?, n.trim().to_string())
            }
            _ => (field.one(), term.clone()),
        };
        let coeff = if sg < 0 { field.neg(&coeff) } else { coeff };
        let Some(idx) = resolve(&name) else {
            return Err(AlgebraError::Parse(format!("unknown element {name}")));
        };
        out[idx] = field.add(&out[idx], &coeff);
    }
    Ok(out)
}

/// the sectioned text document: [field], [basis], [structure] or [quiver].
pub struct Document {
    pub sections: Vec<(String, Vec<String>)>,
}

pub fn parse_document(src: &str) -> Result<Document, AlgebraError> {
    let mut sections: Vec<(String, Vec<String>)> = Vec::new();
    for raw in src.lines() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            sections.push((line[1..line.len() - 1].trim().to_string(), Vec::new()));
        } else {
            match sections.last_mut() {
                Some((_, lines)) => lines.push(line.to_string()),
                None => return Err(AlgebraError::Parse(format!("content before any section: {line}"))),
            }
        }
    }
    Ok(Document { sections })
}

impl Document {
    pub fn section(&self, name: &str) -> Option<&[String]> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, l)| l.as_slice())
    }

    pub fn keyed(&self, name: &str, key: &str) -> Option<String> {
        self.section(name)?.iter().find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == key).then(|| v.trim().to_string())
        })
    }
}

fn parse_field(doc: &Document) -> Result<FieldSpec, AlgebraError> {
    let ch = doc
        .keyed("field", "characteristic")
        .ok_or_else(|| AlgebraError::Parse("missing [field] characteristic".into()))?;
    let ch: u64 = ch
        .parse()
        .map_err(|_| AlgebraError::Parse(format!("bad characteristic {ch}")))?;
    FieldSpec::new(ch).map_err(|e| AlgebraError::Parse(e.to_string()))
}

/// load an algebra from the sectioned text format; accepts either a
/// structure-constant presentation or a quiver presentation.
pub fn load_algebra(src: &str) -> Result<Algebra, AlgebraError> {
    let doc = parse_document(src)?;
    let field = parse_field(&doc)?;
    if doc.section("quiver").is_some() {
        return quiver_to_algebra(&parse_quiver(&doc, field)?);
    }

    let basis = doc
        .section("basis")
        .ok_or_else(|| AlgebraError::Parse("missing [basis] section".into()))?;
    let mut labels: Vec<String> = Vec::new();
    let mut idem_labels: Vec<String> = Vec::new();
    let mut declared_bidegree: HashMap<String, (String, String)> = HashMap::new();
    for line in basis {
        if let Some(v) = line.strip_prefix("idempotents") {
            let v = v.trim_start_matches(['=', ' ']).trim();
            for w in v.split_whitespace() {
                idem_labels.push(w.to_string());
                labels.push(w.to_string());
            }
        } else if let Some(v) = line.strip_prefix("element") {
            // element x : e_l e_r
            let v = v.trim();
            let (name, bid) = v
                .split_once(':')
                .ok_or_else(|| AlgebraError::Parse(format!("bad element line: {line}")))?;
            let parts: Vec<&str> = bid.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(AlgebraError::Parse(format!("bad bidegree in: {line}")));
            }
            labels.push(name.trim().to_string());
            declared_bidegree.insert(
                name.trim().to_string(),
                (parts[0].to_string(), parts[1].to_string()),
            );
        } else {
            return Err(AlgebraError::Parse(format!("unrecognized [basis] line: {line}")));
        }
    }
    // an optional separate [idempotents] section
    if let Some(lines) = doc.section("idempotents") {
        for line in lines {
            let v = line.strip_prefix("elements").map(|s| s.trim_start_matches(['=', ' '])).unwrap_or(line);
            for w in v.split_whitespace() {
                if !idem_labels.contains(&w.to_string()) {
                    idem_labels.push(w.to_string());
                    if !labels.contains(&w.to_string()) {
                        labels.insert(0, w.to_string());
                    }
                }
            }
        }
    }
    if idem_labels.is_empty() {
        return Err(AlgebraError::Parse("no idempotents declared".into()));
    }
    let dim = labels.len();
    let resolve = |name: &str| labels.iter().position(|l| l == name);
    let idempotents: Vec<usize> = idem_labels
        .iter()
        .map(|l| resolve(l).ok_or_else(|| AlgebraError::Parse(format!("unknown idempotent {l}"))))
        .collect::<Result<_, _>>()?;

    let zero = || vec![field.zero(); dim];
    let mut mult = vec![vec![zero(); dim]; dim];
    // idempotent products and corner actions come from the declarations
    let idem_pos = |lbl: &str| -> Result<usize, AlgebraError> {
        idem_labels
            .iter()
            .position(|l| l == lbl)
            .ok_or_else(|| AlgebraError::Parse(format!("unknown idempotent {lbl}")))
    };
    for (a, &i) in idempotents.iter().enumerate() {
        for (b, &j) in idempotents.iter().enumerate() {
            if a == b {
                mult[i][j][i] = field.one();
            }
        }
    }
    for (t, lbl) in labels.iter().enumerate() {
        if idempotents.contains(&t) {
            continue;
        }
        let Some((l, r)) = declared_bidegree.get(lbl) else {
            return Err(AlgebraError::Parse(format!("element {lbl} missing a bidegree declaration")));
        };
        let (lp, rp) = (idem_pos(l)?, idem_pos(r)?);
        let (le, re) = (idempotents[lp], idempotents[rp]);
        mult[le][t][t] = field.one();
        mult[t][re][t] = field.one();
    }
    // explicit products between non-idempotent elements
    if let Some(lines) = doc.section("structure") {
        for line in lines {
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| AlgebraError::Parse(format!("bad structure line: {line}")))?;
            let (a, b) = lhs
                .split_once('*')
                .ok_or_else(|| AlgebraError::Parse(format!("bad product in: {line}")))?;
            let ia = resolve(a.trim())
                .ok_or_else(|| AlgebraError::Parse(format!("unknown element {}", a.trim())))?;
            let ib = resolve(b.trim())
                .ok_or_else(|| AlgebraError::Parse(format!("unknown element {}", b.trim())))?;
            mult[ia][ib] = parse_combination(field, rhs, &resolve, dim)?;
        }
    }
    Algebra::new(field, labels, mult, idempotents)
}

fn parse_quiver(doc: &Document, field: FieldSpec) -> Result<QuiverPresentation, AlgebraError> {
    let lines = doc.section("quiver").unwrap();
    let mut vertices: Vec<String> = Vec::new();
    let mut arrows: Vec<(String, usize, usize)> = Vec::new();
    let mut relation_lines: Vec<String> = Vec::new();
    let mut max_len = 12usize;
    for line in lines {
        if let Some(v) = line.strip_prefix("vertices") {
            vertices = v
                .trim_start_matches(['=', ' '])
                .split_whitespace()
                .map(|s| s.to_string())
                .collect();
        } else if let Some(v) = line.strip_prefix("arrow") {
            let (name, rest) = v
                .split_once(':')
                .ok_or_else(|| AlgebraError::Parse(format!("bad arrow line: {line}")))?;
            let (s, t) = rest
                .split_once("->")
                .ok_or_else(|| AlgebraError::Parse(format!("bad arrow line: {line}")))?;
            let si = vertices
                .iter()
                .position(|x| x == s.trim())
                .ok_or_else(|| AlgebraError::Parse(format!("unknown vertex {}", s.trim())))?;
            let ti = vertices
                .iter()
                .position(|x| x == t.trim())
                .ok_or_else(|| AlgebraError::Parse(format!("unknown vertex {}", t.trim())))?;
            arrows.push((name.trim().to_string(), si, ti));
        } else if let Some(v) = line.strip_prefix("relation") {
            relation_lines.push(v.trim().to_string());
        } else if let Some(v) = line.strip_prefix("maxlen") {
            max_len = v
                .trim_start_matches(['=', ' '])
                .parse()
                .map_err(|_| AlgebraError::Parse(format!("bad maxlen: {line}")))?;
        } else {
            return Err(AlgebraError::Parse(format!("unrecognized [quiver] line: {line}")));
        }
    }
    // a relation is a combination of paths; paths are arrow labels joined by '*'
    let mut relations = Vec::new();
    for rl in &relation_lines {
        let mut terms: Vec<(Scalar, Vec<usize>)> = Vec::new();
        let mut sign = 1i64;
        let mut cur = String::new();
        let flush = |sign: i64, cur: &str, terms: &mut Vec<(Scalar, Vec<usize>)>| -> Result<(), AlgebraError> {
            let cur = cur.trim();
            if cur.is_empty() {
                return Ok(());
            }
            let mut coeff = field.from_int(sign);
            let mut path = Vec::new();
            for piece in cur.split('*') {
                let piece = piece.trim();
                match arrows.iter().position(|(l, _, _)| l == piece) {
                    Some(a) => path.push(a),
                    None => {
                        let c = parse_scalar(field, piece)?;
                        coeff = field.mul(&coeff, &c);
                    }
                }
            }
            if path.is_empty() {
                return Err(AlgebraError::Parse(format!("relation term without a path: {cur}")));
            }
            terms.push((coeff, path));
            Ok(())
        };
        for ch in rl.chars() {
            match ch {
                '+' | '-' => {
                    flush(sign, &cur, &mut terms)?;
                    sign = if ch == '-' { -1 } else { 1 };
                    cur = String::new();
                }
                _ => cur.push(ch),
            }
        }
        flush(sign, &cur, &mut terms)?;
        relations.push(terms);
    }
    Ok(QuiverPresentation {
        field,
        vertices,
        arrows,
        relations,
        max_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn load_dual_numbers() {
        let a = samples::dual_numbers(FieldSpec::prime(2));
        assert_eq!(a.dim, 2);
        assert_eq!(a.num_idempotents(), 1);
        assert_eq!(a.bar_dim(), 1);
        assert_eq!(a.barlambda_tensor_power(3).len(), 1);
    }

    #[test]
    fn load_a2() {
        let a = samples::a2(FieldSpec::rationals());
        assert_eq!(a.dim, 3);
        assert_eq!(a.num_idempotents(), 2);
        // the arrow has bidegree (e2, e1)
        let (l, r) = a.bar_bidegree(0);
        assert_eq!((l, r), (1, 0));
        // tensor square dies over E
        assert_eq!(a.barlambda_tensor_power(2).len(), 0);
        assert_eq!(a.barlambda_tensor_power(0).len(), 2);
    }

    #[test]
    fn associativity_violation_reported() {
        let f = FieldSpec::prime(3);
        // basis {e, x} with x*x = e is associative, so corrupt a unit law instead:
        // x*x = x but e*x = x etc: (x x) x = x*x = x ; x (x x) = x*x = x ok...
        // build a genuinely non-associative table: x*x = e, e as unit, then
        // (x*x)*x = e*x = x but x*(x*x) = x*e = x, fine; so instead poison e*x.
        let labels = vec!["e".to_string(), "x".to_string()];
        let z = || vec![f.zero(), f.zero()];
        let mut mult = vec![vec![z(), z()], vec![z(), z()]];
        mult[0][0][0] = f.one(); // e*e = e
        mult[0][1][1] = f.one(); // e*x = x
        mult[1][0][1] = f.one(); // x*e = x
        mult[1][1][0] = f.one(); // x*x = e  -> bidegree check must reject span issues
        // x*x = e makes the complement fail to be closed; surfaces in radical()
        let a = Algebra::new(f, labels, mult, vec![0]).unwrap();
        assert!(matches!(a.radical(), Err(AlgebraError::NotNilpotent(_))));
    }

    #[test]
    fn bad_associativity_named_triple() {
        let f = FieldSpec::prime(2);
        let labels = vec!["e".into(), "x".into(), "y".into()];
        let z = || vec![f.zero(); 3];
        let mut mult = vec![vec![z(); 3]; 3];
        mult[0][0][0] = f.one();
        for t in 1..3 {
            mult[0][t][t] = f.one();
            mult[t][0][t] = f.one();
        }
        // x*x = y, x*y = y (non-associative: (xx)y=yy=0 vs x(xy)=xy=y)
        mult[1][1][2] = f.one();
        mult[1][2][2] = f.one();
        match Algebra::new(f, labels, mult, vec![0]) {
            Err(AlgebraError::Associativity(a, b, c)) => {
                assert_eq!((a.as_str(), b.as_str(), c.as_str()), ("x", "x", "x"));
            }
            other => panic!("expected associativity error, got {other:?}"),
        }
    }

    #[test]
    fn quiver_loop_square() {
        let a = load_algebra(
            "[field]\ncharacteristic = 2\n[quiver]\nvertices = v\narrow x : v -> v\nrelation x*x\nmaxlen = 5\n",
        )
        .unwrap();
        assert_eq!(a.dim, 2);
        assert_eq!(a.bar_dim(), 1);
    }

    #[test]
    fn quiver_a2() {
        let a = load_algebra(
            "[field]\ncharacteristic = 0\n[quiver]\nvertices = v1 v2\narrow a : v1 -> v2\nmaxlen = 4\n",
        )
        .unwrap();
        assert_eq!(a.dim, 3);
        assert_eq!(a.num_idempotents(), 2);
    }

    #[test]
    fn quiver_loop_cube_f3() {
        let a = load_algebra(
            "[field]\ncharacteristic = 3\n[quiver]\nvertices = v\narrow x : v -> v\nrelation x*x*x\nmaxlen = 6\n",
        )
        .unwrap();
        assert_eq!(a.dim, 3);
        assert_eq!(a.bar_dim(), 2);
        // x * x = x2 in the quotient
        let prod = a.mul_basis(1, 1);
        assert!(a.field.is_zero(&prod[0]) && a.field.is_zero(&prod[1]));
        assert_eq!(prod[2], a.field.one());
    }

    #[test]
    fn quiver_infinite_rejected() {
        let err = load_algebra(
            "[field]\ncharacteristic = 2\n[quiver]\nvertices = v\narrow x : v -> v\nmaxlen = 4\n",
        );
        assert!(matches!(err, Err(AlgebraError::Quiver(_))));
    }

    #[test]
    fn structure_text_roundtrip() {
        let a = load_algebra(
            "[field]\ncharacteristic = 0\n[basis]\nidempotents = one\nelement x : one one\nelement x2 : one one\n[structure]\nx * x = x2\n",
        )
        .unwrap();
        assert_eq!(a.dim, 3);
        assert_eq!(a.radical().unwrap().len(), 2);
    }

    #[test]
    fn radical_of_samples() {
        for f in [FieldSpec::prime(2), FieldSpec::prime(3), FieldSpec::rationals()] {
            for a in samples::all(f) {
                let r = a.radical().unwrap();
                assert_eq!(r.len(), a.bar_dim());
            }
        }
    }

    #[test]
    fn nakayama_tuples_alternate() {
        let a = samples::nakayama(FieldSpec::prime(3));
        for p in 1..6 {
            assert_eq!(a.bar_tuples(p).len(), 2, "p={p}");
        }
    }

    #[test]
    fn commutative_local_tuples_double() {
        let a = samples::kxy(FieldSpec::prime(2));
        for p in 1..5 {
            assert_eq!(a.bar_tuples(p).len(), 1 << p, "p={p}");
        }
    }
}
