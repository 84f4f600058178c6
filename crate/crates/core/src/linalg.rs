//! exact dense linear algebra over F_p (p prime, p < 2^31) and Q.
//!
//! everything downstream reduces to ranks, kernels and solves computed here.
//! elimination always picks the first nonzero pivot by position, so bases are
//! deterministic and test output is reproducible.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("no solution: right-hand side outside the column space")]
    NoSolution,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("field mismatch between operands")]
    FieldMismatch,
    #[error("d_next . d_prev != 0")]
    NotAComplex,
    #[error("characteristic {0} is not 0 or a prime < 2^31")]
    BadCharacteristic(u64),
}

/// ground field: characteristic 0 means Q, otherwise F_p.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct FieldSpec {
    pub characteristic: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn new(characteristic: u64) -> Result<Self, LinalgError> {
        if characteristic == 0 || (characteristic < (1 << 31) && is_prime(characteristic)) {
            Ok(FieldSpec { characteristic })
        } else {
            Err(LinalgError::BadCharacteristic(characteristic))
        }
    }

    pub fn rationals() -> Self {
        FieldSpec { characteristic: 0 }
    }

    pub fn prime(p: u64) -> Self {
        FieldSpec::new(p).expect("prime field")
    }

    pub fn zero(&self) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(BigRational::zero()),
            _ => Scalar::Fp(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(BigRational::one()),
            _ => Scalar::Fp(1),
        }
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            p => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Fp(r)
            }
        }
    }

    /// (-1)^n as a scalar.
    pub fn sign(&self, n: i64) -> Scalar {
        if n.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.from_int(-1)
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self.characteristic, a, b) {
            (p, Scalar::Fp(x), Scalar::Fp(y)) if p != 0 => Scalar::Fp((x + y) % p),
            (0, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self.characteristic, a) {
            (p, Scalar::Fp(x)) if p != 0 => Scalar::Fp(if *x == 0 { 0 } else { p - x }),
            (0, Scalar::Rat(x)) => Scalar::Rat(-x),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self.characteristic, a, b) {
            (p, Scalar::Fp(x), Scalar::Fp(y)) if p != 0 => Scalar::Fp((x * y) % p),
            (0, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Scalar {
        match (self.characteristic, a) {
            (p, Scalar::Fp(x)) if p != 0 => {
                assert!(*x != 0, "inverse of zero");
                // extended euclid on (x, p)
                let (mut r0, mut r1) = (*x as i128, p as i128);
                let (mut s0, mut s1) = (1i128, 0i128);
                while r1 != 0 {
                    let q = r0 / r1;
                    let r = r0 - q * r1;
                    r0 = r1;
                    r1 = r;
                    let s = s0 - q * s1;
                    s0 = s1;
                    s1 = s;
                }
                debug_assert_eq!(r0, 1);
                Scalar::Fp(s0.rem_euclid(p as i128) as u64)
            }
            (0, Scalar::Rat(x)) => {
                assert!(!x.is_zero(), "inverse of zero");
                Scalar::Rat(x.recip())
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Fp(x) => *x == 0,
            Scalar::Rat(x) => x.is_zero(),
        }
    }
}

/// an exact field element; the variant must match the ambient FieldSpec.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scalar {
    Fp(u64),
    Rat(BigRational),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp(x) => write!(f, "{}", x),
            Scalar::Rat(x) => {
                if x.denom().is_one() {
                    write!(f, "{}", x.numer())
                } else if x.denom().is_negative() {
                    write!(f, "{}/{}", -x.numer(), -x.denom())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
        }
    }
}

/// dense row-major matrix over a fixed field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Matrix {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Matrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, field: FieldSpec, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { rows, cols, field, entries }
    }

    /// build from integer literals; handy in tests and structure constants.
    pub fn from_ints(field: FieldSpec, data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = if rows == 0 { 0 } else { data[0].len() };
        Matrix::from_fn(rows, cols, field, |i, j| field.from_int(data[i][j]))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn add_assign_at(&mut self, i: usize, j: usize, v: &Scalar) {
        let cur = self.field.add(self.get(i, j), v);
        self.set(i, j, cur);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.field.is_zero(e))
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape");
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| {
            self.field.add(self.get(i, j), other.get(i, j))
        })
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub shape");
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| {
            self.field.sub(self.get(i, j), other.get(i, j))
        })
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| self.field.neg(self.get(i, j)))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, self.field, |i, j| self.field.mul(c, self.get(i, j)))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "mul shape {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols);
        let f = self.field;
        let mut out = Matrix::zero(self.rows, other.cols, f);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let prod = f.mul(a, b);
                    out.add_assign_at(i, j, &prod);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.field, |i, j| self.get(j, i).clone())
    }

    /// [self | other] side by side.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack rows");
        Matrix::from_fn(self.rows, self.cols + other.cols, self.field, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack cols");
        Matrix::from_fn(self.rows + other.rows, self.cols, self.field, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_cols(rows: usize, field: FieldSpec, cols: &[Vec<Scalar>]) -> Matrix {
        Matrix::from_fn(rows, cols.len(), field, |i, j| cols[j][i].clone())
    }

    /// matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "apply shape");
        let f = self.field;
        let mut out = vec![f.zero(); self.rows];
        for (k, x) in v.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for i in 0..self.rows {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                out[i] = f.add(&out[i], &f.mul(a, x));
            }
        }
        out
    }

    /// row-reduce in place; returns pivot columns.
    fn row_reduce(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // first nonzero entry at or below row r
            let mut pivot_row = None;
            for i in r..self.rows {
                if !f.is_zero(self.get(i, c)) {
                    pivot_row = Some(i);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != r {
                for j in 0..self.cols {
                    self.entries.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c));
            for j in c..self.cols {
                let v = f.mul(&inv, self.get(r, j));
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || f.is_zero(self.get(i, c)) {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// columns form a basis of ker(self); self * result = 0.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zero(self.cols, free.len(), f);
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, f.one());
            for (row, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, f.neg(r.get(row, fc)));
            }
        }
        debug_assert!(self.mul(&out).is_zero());
        out
    }

    /// solve self * x = b columnwise; b may have several columns.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != b.rows {
            return Err(LinalgError::Shape(format!(
                "solve: {} rows vs rhs {} rows",
                self.rows, b.rows
            )));
        }
        let f = self.field;
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        // any pivot in the rhs block means inconsistency
        if pivots.iter().any(|&c| c >= self.cols) {
            return Err(LinalgError::NoSolution);
        }
        let mut x = Matrix::zero(self.cols, b.cols, f);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(row, self.cols + j).clone());
            }
        }
        debug_assert_eq!(self.mul(&x), *b);
        Ok(x)
    }

    /// deterministic basis of the column space: the pivot columns.
    pub fn column_space_basis(&self) -> Matrix {
        let (_, pivots) = self.rref();
        Matrix::from_fn(self.rows, pivots.len(), self.field, |i, j| self.get(i, pivots[j]).clone())
    }
}

/// dim ker(d_next) - rank(d_prev); errors unless d_next . d_prev = 0.
pub fn cohomology_dims(d_prev: &Matrix, d_next: &Matrix) -> Result<usize, LinalgError> {
    if !d_next.mul(d_prev).is_zero() {
        return Err(LinalgError::NotAComplex);
    }
    Ok(d_next.cols - d_next.rank() - d_prev.rank())
}

/// ker(d_next)/im(d_prev) with a deterministic basis of representatives.
#[derive(Clone, Debug)]
pub struct Subquotient {
    /// ambient dimension
    pub dim: usize,
    pub field: FieldSpec,
    /// columns: chosen cohomology representatives
    pub reps: Matrix,
    /// columns: a basis of the boundary space im(d_prev)
    pub boundaries: Matrix,
}

impl Subquotient {
    pub fn cohomology(d_prev: &Matrix, d_next: &Matrix) -> Result<Subquotient, LinalgError> {
        if !d_next.mul(d_prev).is_zero() {
            return Err(LinalgError::NotAComplex);
        }
        let f = d_prev.field;
        let kernel = d_next.kernel_basis();
        let boundaries = d_prev.column_space_basis();
        // extend the boundary basis through the kernel, keeping new columns as reps
        let mut span = boundaries.clone();
        let mut reps: Vec<Vec<Scalar>> = Vec::new();
        for j in 0..kernel.cols {
            let cand = Matrix::from_cols(kernel.rows, f, &[kernel.col(j)]);
            if span.solve(&cand).is_err() {
                reps.push(kernel.col(j));
                span = span.hstack(&cand);
            }
        }
        Ok(Subquotient {
            dim: d_next.cols,
            field: f,
            reps: Matrix::from_cols(d_next.cols, f, &reps),
            boundaries,
        })
    }

    pub fn rank(&self) -> usize {
        self.reps.cols
    }

    /// coordinates of a cocycle in the representative basis.
    pub fn coords(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        let f = self.field;
        let basis = self.reps.hstack(&self.boundaries);
        let rhs = Matrix::from_cols(self.dim, f, &[v.to_vec()]);
        let sol = basis.solve(&rhs)?;
        Ok((0..self.reps.cols).map(|i| sol.get(i, 0).clone()).collect())
    }

    /// matrix of the map induced on cohomology by a compatible linear map.
    pub fn induced_map(&self, target: &Subquotient, f_mat: &Matrix) -> Result<Matrix, LinalgError> {
        let f = self.field;
        let mut out = Matrix::zero(target.rank(), self.rank(), f);
        for j in 0..self.reps.cols {
            let img = f_mat.apply(&self.reps.col(j));
            let coords = target.coords(&img)?;
            for (i, c) in coords.into_iter().enumerate() {
                out.set(i, j, c);
            }
        }
        Ok(out)
    }
}

/// incremental row-space reducer: membership tests and canonical residues
/// against a growing span, deterministic (first-nonzero leading entries).
#[derive(Clone, Debug)]
pub struct SpanReducer {
    pub dim: usize,
    pub field: FieldSpec,
    /// echelon rows with strictly increasing pivot positions
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl SpanReducer {
    pub fn new(dim: usize, field: FieldSpec) -> Self {
        SpanReducer { dim, field, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// pivot coordinate positions, strictly increasing.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// canonical residue of v modulo the current span.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let mut w = v.to_vec();
        for (piv, row) in &self.rows {
            if f.is_zero(&w[*piv]) {
                continue;
            }
            let c = w[*piv].clone();
            for (i, r) in row.iter().enumerate() {
                if !f.is_zero(r) {
                    w[i] = f.sub(&w[i], &f.mul(&c, r));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let f = self.field;
        self.reduce(v).iter().all(|x| f.is_zero(x))
    }

    /// add v to the span; returns true if the rank grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let f = self.field;
        let w = self.reduce(v);
        let Some(piv) = w.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&w[piv]);
        let normalized: Vec<Scalar> = w.iter().map(|x| f.mul(&inv, x)).collect();
        // back-substitute into existing rows to keep residues canonical
        for (_, row) in self.rows.iter_mut() {
            if !f.is_zero(&row[piv]) {
                let c = row[piv].clone();
                for (i, n) in normalized.iter().enumerate() {
                    if !f.is_zero(n) {
                        row[i] = f.sub(&row[i], &f.mul(&c, n));
                    }
                }
            }
        }
        let pos = self.rows.partition_point(|(p, _)| *p < piv);
        self.rows.insert(pos, (piv, normalized));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2)
    }

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn rank_basics() {
        assert_eq!(Matrix::identity(2, f2()).rank(), 2);
        assert_eq!(Matrix::zero(3, 5, q()).rank(), 0);
        let m = Matrix::from_ints(q(), &[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_basics() {
        assert_eq!(Matrix::identity(4, q()).kernel_basis().cols, 0);
        let z = Matrix::zero(3, 3, f2());
        assert_eq!(z.kernel_basis().cols, 3);
        let m = Matrix::from_ints(f2(), &[&[1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.cols, 1);
        assert_eq!(*k.get(0, 0), Scalar::Fp(1));
        assert_eq!(*k.get(1, 0), Scalar::Fp(1));
    }

    #[test]
    fn solve_basics() {
        let id = Matrix::identity(3, q());
        let b = Matrix::from_ints(q(), &[&[1], &[2], &[3]]);
        assert_eq!(id.solve(&b).unwrap(), b);

        let z = Matrix::zero(2, 2, q());
        let b = Matrix::from_ints(q(), &[&[1], &[0]]);
        assert!(matches!(z.solve(&b), Err(LinalgError::NoSolution)));

        let m = Matrix::from_ints(q(), &[&[2]]);
        let b = Matrix::from_ints(q(), &[&[1]]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul(&x), b);
    }

    #[test]
    fn rank_nullity() {
        let f = FieldSpec::prime(3);
        let m = Matrix::from_ints(f, &[&[1, 2, 0, 1], &[2, 1, 1, 0], &[0, 0, 1, 1]]);
        assert_eq!(m.rank() + m.kernel_basis().cols, m.cols);
    }

    #[test]
    fn fp_inverse() {
        let f = FieldSpec::prime(7);
        for x in 1..7i64 {
            let s = f.from_int(x);
            assert_eq!(f.mul(&s, &f.inv(&s)), f.one());
        }
    }

    #[test]
    fn cohomology_of_x_multiplication() {
        // k[x]/(x^2) acting on itself: multiplication by x at consecutive spots
        let f = f2();
        let x_mul = Matrix::from_ints(f, &[&[0, 0], &[1, 0]]);
        assert_eq!(cohomology_dims(&x_mul, &x_mul).unwrap(), 0);
    }

    #[test]
    fn cohomology_trivial_cases() {
        let f = q();
        let z23 = Matrix::zero(3, 2, f);
        let z34 = Matrix::zero(4, 3, f);
        assert_eq!(cohomology_dims(&z23, &z34).unwrap(), 3);
        let d_prev = Matrix::from_ints(f, &[&[1], &[0]]);
        let d_next = Matrix::zero(1, 2, f);
        assert_eq!(cohomology_dims(&d_prev, &d_next).unwrap(), 1);
    }

    #[test]
    fn composition_nonzero_rejected() {
        let f = q();
        let id = Matrix::identity(2, f);
        assert!(matches!(cohomology_dims(&id, &id), Err(LinalgError::NotAComplex)));
    }

    #[test]
    fn subquotient_and_induced_maps() {
        let f = q();
        // 0 -> k^2 --[1 0]--> k -> 0 at the middle spot: H = span(e2)
        let d_prev = Matrix::zero(2, 0, f);
        let d_next = Matrix::from_ints(f, &[&[1, 0]]);
        let h = Subquotient::cohomology(&d_prev, &d_next).unwrap();
        assert_eq!(h.rank(), 1);
        let coords = h.coords(&[f.zero(), f.from_int(5)]).unwrap();
        assert_eq!(coords, vec![f.from_int(5)]);

        // identity induces identity
        let ind = h.induced_map(&h, &Matrix::identity(2, f)).unwrap();
        assert_eq!(ind, Matrix::identity(1, f));
    }

    #[test]
    fn display_rationals() {
        let f = q();
        let m = Matrix::from_ints(f, &[&[2]]);
        let b = Matrix::from_ints(f, &[&[1]]);
        let x = m.solve(&b).unwrap();
        assert_eq!(format!("{}", x.get(0, 0)), "1/2");
    }
}
