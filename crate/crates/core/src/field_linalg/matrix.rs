use std::fmt;
use std::ops::ControlFlow;

use super::field::{Elem, Field};
use super::gf2::PackedRows;
use super::vector::FVector;
use crate::error::{Error, Result};

/// A dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:?} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        FMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<Elem>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for &e in row {
                field.check_element(e as u32)?;
            }
            data.extend_from_slice(row);
        }
        Ok(FMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from digit strings or space-separated rows, e.g. `["1110", "1101"]`.
    pub fn parse_rows(field: &Field, rows: &[&str]) -> Result<Self> {
        let vecs = rows
            .iter()
            .map(|r| FVector::parse(field, r).map(FVector::into_entries))
            .collect::<Result<Vec<_>>>()?;
        let cols = vecs.first().map_or(0, Vec::len);
        Self::from_rows(field, cols, &vecs)
    }

    pub fn from_columns(field: &Field, rows: usize, columns: &[Vec<Elem>]) -> Result<Self> {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::LengthMismatch {
                    expected: rows,
                    got: col.len(),
                });
            }
            for (i, &e) in col.iter().enumerate() {
                field.check_element(e as u32)?;
                m.data[i * m.cols + j] = e;
            }
        }
        Ok(m)
    }

    pub(crate) fn from_raw(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Elem) {
        debug_assert!((value as u32) < self.field.q());
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> FVector {
        FVector::from_raw(&self.field, self.row(r).to_vec())
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Elem>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    /// The submatrix on the given rows, in the order given.
    pub fn select_rows(&self, indices: &[usize]) -> FMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FMatrix::from_raw(&self.field, indices.len(), self.cols, data)
    }

    pub fn select_columns(&self, indices: &[usize]) -> FMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.rows);
        for r in 0..self.rows {
            data.extend(indices.iter().map(|&c| self.get(r, c)));
        }
        FMatrix::from_raw(&self.field, self.rows, indices.len(), data)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = FMatrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.q(),
                right: other.field.q(),
            });
        }
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = FMatrix::zeros(&self.field, self.rows, other.cols);
        for r in 0..self.rows {
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                self.field.axpy(dst, self.get(r, k), other.row(k));
            }
        }
        Ok(out)
    }

    /// Row vector times matrix, `x · self`.
    pub fn vec_mul(&self, x: &FVector) -> Result<FVector> {
        if x.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: x.len(),
            });
        }
        if x.field() != &self.field {
            return Err(Error::FieldMismatch {
                left: self.field.q(),
                right: x.field().q(),
            });
        }
        Ok(FVector::from_raw(&self.field, self.combine_rows(x.entries())))
    }

    /// `Σ coeffs[r] · row(r)` on raw slices.
    pub(crate) fn combine_rows(&self, coeffs: &[Elem]) -> Vec<Elem> {
        let mut out = vec![0; self.cols];
        for (r, &a) in coeffs.iter().enumerate() {
            self.field.axpy(&mut out, a, self.row(r));
        }
        out
    }

    /// Matrix times column vector, `self · vᵀ`, returned as a vector of length `rows`.
    pub fn mul_vec(&self, v: &FVector) -> Result<FVector> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(FVector::from_raw(
            &self.field,
            (0..self.rows)
                .map(|r| self.field.dot(self.row(r), v.entries()))
                .collect(),
        ))
    }

    /// Reduced row echelon form without zero rows, plus the pivot columns.
    /// Pivots are chosen left to right using the first eligible row.
    pub fn rref(&self) -> (FMatrix, Vec<usize>) {
        let f = &self.field;
        let mut rows = self.row_vecs();
        let mut pivots = Vec::new();
        let mut top = 0;
        for c in 0..self.cols {
            if top == rows.len() {
                break;
            }
            let Some(p) = (top..rows.len()).find(|&r| rows[r][c] != 0) else {
                continue;
            };
            rows.swap(top, p);
            let inv = f.inv(rows[top][c]).unwrap();
            f.scale_in_place(&mut rows[top], inv);
            let pivot_row = rows[top].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != top && row[c] != 0 {
                    let a = f.neg(row[c]);
                    f.axpy(row, a, &pivot_row);
                }
            }
            pivots.push(c);
            top += 1;
        }
        rows.truncate(top);
        let data = rows.concat();
        (FMatrix::from_raw(f, top, self.cols, data), pivots)
    }

    /// Rank over the matrix's field. Binary matrices use a packed-word path.
    pub fn rank(&self) -> usize {
        if self.field.is_binary() {
            PackedRows::from_matrix(self).rank()
        } else {
            self.rank_generic()
        }
    }

    /// Rank by table-driven elimination, for any field.
    pub fn rank_generic(&self) -> usize {
        let mut basis = Echelon::new(&self.field, self.cols);
        for r in 0..self.rows {
            basis.insert(self.row(r));
        }
        basis.rank()
    }

    /// A basis of the row space (the nonzero rows of the RREF).
    pub fn row_space_basis(&self) -> FMatrix {
        self.rref().0
    }

    pub fn scale_column(&mut self, c: usize, a: Elem) {
        for r in 0..self.rows {
            let idx = r * self.cols + c;
            self.data[idx] = self.field.mul(a, self.data[idx]);
        }
    }

    /// Writes the matrix in the text format: a `q n N` header followed by
    /// one line per row of space-separated element encodings.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.field.q(), self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Reads the text format written by [`FMatrix::to_text`]. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<FMatrix> {
        let malformed = |msg: String| Error::MalformedDocument(msg);
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| malformed("missing `q n N` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| malformed(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [q, n, cols] = dims[..] else {
            return Err(malformed(format!("header must be `q n N`, got {header:?}")));
        };
        let q = u32::try_from(q).map_err(|_| malformed(format!("field order {q} too large")))?;
        let field = Field::new(q)?;
        if cols == 0 {
            // Rows of a zero-column matrix are empty lines, which carry no content.
            if let Some(extra) = lines.next() {
                return Err(malformed(format!("unexpected entries {extra:?} for N = 0")));
            }
            return Ok(FMatrix::zeros(&field, n, 0));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            if i >= n {
                return Err(malformed(format!("more than the declared {n} rows")));
            }
            let row: Vec<Elem> = line
                .split_whitespace()
                .map(|t| {
                    let v: u32 = t
                        .parse()
                        .map_err(|_| malformed(format!("row {}: bad entry {t:?}", i + 1)))?;
                    field.check_element(v)
                })
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(malformed(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    row.len()
                )));
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(malformed(format!("expected {n} rows, found {}", rows.len())));
        }
        FMatrix::from_rows(&field, cols, &rows)
    }
}

/// Rank of a matrix.
pub fn mat_rank(m: &FMatrix) -> usize {
    m.rank()
}

/// A row-echelon basis that supports incremental insertion and stack-order
/// removal. Every stored row has a one at its pivot and zeros at the pivots
/// of all rows stored before it.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    len: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: &Field, len: usize) -> Self {
        Echelon {
            field: field.clone(),
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    /// Residual of `v` after eliminating every stored pivot. Zero iff `v` is in the span.
    pub fn reduce(&self, v: &[Elem]) -> Vec<Elem> {
        let mut out = v.to_vec();
        self.reduce_in_place(&mut out);
        out
    }

    pub fn reduce_in_place(&self, v: &mut [Elem]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p] != 0 {
                let a = self.field.neg(v[p]);
                self.field.axpy(v, a, row);
            }
        }
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        let mut r = v.to_vec();
        self.reduce_in_place(&mut r);
        r.iter().all(|&e| e == 0)
    }

    /// Inserts `v`; returns false (and stores nothing) if it was already in the span.
    pub fn insert(&mut self, v: &[Elem]) -> bool {
        let mut r = v.to_vec();
        self.reduce_in_place(&mut r);
        self.insert_reduced(r)
    }

    /// Inserts a vector that has already been passed through [`Echelon::reduce`].
    pub fn insert_reduced(&mut self, mut r: Vec<Elem>) -> bool {
        let Some(p) = r.iter().position(|&e| e != 0) else {
            return false;
        };
        let inv = self.field.inv(r[p]).unwrap();
        self.field.scale_in_place(&mut r, inv);
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    /// Removes the most recently inserted row.
    pub fn pop(&mut self) {
        self.rows.pop();
        self.pivots.pop();
    }
}

/// Visits every linear combination `Σ a_r · rows[r]` with coefficients in
/// odometer order (first coefficient varies fastest, elements in encoding
/// order). The callback receives the coefficients and the combination.
/// Visits `q^rows.len()` combinations, starting with the all-zero one.
pub fn for_each_combination<B>(
    field: &Field,
    rows: &[Vec<Elem>],
    len: usize,
    mut visit: impl FnMut(&[Elem], &[Elem]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let q = field.order();
    let k = rows.len();
    let mut coeffs = vec![0 as Elem; k];
    let mut acc = vec![0 as Elem; len];
    // Moving digit j from a to a+1 (in encoding order) adds (a+1 - a) * row_j.
    let steps: Vec<Elem> = (0..q).map(|a| field.sub(((a + 1) % q) as Elem, a as Elem)).collect();
    loop {
        visit(&coeffs, &acc)?;
        let mut j = 0;
        loop {
            if j == k {
                return ControlFlow::Continue(());
            }
            let a = coeffs[j] as usize;
            field.axpy(&mut acc, steps[a], &rows[j]);
            coeffs[j] = ((a + 1) % q) as Elem;
            if coeffs[j] != 0 {
                break;
            }
            j += 1;
        }
    }
}

/// Solves `x · A = b` for a row vector `x`, where `A` has the given rows.
/// Returns one solution (free variables set to zero) or `None`.
pub fn solve_left(field: &Field, rows: &[Vec<Elem>], b: &[Elem]) -> Option<Vec<Elem>> {
    let k = rows.len();
    let n = b.len();
    // Column-wise system Aᵀ xᵀ = bᵀ: n equations in k unknowns, augmented.
    let mut eqs: Vec<Vec<Elem>> = (0..n)
        .map(|c| {
            let mut e: Vec<Elem> = rows.iter().map(|r| r[c]).collect();
            e.push(b[c]);
            e
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..k {
        let Some(p) = (top..n).find(|&r| eqs[r][c] != 0) else {
            continue;
        };
        eqs.swap(top, p);
        let inv = field.inv(eqs[top][c]).unwrap();
        field.scale_in_place(&mut eqs[top], inv);
        let pr = eqs[top].clone();
        for (r, row) in eqs.iter_mut().enumerate() {
            if r != top && row[c] != 0 {
                let a = field.neg(row[c]);
                field.axpy(row, a, &pr);
            }
        }
        pivots.push(c);
        top += 1;
    }
    if eqs[top..].iter().any(|row| row[k] != 0) {
        return None;
    }
    let mut x = vec![0; k];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = eqs[r][k];
    }
    Some(x)
}
