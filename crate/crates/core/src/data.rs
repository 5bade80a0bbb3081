//! Feature containers, LIBSVM text I/O and column normalization.
//!
//! A [`Dataset`] is either entirely dense (row-major) or entirely sparse
//! (CSR); mixing the two is not supported. Feature indices are 0-based
//! internally and 1-based in LIBSVM files.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::{Error, Result, Scalar};

/// One sparse feature vector with strictly increasing indices and no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRow<T> {
    indices: Vec<usize>,
    values: Vec<T>,
    dim: usize,
}

impl<T: Scalar> SparseRow<T> {
    pub fn new(indices: Vec<usize>, values: Vec<T>, dim: usize) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::Invalid(format!(
                "{} indices but {} values",
                indices.len(),
                values.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("indices must be strictly increasing".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::Invalid(format!(
                    "index {last} out of range for dim {dim}"
                )));
            }
        }
        if values.iter().any(|v| v.is_zero()) {
            return Err(Error::Invalid("explicit zero stored in sparse row".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite value in sparse row".into()));
        }
        Ok(Self {
            indices,
            values,
            dim,
        })
    }

    /// Builds a sparse row from a dense slice, dropping zeros.
    pub fn from_dense(x: &[T]) -> Self {
        let (indices, values) = x
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, &v)| (j, v))
            .unzip();
        Self {
            indices,
            values,
            dim: x.len(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn view(&self) -> RowView<'_, T> {
        RowView::Sparse {
            indices: &self.indices,
            values: &self.values,
            dim: self.dim,
        }
    }
}

/// Borrowed feature row.
#[derive(Clone, Copy, Debug)]
pub enum RowView<'a, T> {
    Sparse {
        indices: &'a [usize],
        values: &'a [T],
        dim: usize,
    },
    Dense(&'a [T]),
}

impl<'a, T: Scalar> RowView<'a, T> {
    pub fn dim(&self) -> usize {
        match *self {
            RowView::Sparse { dim, .. } => dim,
            RowView::Dense(x) => x.len(),
        }
    }

    /// Inner product with a dense vector. Panics on dimension mismatch.
    #[inline]
    pub fn dot(&self, w: &[T]) -> T {
        assert_eq!(self.dim(), w.len(), "dimension mismatch");
        match *self {
            RowView::Sparse {
                indices, values, ..
            } => indices
                .iter()
                .zip(values)
                .fold(T::zero(), |acc, (&j, &x)| acc + x * w[j]),
            RowView::Dense(x) => crate::linalg::dot(x, w),
        }
    }

    /// `y += alpha * self`
    #[inline]
    pub fn axpy_into(&self, alpha: T, y: &mut [T]) {
        assert_eq!(self.dim(), y.len(), "dimension mismatch");
        match *self {
            RowView::Sparse {
                indices, values, ..
            } => {
                for (&j, &x) in indices.iter().zip(values) {
                    y[j] += alpha * x;
                }
            }
            RowView::Dense(x) => crate::linalg::axpy(alpha, x, y),
        }
    }

    pub fn sq_norm(&self) -> T {
        match *self {
            RowView::Sparse { values, .. } => crate::linalg::sq_norm(values),
            RowView::Dense(x) => crate::linalg::sq_norm(x),
        }
    }

    /// Indices of structurally nonzero entries; `None` means every coordinate.
    pub fn support(&self) -> Option<&'a [usize]> {
        match *self {
            RowView::Sparse { indices, .. } => Some(indices),
            RowView::Dense(_) => None,
        }
    }

    pub fn to_dense(&self) -> Vec<T> {
        match *self {
            RowView::Sparse {
                indices,
                values,
                dim,
            } => {
                let mut out = vec![T::zero(); dim];
                for (&j, &x) in indices.iter().zip(values) {
                    out[j] = x;
                }
                out
            }
            RowView::Dense(x) => x.to_vec(),
        }
    }

    /// Calls `f(j, x_j)` for every stored entry.
    pub fn for_each(&self, mut f: impl FnMut(usize, T)) {
        match *self {
            RowView::Sparse {
                indices, values, ..
            } => {
                for (&j, &x) in indices.iter().zip(values) {
                    f(j, x);
                }
            }
            RowView::Dense(x) => {
                for (j, &v) in x.iter().enumerate() {
                    f(j, v);
                }
            }
        }
    }
}

/// Inner product of a feature row with a dense vector.
pub fn dot<T: Scalar>(row: RowView<'_, T>, w: &[T]) -> T {
    row.dot(w)
}

#[derive(Clone, Debug, PartialEq)]
enum Design<T> {
    Sparse {
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<T>,
    },
    Dense {
        values: Vec<T>,
    },
}

/// Feature rows plus responses.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    design: Design<T>,
    labels: Vec<T>,
    p: usize,
}

impl<T: Scalar> Dataset<T> {
    /// Dense dataset from row-major `values` (`labels.len() * p` entries).
    pub fn dense(p: usize, values: Vec<T>, labels: Vec<T>) -> Result<Self> {
        if values.len() != labels.len() * p {
            return Err(Error::Invalid(format!(
                "expected {} values for {} rows of dim {p}, got {}",
                labels.len() * p,
                labels.len(),
                values.len()
            )));
        }
        if !crate::linalg::all_finite(&values) || !crate::linalg::all_finite(&labels) {
            return Err(Error::Invalid("non-finite entry in dataset".into()));
        }
        Ok(Self {
            design: Design::Dense { values },
            labels,
            p,
        })
    }

    pub fn from_dense_rows(rows: Vec<Vec<T>>, labels: Vec<T>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.len() != labels.len() {
            return Err(Error::Invalid("row count and label count differ".into()));
        }
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Invalid("dense rows have different lengths".into()));
        }
        Self::dense(p, rows.concat(), labels)
    }

    pub fn from_sparse_rows(rows: Vec<SparseRow<T>>, labels: Vec<T>, p: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Invalid("row count and label count differ".into()));
        }
        if !crate::linalg::all_finite(&labels) {
            return Err(Error::Invalid("non-finite label".into()));
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            if row.dim != p {
                return Err(Error::Invalid(format!(
                    "row {i} has dim {} but dataset dim is {p}",
                    row.dim
                )));
            }
            indices.extend(row.indices);
            values.extend(row.values);
            indptr.push(indices.len());
        }
        Ok(Self {
            design: Design::Sparse {
                indptr,
                indices,
                values,
            },
            labels,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.design, Design::Sparse { .. })
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> T {
        self.labels[i]
    }

    #[inline]
    pub fn row(&self, i: usize) -> RowView<'_, T> {
        assert!(
            i < self.n(),
            "sample index {i} out of range (n = {})",
            self.n()
        );
        match &self.design {
            Design::Sparse {
                indptr,
                indices,
                values,
            } => {
                let (a, b) = (indptr[i], indptr[i + 1]);
                RowView::Sparse {
                    indices: &indices[a..b],
                    values: &values[a..b],
                    dim: self.p,
                }
            }
            Design::Dense { values } => RowView::Dense(&values[i * self.p..(i + 1) * self.p]),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = RowView<'_, T>> + '_ {
        (0..self.n()).map(move |i| self.row(i))
    }

    pub fn nnz(&self) -> usize {
        match &self.design {
            Design::Sparse { values, .. } => values.len(),
            Design::Dense { values } => values.iter().filter(|v| !v.is_zero()).count(),
        }
    }

    /// `X w`
    pub fn margins(&self, w: &[T]) -> Vec<T> {
        self.rows().map(|r| r.dot(w)).collect()
    }

    /// `Σ_i coeffs[i] x_i`
    pub fn combine(&self, coeffs: &[T]) -> Vec<T> {
        assert_eq!(coeffs.len(), self.n());
        let mut out = vec![T::zero(); self.p];
        for (r, &c) in self.rows().zip(coeffs) {
            if !c.is_zero() {
                r.axpy_into(c, &mut out);
            }
        }
        out
    }

    /// Multiplies column `j` by `factors[j]`.
    pub fn scale_columns(&mut self, factors: &[T]) {
        assert_eq!(factors.len(), self.p);
        match &mut self.design {
            Design::Sparse {
                indices, values, ..
            } => {
                for (&j, v) in indices.iter().zip(values.iter_mut()) {
                    *v *= factors[j];
                }
            }
            Design::Dense { values } => {
                for row in values.chunks_mut(self.p.max(1)) {
                    for (v, &f) in row.iter_mut().zip(factors) {
                        *v *= f;
                    }
                }
            }
        }
    }

    pub fn column_sq_norms(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.p];
        for r in self.rows() {
            r.for_each(|j, x| out[j] += x * x);
        }
        out
    }

    pub fn to_sparse_rows(&self) -> Vec<SparseRow<T>> {
        self.rows()
            .map(|r| match r {
                RowView::Sparse {
                    indices,
                    values,
                    dim,
                } => SparseRow {
                    indices: indices.to_vec(),
                    values: values.to_vec(),
                    dim,
                },
                RowView::Dense(x) => SparseRow::from_dense(x),
            })
            .collect()
    }
}

/// Rescales columns so that `||X_j||₂ / √n ≤ 1` for every `j`.
///
/// Columns already within the bound (up to a few ulps) are untouched, which
/// makes the operation idempotent. Returns the per-column factors applied.
pub fn normalize_columns<T: Scalar>(d: &Dataset<T>) -> (Dataset<T>, Vec<T>) {
    let n = d.n();
    assert!(n >= 1, "normalize_columns needs at least one sample");
    let root_n = T::from_usize_lossy(n).sqrt();
    let slack = T::one() + T::lit(4.0) * T::epsilon();
    let factors: Vec<T> = d
        .column_sq_norms()
        .into_iter()
        .map(|sq| {
            let ratio = sq.sqrt() / root_n;
            if ratio > slack {
                T::one() / ratio
            } else {
                T::one()
            }
        })
        .collect();
    let mut out = d.clone();
    out.scale_columns(&factors);
    (out, factors)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses LIBSVM text (`<label> <idx>:<val> ...`, 1-based ascending indices).
///
/// Blank lines and `#` comments are skipped. Explicit zero values are dropped.
/// `dim` fixes the feature dimension; by default it is the largest index seen.
pub fn parse_libsvm<T: Scalar, R: BufRead>(reader: R, dim: Option<usize>) -> Result<Dataset<T>> {
    let mut rows: Vec<(Vec<usize>, Vec<T>)> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_ascii_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad label {label_tok:?}")))?;
        if !label.is_finite() {
            return Err(parse_err(lineno, "non-finite label"));
        }
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "indices are 1-based; found 0"));
            }
            if idx <= prev {
                return Err(parse_err(
                    lineno,
                    format!("indices not strictly ascending ({prev} then {idx})"),
                ));
            }
            prev = idx;
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad value {val:?}")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, "non-finite value"));
            }
            max_index = max_index.max(idx);
            if val != 0.0 {
                indices.push(idx - 1);
                values.push(T::lit(val));
            }
        }
        rows.push((indices, values));
        labels.push(T::lit(label));
    }
    let p = match dim {
        Some(p) if p < max_index => {
            return Err(Error::Invalid(format!(
                "explicit dimension {p} smaller than largest index {max_index}"
            )))
        }
        Some(p) => p,
        None => max_index,
    };
    let rows = rows
        .into_iter()
        .map(|(indices, values)| SparseRow {
            indices,
            values,
            dim: p,
        })
        .collect();
    Dataset::from_sparse_rows(rows, labels, p)
}

pub fn parse_libsvm_str<T: Scalar>(text: &str, dim: Option<usize>) -> Result<Dataset<T>> {
    parse_libsvm(text.as_bytes(), dim)
}

/// Reads a LIBSVM file, transparently decompressing gzip (detected by magic bytes).
pub fn read_libsvm_file<T: Scalar>(
    path: impl AsRef<Path>,
    dim: Option<usize>,
) -> Result<Dataset<T>> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let got = file.read(&mut magic)?;
    let head = std::io::Cursor::new(magic[..got].to_vec());
    let stream = head.chain(file);
    if got == 2 && magic == [0x1f, 0x8b] {
        parse_libsvm(BufReader::new(MultiGzDecoder::new(stream)), dim)
    } else {
        parse_libsvm(BufReader::new(stream), dim)
    }
}

/// Writes LIBSVM text. Values use the shortest representation that round-trips.
pub fn write_libsvm<T: Scalar, W: Write>(d: &Dataset<T>, mut out: W) -> Result<()> {
    for (i, row) in d.rows().enumerate() {
        write!(out, "{}", d.label(i))?;
        let mut res = Ok(());
        row.for_each(|j, x| {
            if res.is_ok() && !x.is_zero() {
                res = write!(out, " {}:{}", j + 1, x);
            }
        });
        res?;
        writeln!(out)?;
    }
    Ok(())
}
