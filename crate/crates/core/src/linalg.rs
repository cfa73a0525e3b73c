//! Small dense complex linear algebra.
//!
//! Everything here is sized for d <= 6: matrices are row-major `Vec`s and
//! every operation returns a fresh value. Comparisons go through
//! [`Tolerance`], never through exact float equality.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::ops::{Index, Mul};

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar type for all amplitudes and matrix entries.
pub type ComplexScalar = Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Unit-modulus phase factor `e^{i theta}`.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Primitive third root of unity, computed from the exact angle.
pub fn omega() -> Complex64 {
    cis(2.0 * PI / 3.0)
}

/// `omega^2`, computed from its own angle rather than by squaring.
pub fn omega_sq() -> Complex64 {
    cis(4.0 * PI / 3.0)
}

/// Comparison thresholds shared by every predicate in the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Entrywise absolute comparison.
    pub eq_tol: f64,
    /// Allowed deviation of `|<a|b>|^2` from its target.
    pub mu_tol: f64,
    /// `|<u|v>|` at or below this counts as orthogonal.
    pub ortho_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-10,
            mu_tol: 1e-9,
            ortho_tol: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, mu_tol: f64, ortho_tol: f64) -> Result<Self> {
        for (name, value) in [("eq_tol", eq_tol), ("mu_tol", mu_tol), ("ortho_tol", ortho_tol)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::ParameterRange {
                    name,
                    value,
                    reason: "tolerances must be finite and strictly positive",
                });
            }
        }
        Ok(Tolerance {
            eq_tol,
            mu_tol,
            ortho_tol,
        })
    }
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `<u|v>` with the conjugate on the left argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A unit vector in C^2, C^3 or C^6.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    components: Vec<Complex64>,
}

impl StateVector {
    /// Checks dimension, finiteness and unit norm (within the default `eq_tol`).
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        Self::check_dim(components.len())?;
        check_finite(&components)?;
        let n = norm(&components);
        if (n - 1.0).abs() > Tolerance::default().eq_tol {
            return Err(Error::NotUnit(n));
        }
        Ok(StateVector { components })
    }

    /// Rescales to unit norm; the zero vector is rejected.
    pub fn normalized(mut components: Vec<Complex64>) -> Result<Self> {
        Self::check_dim(components.len())?;
        check_finite(&components)?;
        let n = norm(&components);
        if n == 0.0 {
            return Err(Error::NotUnit(0.0));
        }
        components.iter_mut().for_each(|z| *z /= n);
        Ok(StateVector { components })
    }

    /// Standard basis vector `e_k`.
    pub fn basis_vector(dim: usize, k: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        if k >= dim {
            return Err(Error::Shape(format!("index {k} out of range for dimension {dim}")));
        }
        let mut components = vec![ZERO; dim];
        components[k] = ONE;
        Ok(StateVector { components })
    }

    pub(crate) fn from_raw(components: Vec<Complex64>) -> Self {
        StateVector { components }
    }

    fn check_dim(dim: usize) -> Result<()> {
        match dim {
            2 | 3 | 6 => Ok(()),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Complex64> {
        self.components
    }

    pub fn scaled(&self, phase: Complex64) -> StateVector {
        StateVector {
            components: self.components.iter().map(|z| z * phase).collect(),
        }
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.components[i]
    }
}

/// `u ⊗ v` for `u` in C^m, `v` in C^n with m, n in {2, 3}; component
/// `i * n + j` is `u_i v_j`.
pub fn tensor_product(u: &StateVector, v: &StateVector) -> Result<StateVector> {
    for d in [u.dim(), v.dim()] {
        if d != 2 && d != 3 {
            return Err(Error::UnsupportedDimension(d));
        }
    }
    let components = u
        .components
        .iter()
        .flat_map(|a| v.components.iter().map(move |b| a * b))
        .collect();
    Ok(StateVector { components })
}

/// `|<u|v>|^2`.
pub fn overlap_sq(u: &StateVector, v: &StateVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(inner(&u.components, &v.components).norm_sqr())
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(nrows: usize, ncols: usize, data: Vec<Complex64>) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::Shape(format!("{nrows}x{ncols} has an empty side")));
        }
        if data.len() != nrows * ncols {
            return Err(Error::Shape(format!(
                "{} entries for a {nrows}x{ncols} matrix",
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(CMatrix { nrows, ncols, data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..nrows)
            .flat_map(|r| (0..ncols).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        CMatrix { nrows, ncols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(rows.len(), ncols, rows.concat())
    }

    /// Matrix whose k-th column is `columns[k]`.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let nrows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != nrows) {
            return Err(Error::Shape("ragged columns".into()));
        }
        let m = Self::from_fn(nrows, columns.len(), |r, c| columns[c][r]);
        Self::new(m.nrows, m.ncols, m.data)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_fn(nrows, ncols, |_, _| ZERO)
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { ZERO })
    }

    /// `[[a, b], [c, d]]` assembled from equally sized square blocks.
    pub fn block2x2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Result<Self> {
        let n = a.nrows;
        for m in [a, b, c, d] {
            if m.nrows != n || m.ncols != n {
                return Err(Error::Shape("block2x2 needs equal square blocks".into()));
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |r, col| {
            let blk = match (r < n, col < n) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk[(r % n, col % n)]
        }))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> Vec<Complex64> {
        self.data[r * self.ncols..(r + 1) * self.ncols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.nrows).map(|r| self[(r, c)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.ncols).map(|c| self.column(c)).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> CMatrix {
        CMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        self.map(|z| z * s)
    }

    pub fn transpose(&self) -> CMatrix {
        Self::from_fn(self.ncols, self.nrows, |r, c| self[(c, r)])
    }

    pub fn conjugate(&self) -> CMatrix {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.ncols, self.nrows, |r, c| self[(c, r)].conj())
    }

    pub fn try_matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.ncols != rhs.nrows {
            return Err(Error::DimensionMismatch {
                left: self.ncols,
                right: rhs.nrows,
            });
        }
        Ok(Self::from_fn(self.nrows, rhs.ncols, |r, c| {
            (0..self.ncols).map(|k| self[(r, k)] * rhs[(k, c)]).sum()
        }))
    }

    /// Output row `i` is input row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> CMatrix {
        Self::from_fn(self.nrows, self.ncols, |r, c| self[(perm[r], c)])
    }

    /// Output column `k` is input column `perm[k]`.
    pub fn permute_cols(&self, perm: &[usize]) -> CMatrix {
        Self::from_fn(self.nrows, self.ncols, |r, c| self[(r, perm[c])])
    }

    /// Row `i` multiplied by `factors[i]`, i.e. `diag(factors) * self`.
    pub fn scale_rows(&self, factors: &[Complex64]) -> CMatrix {
        Self::from_fn(self.nrows, self.ncols, |r, c| factors[r] * self[(r, c)])
    }

    /// Column `k` multiplied by `factors[k]`, i.e. `self * diag(factors)`.
    pub fn scale_cols(&self, factors: &[Complex64]) -> CMatrix {
        Self::from_fn(self.nrows, self.ncols, |r, c| self[(r, c)] * factors[c])
    }

    /// Largest entrywise `|a - b|`; infinite for mismatched shapes.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// `max |M^dag M - I|` over entries.
    pub fn unitarity_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.nrows,
                cols: self.ncols,
            });
        }
        let gram = &self.adjoint() * self;
        Ok(gram.max_abs_diff(&CMatrix::identity(self.nrows)))
    }

    /// All entries of modulus `1/sqrt(d)` and unitary.
    pub fn is_hadamard(&self, tol: &Tolerance) -> bool {
        if !self.is_square() {
            return false;
        }
        let target = 1.0 / (self.nrows as f64).sqrt();
        self.data.iter().all(|z| (z.norm() - target).abs() <= tol.eq_tol)
            && self.unitarity_defect().is_ok_and(|d| d <= tol.eq_tol)
    }

    /// Renders the shared matrix text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.nrows, self.ncols);
        for r in 0..self.nrows {
            let row: Vec<String> = (0..self.ncols).map(|c| format_complex(self[(r, c)])).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parses the shared matrix text format: a `rows cols` header, then one
    /// line per row of `re{+|-}imj` entries.
    pub fn parse_text(text: &str) -> Result<CMatrix> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: hline + 1,
                msg: format!("bad header: {e}"),
            })?;
        let [nrows, ncols] = dims[..] else {
            return Err(Error::Parse {
                line: hline + 1,
                msg: "header must be 'rows cols'".into(),
            });
        };
        let mut data = Vec::with_capacity(nrows * ncols);
        let mut seen_rows = 0;
        for (idx, line) in lines {
            let row: Vec<Complex64> = line
                .split_whitespace()
                .map(|tok| {
                    parse_complex(tok).ok_or_else(|| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad entry '{tok}'"),
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != ncols {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {ncols} entries, found {}", row.len()),
                });
            }
            data.extend(row);
            seen_rows += 1;
        }
        if seen_rows != nrows {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("expected {nrows} rows, found {seen_rows}"),
            });
        }
        CMatrix::new(nrows, ncols, data)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.ncols + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    /// Panics on incompatible shapes; use [`CMatrix::try_matmul`] for a checked product.
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_matmul(rhs).expect("incompatible matrix shapes")
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Checks `max |M^dag M - I| <= eq_tol`.
pub fn is_unitary(m: &CMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(m.unitarity_defect()? <= tol.eq_tol)
}

/// `re{sign}imj` with shortest round-trip float formatting.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}j", z.re, sign, z.im.abs())
}

pub fn parse_complex(tok: &str) -> Option<Complex64> {
    let body = tok.strip_suffix('j')?;
    let bytes = body.as_bytes();
    // split at the last sign that is neither leading nor an exponent sign
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}
