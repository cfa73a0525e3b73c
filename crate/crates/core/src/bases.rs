//! Heisenberg–Weyl eigenbases in C^2 and C^3, product bases of C^2 ⊗ C^3,
//! and the orthonormality / mutual-unbiasedness predicates.

use std::fmt;

use crate::error::{Error, Result};
use crate::families::{FamilyId, FamilyParams};
use crate::linalg::{
    cis, inner, omega, omega_sq, tensor_product, CMatrix, Complex64, StateVector, Tolerance, I,
    ONE, ZERO,
};

/// Which Heisenberg–Weyl operator a basis diagonalizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HwLabel {
    Z,
    X,
    Y,
    W,
}

impl HwLabel {
    pub fn as_char(self) -> char {
        match self {
            HwLabel::Z => 'z',
            HwLabel::X => 'x',
            HwLabel::Y => 'y',
            HwLabel::W => 'w',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'z' => Some(HwLabel::Z),
            'x' => Some(HwLabel::X),
            'y' => Some(HwLabel::Y),
            'w' => Some(HwLabel::W),
            _ => None,
        }
    }
}

/// The 3x3 Fourier matrix `F3`.
pub fn fourier3() -> CMatrix {
    let (w, w2) = (omega(), omega_sq());
    hadamard3([[ONE, ONE, ONE], [ONE, w, w2], [ONE, w2, w]])
}

/// Eigenbasis matrix `H_y` with rows `(1, 1, 1)` first and the column order fixed below.
pub fn h_y() -> CMatrix {
    let (w, w2) = (omega(), omega_sq());
    hadamard3([[ONE, ONE, ONE], [w, w2, ONE], [w, ONE, w2]])
}

/// Eigenbasis matrix `H_w` with rows `(1, 1, 1)` first and the column order fixed below.
pub fn h_w() -> CMatrix {
    let (w, w2) = (omega(), omega_sq());
    hadamard3([[ONE, ONE, ONE], [w2, ONE, w], [w2, w, ONE]])
}

fn hadamard3(rows: [[Complex64; 3]; 3]) -> CMatrix {
    let s = Complex64::from(1.0 / 3f64.sqrt());
    CMatrix::from_fn(3, 3, |r, c| rows[r][c] * s)
}

/// Clock operator `Z = diag(1, w, w^2, ...)`.
pub fn clock(dim: usize) -> CMatrix {
    let diag: Vec<_> = (0..dim)
        .map(|k| cis(2.0 * std::f64::consts::PI * k as f64 / dim as f64))
        .collect();
    CMatrix::diag(&diag)
}

/// Shift operator `X|j> = |j+1 mod d>`; satisfies `ZX = w XZ`.
pub fn shift(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, c| if r == (c + 1) % dim { ONE } else { ZERO })
}

/// An ordered orthonormal basis, stored as the unitary whose columns are
/// the basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    matrix: CMatrix,
}

impl Basis {
    /// Validates that the columns are unit vectors and pairwise orthogonal.
    pub fn from_matrix(matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let cols = matrix.columns();
        for (k, col) in cols.iter().enumerate() {
            let n = inner(col, col).re.sqrt();
            if (n - 1.0).abs() > tol.eq_tol {
                return Err(Error::NotUnit(n));
            }
            for (j, other) in cols.iter().enumerate().take(k) {
                let o = inner(other, col).norm();
                if o * o > tol.eq_tol {
                    return Err(Error::NotABasis(j, k, o));
                }
            }
        }
        Ok(Basis { matrix })
    }

    pub fn from_vectors(vectors: &[StateVector], tol: &Tolerance) -> Result<Self> {
        let cols: Vec<Vec<Complex64>> = vectors.iter().map(|v| v.components().to_vec()).collect();
        Self::from_matrix(CMatrix::from_columns(&cols)?, tol)
    }

    /// Wraps a matrix the caller knows to be unitary.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Basis { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Basis {
            matrix: CMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn vector(&self, k: usize) -> StateVector {
        StateVector::from_raw(self.matrix.column(k))
    }

    pub fn vectors(&self) -> Vec<StateVector> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }
}

/// Eigenbasis of the labelled Heisenberg–Weyl operator in a fixed column order:
/// `(3, x)` is `F3`, `(3, y)` is `H_y`, `(3, w)` is `H_w`; in C^2 the x and
/// y bases are `(1, ±1)/√2` and `(1, ±i)/√2`.
pub fn hw_eigenbasis(dim: usize, label: HwLabel) -> Result<Basis> {
    let s2 = Complex64::from(1.0 / 2f64.sqrt());
    let matrix = match (dim, label) {
        (2 | 3, HwLabel::Z) => CMatrix::identity(dim),
        (2, HwLabel::X) => CMatrix::from_rows(&[vec![s2, s2], vec![s2, -s2]])?,
        (2, HwLabel::Y) => CMatrix::from_rows(&[vec![s2, s2], vec![I * s2, -I * s2]])?,
        (3, HwLabel::X) => fourier3(),
        (3, HwLabel::Y) => h_y(),
        (3, HwLabel::W) => h_w(),
        (2, _) => {
            return Err(Error::InvalidLabel {
                dim,
                label: label.as_char(),
            })
        }
        _ => return Err(Error::UnsupportedDimension(dim)),
    };
    Ok(Basis::from_matrix_unchecked(matrix))
}

/// A named single-party state, e.g. `1_x` or `R J_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledState {
    pub name: String,
    pub state: StateVector,
}

impl LabeledState {
    pub fn new(name: impl Into<String>, state: StateVector) -> Self {
        LabeledState {
            name: name.into(),
            state,
        }
    }

    /// The `index`-th vector of a Heisenberg–Weyl basis, named `j_a` (C^2)
    /// or `J_a` (C^3) with the index substituted.
    pub fn hw(dim: usize, label: HwLabel, index: usize) -> Result<Self> {
        let basis = hw_eigenbasis(dim, label)?;
        Ok(LabeledState::new(
            format!("{index}_{}", label.as_char()),
            basis.vector(index),
        ))
    }
}

/// Product label `|psi, Psi>`: a C^2 factor followed by a C^3 factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductLabel {
    pub factor2: LabeledState,
    pub factor3: LabeledState,
}

impl ProductLabel {
    pub fn new(factor2: LabeledState, factor3: LabeledState) -> Self {
        ProductLabel { factor2, factor3 }
    }

    pub fn vector(&self) -> Result<StateVector> {
        tensor_product(&self.factor2.state, &self.factor3.state)
    }
}

impl fmt::Display for ProductLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.factor2.name, self.factor3.name)
    }
}

/// Builds the basis whose k-th vector is the tensor product named by `labels[k]`.
pub fn product_basis(labels: &[ProductLabel], tol: &Tolerance) -> Result<Basis> {
    if labels.len() != 6 {
        return Err(Error::Shape(format!(
            "a product basis of C^6 needs 6 labels, got {}",
            labels.len()
        )));
    }
    let vectors = labels
        .iter()
        .map(ProductLabel::vector)
        .collect::<Result<Vec<_>>>()?;
    Basis::from_vectors(&vectors, tol)
}

/// Gram matrix within `eq_tol` of the identity.
pub fn is_orthonormal(basis: &Basis, tol: &Tolerance) -> bool {
    basis
        .matrix
        .unitarity_defect()
        .is_ok_and(|d| d <= tol.eq_tol)
}

/// Outcome of an unbiasedness check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuReport {
    pub is_mu: bool,
    /// `max | |<a_j|b_k>|^2 - 1/d |`.
    pub worst_deviation: f64,
    /// `(j, k)` at which the worst deviation occurs.
    pub worst_index: (usize, usize),
}

pub fn is_mu_pair(a: &Basis, b: &Basis, tol: &Tolerance) -> Result<MuReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let d = a.dim();
    let target = 1.0 / d as f64;
    let cross = &a.matrix.adjoint() * &b.matrix;
    let mut worst = (0.0, (0, 0));
    for j in 0..d {
        for k in 0..d {
            let dev = (cross[(j, k)].norm_sqr() - target).abs();
            if dev > worst.0 {
                worst = (dev, (j, k));
            }
        }
    }
    Ok(MuReport {
        is_mu: worst.0 <= tol.mu_tol,
        worst_deviation: worst.0,
        worst_index: worst.1,
    })
}

/// Certificate that `a_k = e^{i phases[k]} b_{permutation[k]}` for every k.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseWitness {
    pub permutation: Vec<usize>,
    pub phases: Vec<f64>,
}

/// Searches column permutations and per-column phases relating two bases.
pub fn same_basis_up_to_phase(a: &Basis, b: &Basis, tol: &Tolerance) -> Option<PhaseWitness> {
    if a.dim() != b.dim() {
        return None;
    }
    let d = a.dim();
    let acols = a.matrix.columns();
    let bcols = b.matrix.columns();
    // candidates[k] lists (j, theta) with a_k = e^{i theta} b_j entrywise
    let candidates: Vec<Vec<(usize, f64)>> = acols
        .iter()
        .map(|ak| {
            bcols
                .iter()
                .enumerate()
                .filter_map(|(j, bj)| {
                    let ov = inner(bj, ak);
                    if ov.norm() < 0.5 {
                        return None;
                    }
                    let theta = ov.arg();
                    let ph = cis(theta);
                    let close = ak
                        .iter()
                        .zip(bj)
                        .all(|(x, y)| (x - ph * y).norm() <= tol.eq_tol);
                    close.then_some((j, theta))
                })
                .collect()
        })
        .collect();

    fn assign(
        k: usize,
        candidates: &[Vec<(usize, f64)>],
        used: &mut [bool],
        perm: &mut Vec<usize>,
        phases: &mut Vec<f64>,
    ) -> bool {
        if k == candidates.len() {
            return true;
        }
        for &(j, theta) in &candidates[k] {
            if used[j] {
                continue;
            }
            used[j] = true;
            perm.push(j);
            phases.push(theta);
            if assign(k + 1, candidates, used, perm, phases) {
                return true;
            }
            used[j] = false;
            perm.pop();
            phases.pop();
        }
        false
    }

    let mut used = vec![false; d];
    let mut perm = Vec::with_capacity(d);
    let mut phases = Vec::with_capacity(d);
    assign(0, &candidates, &mut used, &mut perm, &mut phases).then_some(PhaseWitness {
        permutation: perm,
        phases,
    })
}

/// Where a pair came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub family: FamilyId,
    pub params: FamilyParams,
}

/// Product labels for both members, in column order.
#[derive(Clone, Debug, PartialEq)]
pub struct PairLabels {
    pub first: Vec<ProductLabel>,
    pub second: Vec<ProductLabel>,
}

/// Two mutually unbiased bases of the same dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MuPair {
    pub first: Basis,
    pub second: Basis,
    pub provenance: Option<Provenance>,
    pub labels: Option<PairLabels>,
}

impl MuPair {
    pub fn new(first: Basis, second: Basis, tol: &Tolerance) -> Result<Self> {
        let report = is_mu_pair(&first, &second, tol)?;
        if !report.is_mu {
            return Err(Error::NotMutuallyUnbiased(report.worst_deviation));
        }
        Ok(MuPair {
            first,
            second,
            provenance: None,
            labels: None,
        })
    }

    /// Builds a pair from two matrices, validating both bases and unbiasedness.
    pub fn from_matrices(first: CMatrix, second: CMatrix, tol: &Tolerance) -> Result<Self> {
        Self::new(
            Basis::from_matrix(first, tol)?,
            Basis::from_matrix(second, tol)?,
            tol,
        )
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn with_labels(mut self, labels: PairLabels) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    pub fn report(&self, tol: &Tolerance) -> MuReport {
        is_mu_pair(&self.first, &self.second, tol).expect("pair members share a dimension")
    }

    /// All `2d` basis vectors, first member then second.
    pub fn all_vectors(&self) -> Vec<StateVector> {
        let mut v = self.first.vectors();
        v.extend(self.second.vectors());
        v
    }
}
