//! Equivalence moves on pairs of bases and the reductions of the product
//! pairs to standard form `{I, H}`.
//!
//! A [`TransformScript`] is an ordered list of [`Move`]s. Every move acts on
//! both members of a pair (left multiplications, transpose, conjugate) or on
//! one member's columns (right multiplications), so unbiasedness is preserved.
//! [`apply_script`] re-checks that after every move.

use std::f64::consts::PI;

use crate::bases::{
    fourier3, h_w, h_y, is_mu_pair, same_basis_up_to_phase, Basis, MuPair, PhaseWitness,
};
use crate::error::{Error, Result};
use crate::families::{block_diag_lower, make_family_pair, make_ftilde, make_s, FamilyParams};
use crate::linalg::{cis, CMatrix, Complex64, Tolerance, I};

const TWO_PI: f64 = 2.0 * PI;

/// Which member of a pair a column move acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Member {
    First,
    Second,
}

/// One elementary equivalence move. Permutations are 0-based
/// (output index `i` takes input index `perm[i]`); phases are in turns,
/// i.e. the factor is `e^{2 pi i t}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Move {
    /// Rows of both members.
    PermuteRows { perm: Vec<usize> },
    PermuteCols { member: Member, perm: Vec<usize> },
    /// `diag(e^{2 pi i t}) * M` on both members.
    LeftDiagPhase { turns: Vec<f64> },
    /// `M * diag(e^{2 pi i t})` on one member.
    RightDiagPhase { member: Member, turns: Vec<f64> },
    /// `U * M` on both members.
    LeftUnitary { matrix: CMatrix },
    TransposeBoth,
    ConjugateBoth,
    SwapMembers,
}

impl Move {
    pub fn kind(&self) -> &'static str {
        match self {
            Move::PermuteRows { .. } => "permute-rows",
            Move::PermuteCols { .. } => "permute-cols",
            Move::LeftDiagPhase { .. } => "left-diag-phase",
            Move::RightDiagPhase { .. } => "right-diag-phase",
            Move::LeftUnitary { .. } => "left-unitary",
            Move::TransposeBoth => "transpose-both",
            Move::ConjugateBoth => "conjugate-both",
            Move::SwapMembers => "swap-members",
        }
    }

    /// Transposition of two 0-based indices in dimension `dim`.
    pub fn swap_rows(dim: usize, a: usize, b: usize) -> Move {
        Move::PermuteRows {
            perm: transposition(dim, a, b),
        }
    }

    pub fn swap_cols(member: Member, dim: usize, a: usize, b: usize) -> Move {
        Move::PermuteCols {
            member,
            perm: transposition(dim, a, b),
        }
    }

    fn validate(&self, dim: usize, index: usize, tol: &Tolerance) -> Result<()> {
        let invalid = |reason: String| Error::InvalidMove { index, reason };
        match self {
            Move::PermuteRows { perm } | Move::PermuteCols { perm, .. } => {
                let mut seen = vec![false; dim];
                if perm.len() != dim {
                    return Err(invalid(format!("permutation of length {} in dimension {dim}", perm.len())));
                }
                for &p in perm {
                    if p >= dim || std::mem::replace(&mut seen[p], true) {
                        return Err(invalid(format!("{perm:?} is not a permutation")));
                    }
                }
            }
            Move::LeftDiagPhase { turns } | Move::RightDiagPhase { turns, .. } => {
                if turns.len() != dim || turns.iter().any(|t| !t.is_finite()) {
                    return Err(invalid(format!("need {dim} finite phases")));
                }
            }
            Move::LeftUnitary { matrix } => {
                if matrix.nrows() != dim || matrix.ncols() != dim {
                    return Err(invalid(format!(
                        "{}x{} matrix in dimension {dim}",
                        matrix.nrows(),
                        matrix.ncols()
                    )));
                }
                let defect = matrix.unitarity_defect()?;
                if defect > tol.eq_tol {
                    return Err(invalid(format!("matrix is not unitary (defect {defect:e})")));
                }
            }
            Move::TransposeBoth | Move::ConjugateBoth | Move::SwapMembers => {}
        }
        Ok(())
    }

    /// Applies the move without validation.
    fn act(&self, first: &CMatrix, second: &CMatrix) -> (CMatrix, CMatrix) {
        let on = |member: Member, f: &dyn Fn(&CMatrix) -> CMatrix| match member {
            Member::First => (f(first), second.clone()),
            Member::Second => (first.clone(), f(second)),
        };
        match self {
            Move::PermuteRows { perm } => (first.permute_rows(perm), second.permute_rows(perm)),
            Move::PermuteCols { member, perm } => on(*member, &|m| m.permute_cols(perm)),
            Move::LeftDiagPhase { turns } => {
                let f = phase_factors(turns);
                (first.scale_rows(&f), second.scale_rows(&f))
            }
            Move::RightDiagPhase { member, turns } => {
                let f = phase_factors(turns);
                on(*member, &|m| m.scale_cols(&f))
            }
            Move::LeftUnitary { matrix } => (matrix * first, matrix * second),
            Move::TransposeBoth => (first.transpose(), second.transpose()),
            Move::ConjugateBoth => (first.conjugate(), second.conjugate()),
            Move::SwapMembers => (second.clone(), first.clone()),
        }
    }
}

fn transposition(dim: usize, a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..dim).collect();
    p.swap(a, b);
    p
}

/// Turns from an angle, with rounding noise around zero removed.
fn turns_of(theta: f64) -> f64 {
    let t = theta / TWO_PI;
    if t.abs() < 1e-14 {
        0.0
    } else {
        t
    }
}

fn phase_factors(turns: &[f64]) -> Vec<Complex64> {
    turns.iter().map(|t| cis(TWO_PI * t)).collect()
}

/// Ordered, replayable list of moves.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TransformScript {
    pub moves: Vec<Move>,
}

impl TransformScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, mv: Move) {
        self.moves.push(mv);
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn then(mut self, other: TransformScript) -> Self {
        self.moves.extend(other.moves);
        self
    }
}

impl FromIterator<Move> for TransformScript {
    fn from_iter<T: IntoIterator<Item = Move>>(iter: T) -> Self {
        TransformScript {
            moves: iter.into_iter().collect(),
        }
    }
}

/// Applies `script` move by move, checking after every move that both
/// members are still orthonormal bases and that the pair is still unbiased.
pub fn apply_script(pair: &MuPair, script: &TransformScript, tol: &Tolerance) -> Result<MuPair> {
    let dim = pair.dim();
    let mut first = pair.first.matrix().clone();
    let mut second = pair.second.matrix().clone();
    for (index, mv) in script.moves.iter().enumerate() {
        mv.validate(dim, index, tol)?;
        (first, second) = mv.act(&first, &second);
        let broken = |what: String| Error::InvalidMove { index, reason: what };
        for m in [&first, &second] {
            let defect = m.unitarity_defect()?;
            if defect > tol.eq_tol {
                return Err(broken(format!("member no longer unitary (defect {defect:e})")));
            }
        }
        let report = is_mu_pair(
            &Basis::from_matrix_unchecked(first.clone()),
            &Basis::from_matrix_unchecked(second.clone()),
            tol,
        )?;
        if !report.is_mu {
            return Err(broken(format!(
                "pair no longer unbiased (deviation {:e})",
                report.worst_deviation
            )));
        }
    }
    Ok(MuPair {
        first: Basis::from_matrix_unchecked(first),
        second: Basis::from_matrix_unchecked(second),
        provenance: pair.provenance.clone(),
        labels: None,
    })
}

/// Column moves on `member` turning `current` into `target`, derived from a
/// phase witness. Fails when the two are not equal as bases up to phases.
pub fn align_columns(
    member: Member,
    current: &CMatrix,
    target: &CMatrix,
    tol: &Tolerance,
) -> Result<Vec<Move>> {
    let cur = Basis::from_matrix(current.clone(), tol)?;
    let tgt = Basis::from_matrix(target.clone(), tol)?;
    let PhaseWitness {
        permutation,
        phases,
    } = same_basis_up_to_phase(&cur, &tgt, tol).ok_or_else(|| Error::InvalidMove {
        index: 0,
        reason: "columns cannot be aligned with the target basis".into(),
    })?;
    // current_k = e^{i phases[k]} target_{permutation[k]}
    let dim = permutation.len();
    let mut perm = vec![0; dim];
    let mut turns = vec![0.0; dim];
    for (k, &r) in permutation.iter().enumerate() {
        perm[r] = k;
        turns[r] = turns_of(-phases[k]);
    }
    let mut moves = Vec::new();
    if perm.iter().enumerate().any(|(i, &p)| i != p) {
        moves.push(Move::PermuteCols { member, perm });
    }
    if turns.iter().any(|&t| t != 0.0) {
        moves.push(Move::RightDiagPhase { member, turns });
    }
    Ok(moves)
}

fn run(first: &CMatrix, second: &CMatrix, moves: &[Move]) -> (CMatrix, CMatrix) {
    moves
        .iter()
        .fold((first.clone(), second.clone()), |(a, b), mv| mv.act(&a, &b))
}

/// Brings a complex Hadamard matrix to dephased form (first row and column
/// real positive). The script acts on the pair `{I, H}` and leaves the
/// identity in place.
pub fn dephase(h: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, TransformScript)> {
    if !h.is_hadamard(tol) {
        return Err(Error::NotHadamard);
    }
    let d = h.nrows();
    let row_turns: Vec<f64> = (0..d).map(|i| turns_of(-h[(i, 0)].arg())).collect();
    let mut moves = vec![Move::LeftDiagPhase {
        turns: row_turns.clone(),
    }];
    moves.push(Move::RightDiagPhase {
        member: Member::First,
        turns: row_turns.iter().map(|&t| if t == 0.0 { 0.0 } else { -t }).collect(),
    });
    let (_, rows_fixed) = run(&CMatrix::identity(d), h, &moves);
    moves.push(Move::RightDiagPhase {
        member: Member::Second,
        turns: (0..d).map(|k| turns_of(-rows_fixed[(0, k)].arg())).collect(),
    });
    let (_, out) = run(&CMatrix::identity(d), h, &moves);
    Ok((out, moves.into_iter().collect()))
}

/// Reduces `P1 = {I, Ftilde^T(xi, eta)}` to `{I, Ftilde(xi, eta)}` by
/// swapping the members, conjugating, and multiplying by `Ftilde` from the
/// left (the inverse of the chain that produces P1 from `{I, Ftilde}`).
pub fn reduce_p1(xi: f64, eta: f64, tol: &Tolerance) -> Result<(MuPair, TransformScript)> {
    let pair = make_family_pair(FamilyParams::P1 { xi, eta }, tol)?;
    let script: TransformScript = [
        Move::SwapMembers,
        Move::ConjugateBoth,
        Move::LeftUnitary {
            matrix: make_ftilde(xi, eta),
        },
    ]
    .into_iter()
    .collect();
    let out = apply_script(&pair, &script, tol)?;
    Ok((out, script))
}

/// Column order taking `Ftilde` (after swapping rows 2 and 5) to the Fourier
/// family: positions 2, 3, 5, 6 receive columns 6, 2, 3, 5 (1-based).
const FOURIER_COLUMN_ORDER: [usize; 6] = [0, 5, 1, 3, 2, 4];

/// Turns `{I, Ftilde(xi, eta)}` into `{I, F(xi, eta)}`: swap rows 2 and 5,
/// reorder the columns of the second member, then restore the identity with
/// a column permutation of the first member.
pub fn ftilde_to_fourier(xi: f64, eta: f64, tol: &Tolerance) -> Result<(CMatrix, TransformScript)> {
    let first = CMatrix::identity(6);
    let second = make_ftilde(xi, eta);
    let mut moves = vec![
        Move::swap_rows(6, 1, 4),
        Move::PermuteCols {
            member: Member::Second,
            perm: FOURIER_COLUMN_ORDER.to_vec(),
        },
    ];
    let (a, _) = run(&first, &second, &moves);
    moves.extend(align_columns(Member::First, &a, &first, tol)?);
    let pair = MuPair::from_matrices(first, second, tol)?;
    let script: TransformScript = moves.into_iter().collect();
    let out = apply_script(&pair, &script, tol)?;
    Ok((out.second.into_matrix(), script))
}

/// The Fourier family `F(xi, eta)` as produced by [`ftilde_to_fourier`].
pub fn fourier_family(xi: f64, eta: f64) -> CMatrix {
    ftilde_to_fourier(xi, eta, &Tolerance::default())
        .expect("the Fourier reordering is valid for all angles")
        .0
}

/// Reduces `P3 = {Itilde(zeta, chi), Ftilde(sigma, tau)}` to
/// `{I, Ftilde(sigma - zeta, tau - chi)}` with the block inverse of the
/// first member.
pub fn reduce_p3(
    zeta: f64,
    chi: f64,
    sigma: f64,
    tau: f64,
    tol: &Tolerance,
) -> Result<(MuPair, TransformScript)> {
    let pair = make_family_pair(
        FamilyParams::P3 {
            zeta,
            chi,
            sigma,
            tau,
        },
        tol,
    )?;
    let script: TransformScript = std::iter::once(Move::LeftUnitary {
        matrix: block_diag_lower(&make_s(zeta, chi).adjoint()),
    })
    .collect();
    let out = apply_script(&pair, &script, tol)?;
    Ok((out, script))
}

/// Reduces the isolated pair P2 to `{I, S6}`.
///
/// Fixed order: align the lower block of the first member with `-i H_y`,
/// multiply by `diag(I3, i H_y^dag)`, swap rows 2<->3 and 4<->5, swap
/// columns 2<->6, 3<->5, 4<->5 of the second member, multiply rows 4 and 6
/// by `omega^2`, then undo the effect on the first member with column moves.
/// Indices are 1-based here as in the recorded script.
pub fn reduce_p2(tol: &Tolerance) -> Result<(MuPair, TransformScript)> {
    let pair = make_family_pair(FamilyParams::P2, tol)?;
    let first = pair.first.matrix();
    let second = pair.second.matrix();

    let block_first = block_diag_lower(&h_y().scale(-I));
    let mut moves = align_columns(Member::First, first, &block_first, tol)?;
    moves.push(Move::LeftUnitary {
        matrix: block_diag_lower(&h_y().adjoint().scale(I)),
    });
    moves.push(Move::swap_rows(6, 1, 2));
    moves.push(Move::swap_rows(6, 3, 4));
    moves.push(Move::swap_cols(Member::Second, 6, 1, 5));
    moves.push(Move::swap_cols(Member::Second, 6, 2, 4));
    moves.push(Move::swap_cols(Member::Second, 6, 3, 4));
    moves.push(Move::LeftDiagPhase {
        turns: vec![0.0, 0.0, 0.0, 2.0 / 3.0, 0.0, 2.0 / 3.0],
    });
    let (a, _) = run(first, second, &moves);
    moves.extend(align_columns(Member::First, &a, &CMatrix::identity(6), tol)?);

    let script: TransformScript = moves.into_iter().collect();
    let out = apply_script(&pair, &script, tol)?;
    Ok((out, script))
}

/// The intermediate `S6~`: the second member of P2 after the first member
/// has been mapped to the identity.
pub fn s6_tilde() -> CMatrix {
    let s = Complex64::from(1.0 / 2f64.sqrt());
    let u = h_y().adjoint().scale(I);
    let lower_left = &u * &fourier3();
    let lower_right = &u * &h_w();
    CMatrix::block2x2(
        &fourier3().scale(s),
        &h_w().scale(s),
        &lower_left.scale(s),
        &lower_right.scale(-s),
    )
    .expect("3x3 blocks")
}

/// Standard form `{I, H}` of any family member, with the full script.
/// P0, P1 and P3 end in the Fourier family; P2 ends in Tao's matrix.
pub fn standard_form(params: FamilyParams, tol: &Tolerance) -> Result<(MuPair, TransformScript)> {
    let (ftilde_pair, script, angles) = match params {
        FamilyParams::P2 => return reduce_p2(tol),
        FamilyParams::P0 => (make_family_pair(params, tol)?, TransformScript::new(), (0.0, 0.0)),
        FamilyParams::P1 { xi, eta } => {
            let (p, s) = reduce_p1(xi, eta, tol)?;
            (p, s, (xi, eta))
        }
        FamilyParams::P3 {
            zeta,
            chi,
            sigma,
            tau,
        } => {
            let (p, s) = reduce_p3(zeta, chi, sigma, tau, tol)?;
            (p, s, (sigma - zeta, tau - chi))
        }
    };
    let (_, fourier_moves) = ftilde_to_fourier(angles.0, angles.1, tol)?;
    let out = apply_script(&ftilde_pair, &fourier_moves, tol)?;
    Ok((out, script.then(fourier_moves)))
}

/// Rounding quantum for fingerprint values.
pub const FINGERPRINT_QUANTUM: f64 = 1e-8;

/// Sorted multiset of Haagerup invariants
/// `d^2 h_ij h_kl conj(h_il) conj(h_kj)`, rounded to [`FINGERPRINT_QUANTUM`].
///
/// Invariant under row/column permutations and diagonal phases, so unequal
/// fingerprints prove inequivalence. Equal fingerprints do not prove
/// equivalence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HadamardFingerprint {
    pub dim: usize,
    values: Vec<(i64, i64)>,
}

impl HadamardFingerprint {
    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values
            .iter()
            .map(|&(re, im)| Complex64::new(re as f64 * FINGERPRINT_QUANTUM, im as f64 * FINGERPRINT_QUANTUM))
    }

    /// Distinct invariant values, sorted.
    pub fn distinct(&self) -> Vec<Complex64> {
        let mut keys = self.values.clone();
        keys.dedup();
        keys.into_iter()
            .map(|(re, im)| Complex64::new(re as f64 * FINGERPRINT_QUANTUM, im as f64 * FINGERPRINT_QUANTUM))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn quantize(x: f64) -> i64 {
    let q = (x / FINGERPRINT_QUANTUM).round() as i64;
    // -0 and +0 are the same bucket
    if q == 0 {
        0
    } else {
        q
    }
}

pub fn haagerup_fingerprint(h: &CMatrix, tol: &Tolerance) -> Result<HadamardFingerprint> {
    if !h.is_hadamard(tol) {
        return Err(Error::NotHadamard);
    }
    let d = h.nrows();
    let scale = (d * d) as f64;
    let mut values = Vec::with_capacity(d.pow(4));
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let v = h[(i, j)] * h[(k, l)] * h[(i, l)].conj() * h[(k, j)].conj() * scale;
                    values.push((quantize(v.re), quantize(v.im)));
                }
            }
        }
    }
    values.sort_unstable();
    Ok(HadamardFingerprint { dim: d, values })
}

/// Row permutation and column permutation relating two Hadamard matrices
/// up to diagonal phases: `b ~ D1 a[row_perm][:, col_perm] D2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardEquivalence {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

/// Rows rephased so column `c0` is real positive, then columns rephased so
/// row 0 is real positive.
fn gauge(m: &CMatrix, c0: usize) -> CMatrix {
    let d = m.nrows();
    let rows: Vec<_> = (0..d).map(|i| cis(-m[(i, c0)].arg())).collect();
    let m = m.scale_rows(&rows);
    let cols: Vec<_> = (0..d).map(|k| cis(-m[(0, k)].arg())).collect();
    m.scale_cols(&cols)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Exhaustive equivalence test: every row permutation of `a` and every
/// choice of which column of `a` becomes column 0, with the remaining
/// column permutation found by matching gauge-fixed columns.
pub fn hadamard_equivalent(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Option<HadamardEquivalence> {
    if !a.is_hadamard(tol) || !b.is_hadamard(tol) || a.nrows() != b.nrows() {
        return None;
    }
    let d = a.nrows();
    let match_tol = 1e-6;
    let target = gauge(b, 0);
    let tcols = target.columns();
    for row_perm in permutations(d) {
        let ap = a.permute_rows(&row_perm);
        for c0 in 0..d {
            let g = gauge(&ap, c0);
            let mut used = vec![false; d];
            let mut col_perm = Vec::with_capacity(d);
            for tc in &tcols {
                let found = (0..d).find(|&k| {
                    !used[k] && g.column(k).iter().zip(tc).all(|(x, y)| (x - y).norm() <= match_tol)
                });
                match found {
                    Some(k) => {
                        used[k] = true;
                        col_perm.push(k);
                    }
                    None => break,
                }
            }
            if col_perm.len() == d {
                return Some(HadamardEquivalence { row_perm, col_perm });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyId;
    use crate::linalg::{omega, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn ftilde_pair(xi: f64, eta: f64) -> MuPair {
        MuPair::from_matrices(CMatrix::identity(6), make_ftilde(xi, eta), &tol()).unwrap()
    }

    fn random_moves(rng: &mut ChaCha8Rng, n: usize) -> Vec<Move> {
        (0..n)
            .map(|_| {
                let mut perm: Vec<usize> = (0..6).collect();
                for i in (1..6).rev() {
                    perm.swap(i, rng.random_range(0..=i));
                }
                let turns: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
                match rng.random_range(0..4) {
                    0 => Move::PermuteRows { perm },
                    1 => Move::PermuteCols { member: Member::Second, perm },
                    2 => Move::LeftDiagPhase { turns },
                    _ => Move::RightDiagPhase { member: Member::Second, turns },
                }
            })
            .collect()
    }

    #[test]
    fn empty_and_swap_scripts() {
        let pair = ftilde_pair(0.3, 0.9);
        let out = apply_script(&pair, &TransformScript::new(), &tol()).unwrap();
        assert_eq!(out.first, pair.first);
        assert_eq!(out.second, pair.second);
        let swapped = apply_script(&pair, &[Move::SwapMembers].into_iter().collect(), &tol()).unwrap();
        assert_eq!(swapped.first, pair.second);
        assert_eq!(swapped.second, pair.first);
    }

    #[test]
    fn forward_chain_produces_p1() {
        let (xi, eta) = (1.2, 4.0);
        let f = make_ftilde(xi, eta);
        let step = apply_script(
            &ftilde_pair(xi, eta),
            &[Move::LeftUnitary { matrix: f.adjoint() }].into_iter().collect(),
            &tol(),
        )
        .unwrap();
        assert!(step.first.matrix().approx_eq(&f.adjoint(), 1e-15));
        assert!(step.second.matrix().approx_eq(&CMatrix::identity(6), 1e-14));
        let p1 = apply_script(&step, &[Move::ConjugateBoth, Move::SwapMembers].into_iter().collect(), &tol()).unwrap();
        let expected = make_family_pair(FamilyParams::P1 { xi, eta }, &tol()).unwrap();
        assert!(p1.first.matrix().approx_eq(expected.first.matrix(), 1e-14));
        assert!(p1.second.matrix().approx_eq(expected.second.matrix(), 1e-14));
    }

    #[test]
    fn invalid_moves_are_rejected() {
        let pair = ftilde_pair(0.0, 0.0);
        let bad = [
            Move::PermuteRows { perm: vec![0, 0, 1, 2, 3, 4] },
            Move::PermuteCols { member: Member::First, perm: vec![0, 1, 2] },
            Move::LeftDiagPhase { turns: vec![0.0; 5] },
            Move::LeftUnitary { matrix: CMatrix::identity(6).scale(2.0.into()) },
            Move::LeftUnitary { matrix: CMatrix::identity(3) },
        ];
        for mv in bad {
            let script: TransformScript = [Move::SwapMembers, mv].into_iter().collect();
            assert!(matches!(
                apply_script(&pair, &script, &tol()),
                Err(Error::InvalidMove { index: 1, .. })
            ));
        }
    }

    #[test]
    fn transposing_a_non_standard_pair_can_break_unbiasedness() {
        let pair = make_family_pair(FamilyParams::P3 { zeta: 0.4, chi: 2.0, sigma: 1.0, tau: 2.0 }, &tol()).unwrap();
        let r = apply_script(&pair, &[Move::TransposeBoth].into_iter().collect(), &tol());
        assert!(matches!(r, Err(Error::InvalidMove { index: 0, .. })));
        // standard pairs survive transposition
        assert!(apply_script(&ftilde_pair(1.0, 2.0), &[Move::TransposeBoth].into_iter().collect(), &tol()).is_ok());
    }

    #[test]
    fn dephase_examples() {
        let f3 = fourier3();
        let (out, _) = dephase(&f3, &tol()).unwrap();
        assert!(out.approx_eq(&f3, 1e-15));

        let rotated = f3.scale_rows(&[ONE, omega(), ONE]);
        let (out, script) = dephase(&rotated, &tol()).unwrap();
        assert!(out.approx_eq(&f3, 1e-15));
        let pair = MuPair::from_matrices(CMatrix::identity(3), rotated, &tol()).unwrap();
        let replay = apply_script(&pair, &script, &tol()).unwrap();
        assert!(replay.first.matrix().approx_eq(&CMatrix::identity(3), 1e-15));

        let (out, _) = dephase(&make_ftilde(0.0, 0.0), &tol()).unwrap();
        let s = 1.0 / 6f64.sqrt();
        for k in 0..6 {
            assert!((out[(0, k)] - Complex64::from(s)).norm() < 1e-15);
            assert!((out[(k, 0)] - Complex64::from(s)).norm() < 1e-15);
        }
        assert!(matches!(dephase(&CMatrix::identity(3), &tol()), Err(Error::NotHadamard)));
    }

    #[test]
    fn p1_reduction() {
        let (out, script) = reduce_p1(PI, PI, &tol()).unwrap();
        assert_eq!(script.len(), 3);
        assert!(out.first.matrix().approx_eq(&CMatrix::identity(6), tol().eq_tol));
        assert!(out.second.matrix().approx_eq(&make_ftilde(PI, PI), tol().eq_tol));
        let input = make_family_pair(FamilyParams::P1 { xi: PI, eta: PI }, &tol()).unwrap();
        assert_eq!(
            haagerup_fingerprint(input.second.matrix(), &tol()).unwrap(),
            haagerup_fingerprint(out.second.matrix(), &tol()).unwrap()
        );
    }

    #[test]
    fn p1_second_member_is_exact_transpose() {
        let p = make_family_pair(FamilyParams::P1 { xi: 0.8, eta: 5.1 }, &tol()).unwrap();
        assert_eq!(*p.second.matrix(), make_ftilde(0.8, 5.1).transpose());
    }

    #[test]
    fn fourier_reordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (xi, eta) = (rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI));
            let (f, script) = ftilde_to_fourier(xi, eta, &tol()).unwrap();
            assert!(f.is_hadamard(&tol()));
            let (dephased, _) = dephase(&f, &tol()).unwrap();
            assert!(dephased.approx_eq(&f, 1e-14), "already dephased");
            let replay = apply_script(&ftilde_pair(xi, eta), &script, &tol()).unwrap();
            assert!(replay.first.matrix().approx_eq(&CMatrix::identity(6), 0.0));
        }
    }

    #[test]
    fn p3_reduction_examples() {
        let (out, _) = reduce_p3(0.0, 0.0, 1.0, 2.0, &tol()).unwrap();
        assert!(out.second.matrix().approx_eq(&make_ftilde(1.0, 2.0), 1e-14));
        let (out, _) = reduce_p3(1.0, 2.0, 1.0, 2.0, &tol()).unwrap();
        assert!(out.second.matrix().approx_eq(&make_ftilde(0.0, 0.0), 1e-14));
        assert!(out.first.matrix().approx_eq(&CMatrix::identity(6), 1e-14));
    }

    #[test]
    fn p2_intermediate_matches_block_form() {
        let w = omega();
        let w2 = w * w;
        let s = Complex64::from(1.0 / 3f64.sqrt());
        let a = CMatrix::from_rows(&[vec![ONE, w, w], vec![w, ONE, w], vec![w, w, ONE]]).unwrap().scale(s);
        let b = CMatrix::from_rows(&[vec![ONE, w2, w2], vec![w2, ONE, w2], vec![w2, w2, ONE]]).unwrap().scale(-s);
        let u = h_y().adjoint().scale(I);
        assert!((&u * &fourier3()).approx_eq(&a, 1e-15));
        assert!((&u * &h_w()).approx_eq(&b, 1e-15));

        // the P2 second member after the block unitary is S6~
        let pair = make_family_pair(FamilyParams::P2, &tol()).unwrap();
        let lifted = &block_diag_lower(&u) * pair.second.matrix();
        assert!(lifted.approx_eq(&s6_tilde(), 1e-15));
    }

    #[test]
    fn p2_reduction_gives_tao_matrix() {
        let (out, script) = reduce_p2(&tol()).unwrap();
        assert!(out.first.matrix().approx_eq(&CMatrix::identity(6), tol().eq_tol));
        let s6 = out.second.matrix();
        let (dephased, _) = dephase(s6, &tol()).unwrap();
        for z in dephased.entries() {
            let thirds = z.arg().rem_euclid(TWO_PI) / (TWO_PI / 3.0);
            assert!((thirds - thirds.round()).abs() * (TWO_PI / 3.0) < 1e-9);
        }
        assert!(script.moves.iter().any(|m| matches!(m, Move::LeftUnitary { .. })));
        // Tao's matrix as usually tabulated
        let e = [[0, 0, 0, 0, 0, 0], [0, 0, 1, 1, 2, 2], [0, 1, 0, 2, 2, 1],
                 [0, 1, 2, 0, 1, 2], [0, 2, 2, 1, 0, 1], [0, 2, 1, 2, 1, 0]];
        let tao = CMatrix::from_fn(6, 6, |r, c| cis(TWO_PI * e[r][c] as f64 / 3.0) / 6f64.sqrt());
        assert!(dephased.approx_eq(&tao, 1e-12));
        assert!(s6.approx_eq(&tao, 1e-12), "reduction lands on the dephased table");
    }

    #[test]
    fn fingerprint_of_f3_is_cube_roots() {
        let fp = haagerup_fingerprint(&fourier3(), &tol()).unwrap();
        assert_eq!(fp.len(), 81);
        let w = omega();
        for v in fp.values() {
            assert!([ONE, w, w * w].iter().any(|r| (v - r).norm() < 1e-7), "{v}");
        }
        // brute-force oracle over all 81 quadruples
        let h = fourier3();
        let mut direct: Vec<(i64, i64)> = Vec::new();
        for i in 0..3 { for j in 0..3 { for k in 0..3 { for l in 0..3 {
            let v = h[(i, j)] * h[(k, l)] * h[(i, l)].conj() * h[(k, j)].conj() * 9.0;
            direct.push(((v.re * 1e8).round() as i64, (v.im * 1e8).round() as i64));
        }}}}
        direct.sort();
        let ours: Vec<(i64, i64)> = fp.values().map(|v| ((v.re * 1e8).round() as i64, (v.im * 1e8).round() as i64)).collect();
        assert_eq!(ours, direct);
    }

    #[test]
    fn fingerprint_invariance_under_random_moves() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let (xi, eta) = (rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI));
            let pair = ftilde_pair(xi, eta);
            let moves = random_moves(&mut rng, 6);
            let (_, moved) = run(pair.first.matrix(), pair.second.matrix(), &moves);
            assert_eq!(
                haagerup_fingerprint(pair.second.matrix(), &tol()).unwrap(),
                haagerup_fingerprint(&moved, &tol()).unwrap()
            );
        }
    }

    proptest::proptest! {
        #[test]
        fn moves_preserve_unbiasedness_and_fingerprint(seed in 0u64..1000, n in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (xi, eta) = (rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI));
            let pair = ftilde_pair(xi, eta);
            let mut moves = random_moves(&mut rng, n);
            moves.push(Move::ConjugateBoth);
            moves.push(Move::SwapMembers);
            moves.push(Move::SwapMembers);
            let out = apply_script(&pair, &moves.into_iter().collect(), &tol()).unwrap();
            proptest::prop_assert!(out.report(&tol()).is_mu);
            let conj_fp = haagerup_fingerprint(&pair.second.matrix().conjugate(), &tol()).unwrap();
            proptest::prop_assert_eq!(haagerup_fingerprint(out.second.matrix(), &tol()).unwrap(), conj_fp);
        }

        #[test]
        fn dephase_is_idempotent(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = fourier_family(rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI));
            let (_, scrambled) = run(&CMatrix::identity(6), &h, &random_moves(&mut rng, 5));
            let (once, _) = dephase(&scrambled, &tol()).unwrap();
            let (twice, _) = dephase(&once, &tol()).unwrap();
            proptest::prop_assert!(once.approx_eq(&twice, 1e-14));
        }
    }

    #[test]
    fn fourier_and_tao_are_inequivalent() {
        let (p2, _) = reduce_p2(&tol()).unwrap();
        let s6 = p2.second.matrix();
        let f00 = fourier_family(0.0, 0.0);
        assert_ne!(haagerup_fingerprint(s6, &tol()).unwrap(), haagerup_fingerprint(&f00, &tol()).unwrap());
        assert!(hadamard_equivalent(&f00, s6, &tol()).is_none());
        assert!(hadamard_equivalent(&make_ftilde(0.0, 0.0), &f00, &tol()).is_some());
    }

    #[test]
    fn exhaustive_equivalence_finds_scrambled_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (p2, _) = reduce_p2(&tol()).unwrap();
        let s6 = p2.second.matrix().clone();
        let moves = random_moves(&mut rng, 8);
        let (_, scrambled) = run(&CMatrix::identity(6), &s6, &moves);
        assert!(hadamard_equivalent(&scrambled, &s6, &tol()).is_some());
    }

    #[test]
    fn standard_forms_of_all_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in FamilyId::ALL {
            let params = FamilyParams::sample(id, &mut rng);
            let (out, script) = standard_form(params, &tol()).unwrap();
            assert!(out.first.matrix().approx_eq(&CMatrix::identity(6), tol().eq_tol), "{id}");
            assert!(out.second.matrix().is_hadamard(&tol()));
            let input = make_family_pair(params, &tol()).unwrap();
            let replay = apply_script(&input, &script, &tol()).unwrap();
            assert_eq!(replay.second, out.second, "replay is bit-stable");
        }
    }
}
