//! JSON documents exchanged by the command-line tool: pairs, scripts,
//! search results, fingerprints and wrapped bases.
//!
//! Matrices are written as arrays of rows of `[re, im]`. Readers also accept
//! a string in the plain matrix text format. Floats are written in shortest
//! round-trip form and parsed with correct rounding, so a write/read cycle
//! reproduces every bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bases::{Basis, MuPair, Provenance};
use crate::equivalence::{HadamardFingerprint, Member, Move, TransformScript};
use crate::error::{Error, Result};
use crate::families::{FamilyId, FamilyParams, ParamSet};
use crate::linalg::{CMatrix, Complex64, StateVector, Tolerance};
use crate::search::{ExtensionResult, OrthoGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixDoc {
    Rows(Vec<Vec<[f64; 2]>>),
    Text(String),
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixDoc::Rows(
            (0..m.nrows())
                .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        match self {
            MatrixDoc::Text(t) => CMatrix::parse_text(t),
            MatrixDoc::Rows(rows) => {
                let rows: Vec<Vec<Complex64>> = rows
                    .iter()
                    .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    .collect();
                if rows.is_empty() {
                    return Err(Error::Shape("empty matrix".into()));
                }
                CMatrix::from_rows(&rows)
            }
        }
    }
}

fn vector_doc(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl From<ParamSet> for ParamsDoc {
    fn from(p: ParamSet) -> Self {
        ParamsDoc {
            xi: p.xi,
            eta: p.eta,
            zeta: p.zeta,
            chi: p.chi,
            sigma: p.sigma,
            tau: p.tau,
        }
    }
}

impl From<&ParamsDoc> for ParamSet {
    fn from(p: &ParamsDoc) -> Self {
        ParamSet {
            xi: p.xi,
            eta: p.eta,
            zeta: p.zeta,
            chi: p.chi,
            sigma: p.sigma,
            tau: p.tau,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelsDoc {
    pub first: Vec<String>,
    pub second: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub first: MatrixDoc,
    pub second: MatrixDoc,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub params: Option<ParamsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelsDoc>,
}

impl PairDoc {
    pub fn from_pair(pair: &MuPair) -> Self {
        PairDoc {
            first: MatrixDoc::from_matrix(pair.first.matrix()),
            second: MatrixDoc::from_matrix(pair.second.matrix()),
            family: pair.provenance.as_ref().map(|p| p.family.to_string()),
            params: pair.provenance.as_ref().map(|p| p.params.to_parts().into()),
            labels: pair.labels.as_ref().map(|l| LabelsDoc {
                first: l.first.iter().map(ToString::to_string).collect(),
                second: l.second.iter().map(ToString::to_string).collect(),
            }),
        }
    }

    /// Validates both bases and their unbiasedness. Labels are informational
    /// and not read back.
    pub fn to_pair(&self, tol: &Tolerance) -> Result<MuPair> {
        let pair = MuPair::from_matrices(self.first.to_matrix()?, self.second.to_matrix()?, tol)?;
        match &self.family {
            None => Ok(pair),
            Some(name) => {
                let family: FamilyId = name.parse()?;
                let set = self.params.as_ref().map(ParamSet::from).unwrap_or_default();
                let params = FamilyParams::from_parts(family, &set)?;
                Ok(pair.with_provenance(Provenance { family, params }))
            }
        }
    }
}

pub fn pair_to_json(pair: &MuPair) -> String {
    to_json_line(&PairDoc::from_pair(pair))
}

pub fn pair_from_json(text: &str, tol: &Tolerance) -> Result<MuPair> {
    serde_json::from_str::<PairDoc>(text)?.to_pair(tol)
}

/// Compact JSON plus a trailing newline; matrices make pretty output unwieldy.
fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("documents contain no maps with non-string keys");
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberDoc {
    First,
    Second,
}

impl From<Member> for MemberDoc {
    fn from(m: Member) -> Self {
        match m {
            Member::First => MemberDoc::First,
            Member::Second => MemberDoc::Second,
        }
    }
}

impl From<MemberDoc> for Member {
    fn from(m: MemberDoc) -> Self {
        match m {
            MemberDoc::First => Member::First,
            MemberDoc::Second => Member::Second,
        }
    }
}

/// One move as written to disk. Permutations are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MoveDoc {
    PermuteRows { perm: Vec<usize> },
    PermuteCols { member: MemberDoc, perm: Vec<usize> },
    LeftDiagPhase { phases_over_2pi: Vec<f64> },
    RightDiagPhase { member: MemberDoc, phases_over_2pi: Vec<f64> },
    LeftUnitary { matrix: MatrixDoc },
    TransposeBoth,
    ConjugateBoth,
    SwapMembers,
}

fn one_based(perm: &[usize]) -> Vec<usize> {
    perm.iter().map(|p| p + 1).collect()
}

fn zero_based(perm: &[usize], index: usize) -> Result<Vec<usize>> {
    perm.iter()
        .map(|&p| {
            p.checked_sub(1).ok_or_else(|| Error::InvalidMove {
                index,
                reason: "permutation entries are 1-based".into(),
            })
        })
        .collect()
}

impl MoveDoc {
    pub fn from_move(mv: &Move) -> Self {
        match mv {
            Move::PermuteRows { perm } => MoveDoc::PermuteRows { perm: one_based(perm) },
            Move::PermuteCols { member, perm } => MoveDoc::PermuteCols {
                member: (*member).into(),
                perm: one_based(perm),
            },
            Move::LeftDiagPhase { turns } => MoveDoc::LeftDiagPhase {
                phases_over_2pi: turns.clone(),
            },
            Move::RightDiagPhase { member, turns } => MoveDoc::RightDiagPhase {
                member: (*member).into(),
                phases_over_2pi: turns.clone(),
            },
            Move::LeftUnitary { matrix } => MoveDoc::LeftUnitary {
                matrix: MatrixDoc::from_matrix(matrix),
            },
            Move::TransposeBoth => MoveDoc::TransposeBoth,
            Move::ConjugateBoth => MoveDoc::ConjugateBoth,
            Move::SwapMembers => MoveDoc::SwapMembers,
        }
    }

    pub fn to_move(&self, index: usize) -> Result<Move> {
        Ok(match self {
            MoveDoc::PermuteRows { perm } => Move::PermuteRows {
                perm: zero_based(perm, index)?,
            },
            MoveDoc::PermuteCols { member, perm } => Move::PermuteCols {
                member: (*member).into(),
                perm: zero_based(perm, index)?,
            },
            MoveDoc::LeftDiagPhase { phases_over_2pi } => Move::LeftDiagPhase {
                turns: phases_over_2pi.clone(),
            },
            MoveDoc::RightDiagPhase {
                member,
                phases_over_2pi,
            } => Move::RightDiagPhase {
                member: (*member).into(),
                turns: phases_over_2pi.clone(),
            },
            MoveDoc::LeftUnitary { matrix } => Move::LeftUnitary {
                matrix: matrix.to_matrix()?,
            },
            MoveDoc::TransposeBoth => Move::TransposeBoth,
            MoveDoc::ConjugateBoth => Move::ConjugateBoth,
            MoveDoc::SwapMembers => Move::SwapMembers,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptDoc {
    pub moves: Vec<MoveDoc>,
}

pub fn script_to_json(script: &TransformScript) -> String {
    to_json_line(&ScriptDoc {
        moves: script.moves.iter().map(MoveDoc::from_move).collect(),
    })
}

pub fn script_from_json(text: &str) -> Result<TransformScript> {
    let doc: ScriptDoc = serde_json::from_str(text)?;
    doc.moves
        .iter()
        .enumerate()
        .map(|(i, m)| m.to_move(i))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterDoc {
    pub vector: Vec<[f64; 2]>,
    pub residual: f64,
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub min_abs_overlap: Option<f64>,
    pub max_abs_overlap: Option<f64>,
}

impl GraphDoc {
    pub fn from_graph(g: &OrthoGraph) -> Self {
        GraphDoc {
            nodes: g.nodes,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
            min_abs_overlap: g.min_abs_overlap,
            max_abs_overlap: g.max_abs_overlap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchDoc {
    pub pair: PairDoc,
    pub restarts: usize,
    pub master_seed: u64,
    pub converged: usize,
    pub manifold_warning: bool,
    pub clusters: Vec<ClusterDoc>,
    pub graph: GraphDoc,
    pub max_clique: usize,
    pub extension_basis: Option<MatrixDoc>,
}

pub fn search_to_json(result: &ExtensionResult, master_seed: u64) -> String {
    let set = &result.set;
    to_json_line(&SearchDoc {
        pair: PairDoc::from_pair(&set.pair),
        restarts: set.restarts,
        master_seed,
        converged: set.converged,
        manifold_warning: set.manifold_warning,
        clusters: set
            .clusters
            .iter()
            .map(|c| ClusterDoc {
                vector: vector_doc(c.vector.components()),
                residual: c.residual,
                hits: c.hits,
            })
            .collect(),
        graph: GraphDoc::from_graph(&result.graph),
        max_clique: result.max_clique,
        extension_basis: result.basis.as_ref().map(|b| MatrixDoc::from_matrix(b.matrix())),
    })
}

/// Vectors from a search document, or from a bare JSON array of vectors.
pub fn vectors_from_json(text: &str) -> Result<Vec<StateVector>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Search { clusters: Vec<ClusterDoc> },
        Bare(Vec<Vec<[f64; 2]>>),
    }
    let raw: Vec<Vec<[f64; 2]>> = match serde_json::from_str(text)? {
        Doc::Search { clusters } => clusters.into_iter().map(|c| c.vector).collect(),
        Doc::Bare(v) => v,
    };
    raw.into_iter()
        .map(|v| StateVector::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
        .collect()
}

pub fn graph_to_json(g: &OrthoGraph) -> String {
    to_json_line(&GraphDoc::from_graph(g))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FingerprintDoc {
    pub dim: usize,
    pub size: usize,
    /// Distinct values `[re, im, multiplicity]`.
    pub values: Vec<(f64, f64, usize)>,
}

pub fn fingerprint_to_json(fp: &HadamardFingerprint) -> String {
    let mut values: Vec<(f64, f64, usize)> = Vec::new();
    for z in fp.values() {
        match values.last_mut() {
            Some(last) if last.0 == z.re && last.1 == z.im => last.2 += 1,
            _ => values.push((z.re, z.im, 1)),
        }
    }
    to_json_line(&FingerprintDoc {
        dim: fp.dim,
        size: fp.len(),
        values,
    })
}

/// Optional wrapper around a basis: `matrix` is either inline text, a path
/// to a text-format file (relative to `base_dir`), or rows of `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub dim: usize,
    pub matrix: MatrixDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

pub fn basis_to_json(basis: &Basis, labels: &[String]) -> String {
    to_json_line(&BasisDoc {
        dim: basis.dim(),
        matrix: MatrixDoc::Text(basis.matrix().to_text()),
        labels: labels.to_vec(),
    })
}

pub fn basis_from_json(text: &str, base_dir: Option<&Path>, tol: &Tolerance) -> Result<(Basis, Vec<String>)> {
    let doc: BasisDoc = serde_json::from_str(text)?;
    let matrix = match &doc.matrix {
        MatrixDoc::Text(t) if !t.contains('\n') => {
            let path = base_dir.map_or_else(|| Path::new(t).to_path_buf(), |d| d.join(t));
            CMatrix::parse_text(&std::fs::read_to_string(path)?)?
        }
        other => other.to_matrix()?,
    };
    if matrix.nrows() != doc.dim {
        return Err(Error::DimensionMismatch {
            left: doc.dim,
            right: matrix.nrows(),
        });
    }
    if !doc.labels.is_empty() && doc.labels.len() != doc.dim {
        return Err(Error::Shape(format!("{} labels for dimension {}", doc.labels.len(), doc.dim)));
    }
    Ok((Basis::from_matrix(matrix, tol)?, doc.labels))
}

/// Reads a matrix from a file holding a basis wrapper, a JSON matrix, or
/// the plain text format.
pub fn read_matrix_file(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: BasisDoc = serde_json::from_str(&text)?;
        return match &doc.matrix {
            MatrixDoc::Text(t) if !t.contains('\n') => {
                let dir = path.parent().unwrap_or(Path::new("."));
                CMatrix::parse_text(&std::fs::read_to_string(dir.join(t))?)
            }
            other => other.to_matrix(),
        };
    }
    if trimmed.starts_with('[') {
        return serde_json::from_str::<MatrixDoc>(&text)?.to_matrix();
    }
    CMatrix::parse_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{reduce_p2, standard_form};
    use crate::families::make_family_pair;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn pair_round_trip_is_bit_exact() {
        let params = FamilyParams::P3 {
            zeta: 0.123456789012345,
            chi: 5.5,
            sigma: 1.0 / 3.0,
            tau: 2.9,
        };
        let pair = make_family_pair(params, &tol()).unwrap();
        let text = pair_to_json(&pair);
        let back = pair_from_json(&text, &tol()).unwrap();
        assert_eq!(back.first, pair.first);
        assert_eq!(back.second, pair.second);
        assert_eq!(back.provenance, pair.provenance);
        assert_eq!(back.report(&tol()).worst_deviation, pair.report(&tol()).worst_deviation);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["family"], "P3");
        assert_eq!(doc["labels"]["first"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn pair_reader_accepts_text_matrices_and_rejects_biased_pairs() {
        let id = CMatrix::identity(2).to_text();
        let x = crate::bases::hw_eigenbasis(2, crate::bases::HwLabel::X).unwrap();
        let doc = serde_json::json!({"first": id, "second": x.matrix().to_text()});
        let pair = pair_from_json(&doc.to_string(), &tol()).unwrap();
        assert!(pair.provenance.is_none());

        let doc = serde_json::json!({"first": id, "second": id});
        assert!(matches!(pair_from_json(&doc.to_string(), &tol()), Err(Error::NotMutuallyUnbiased(_))));
        assert!(matches!(pair_from_json("{", &tol()), Err(Error::Json(_))));
    }

    #[test]
    fn script_round_trip() {
        let (_, script) = reduce_p2(&tol()).unwrap();
        let text = script_to_json(&script);
        assert_eq!(script_from_json(&text).unwrap(), script);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let kinds: Vec<&str> = doc["moves"].as_array().unwrap().iter().map(|m| m["kind"].as_str().unwrap()).collect();
        assert!(kinds.contains(&"left-unitary") && kinds.contains(&"permute-rows"));

        let (_, script) = standard_form(FamilyParams::P0, &tol()).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&script_to_json(&script)).unwrap();
        assert_eq!(doc["moves"][0]["perm"], serde_json::json!([1, 5, 3, 4, 2, 6]));
    }

    #[test]
    fn script_reader_rejects_zero_based_and_unknown_moves() {
        let bad = r#"{"moves": [{"kind": "permute-rows", "perm": [0, 1]}]}"#;
        assert!(matches!(script_from_json(bad), Err(Error::InvalidMove { index: 0, .. })));
        let bad = r#"{"moves": [{"kind": "rotate"}]}"#;
        assert!(matches!(script_from_json(bad), Err(Error::Json(_))));
    }

    #[test]
    fn basis_wrapper_inline_and_path() {
        let dir = tempfile::tempdir().unwrap();
        let f3 = crate::bases::fourier3();
        std::fs::write(dir.path().join("f3.txt"), f3.to_text()).unwrap();
        let doc = r#"{"dim": 3, "matrix": "f3.txt", "labels": ["a", "b", "c"]}"#;
        let (b, labels) = basis_from_json(doc, Some(dir.path()), &tol()).unwrap();
        assert_eq!(*b.matrix(), f3);
        assert_eq!(labels.len(), 3);

        let basis = Basis::from_matrix(f3.clone(), &tol()).unwrap();
        let text = basis_to_json(&basis, &[]);
        let (back, _) = basis_from_json(&text, None, &tol()).unwrap();
        assert_eq!(back, basis);
        std::fs::write(dir.path().join("wrapped.json"), text).unwrap();
        assert_eq!(read_matrix_file(&dir.path().join("wrapped.json")).unwrap(), f3);
        assert_eq!(read_matrix_file(&dir.path().join("f3.txt")).unwrap(), f3);
    }

    #[test]
    fn vectors_from_bare_array() {
        let text = "[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]";
        let v = vectors_from_json(text).unwrap();
        assert_eq!(v.len(), 2);
        assert!(vectors_from_json("[[[2.0, 0.0], [0.0, 0.0]]]").is_err());
    }
}
