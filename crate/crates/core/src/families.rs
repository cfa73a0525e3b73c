//! The four families P0–P3 of mutually unbiased product-basis pairs in
//! C^2 ⊗ C^3, in matrix form and in state-label form.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bases::{
    fourier3, hw_eigenbasis, Basis, HwLabel, LabeledState, MuPair, PairLabels, ProductLabel,
    Provenance,
};
use crate::error::{Error, Result};
use crate::linalg::{cis, omega, omega_sq, CMatrix, Complex64, StateVector, Tolerance, ONE};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    P0,
    P1,
    P2,
    P3,
}

impl FamilyId {
    pub const ALL: [FamilyId; 4] = [FamilyId::P0, FamilyId::P1, FamilyId::P2, FamilyId::P3];
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyId::P0 => "P0",
            FamilyId::P1 => "P1",
            FamilyId::P2 => "P2",
            FamilyId::P3 => "P3",
        };
        f.write_str(s)
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P0" => Ok(FamilyId::P0),
            "P1" => Ok(FamilyId::P1),
            "P2" => Ok(FamilyId::P2),
            "P3" => Ok(FamilyId::P3),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown family '{s}'"),
            }),
        }
    }
}

/// Family together with its free parameters (radians).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyParams {
    P0,
    P1 { xi: f64, eta: f64 },
    P2,
    P3 { zeta: f64, chi: f64, sigma: f64, tau: f64 },
}

/// Loose parameter bag, as collected from command-line flags or JSON.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ParamSet {
    pub xi: Option<f64>,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub chi: Option<f64>,
    pub sigma: Option<f64>,
    pub tau: Option<f64>,
}

fn check_half_open(name: &'static str, value: f64) -> Result<()> {
    if (0.0..TWO_PI).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterRange {
            name,
            value,
            reason: "must lie in [0, 2pi)",
        })
    }
}

fn check_open_pi(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < PI {
        Ok(())
    } else {
        Err(Error::ParameterRange {
            name,
            value,
            reason: "must lie in (0, pi)",
        })
    }
}

impl FamilyParams {
    pub fn id(&self) -> FamilyId {
        match self {
            FamilyParams::P0 => FamilyId::P0,
            FamilyParams::P1 { .. } => FamilyId::P1,
            FamilyParams::P2 => FamilyId::P2,
            FamilyParams::P3 { .. } => FamilyId::P3,
        }
    }

    /// Range checks: `(xi, eta)` in `[0, 2pi)^2` minus the origin, `zeta, chi`
    /// in `[0, 2pi)`, `sigma, tau` in `(0, pi)`. Overlapping parameterizations
    /// between families are not rejected.
    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilyParams::P0 | FamilyParams::P2 => Ok(()),
            FamilyParams::P1 { xi, eta } => {
                check_half_open("xi", xi)?;
                check_half_open("eta", eta)?;
                if xi == 0.0 && eta == 0.0 {
                    return Err(Error::ParameterRange {
                        name: "xi",
                        value: xi,
                        reason: "(xi, eta) = (0, 0) reproduces P0",
                    });
                }
                Ok(())
            }
            FamilyParams::P3 {
                zeta,
                chi,
                sigma,
                tau,
            } => {
                check_half_open("zeta", zeta)?;
                check_half_open("chi", chi)?;
                check_open_pi("sigma", sigma)?;
                check_open_pi("tau", tau)
            }
        }
    }

    pub fn from_parts(id: FamilyId, set: &ParamSet) -> Result<Self> {
        fn need(v: Option<f64>, name: &'static str) -> Result<f64> {
            v.ok_or(Error::MissingParameter(name))
        }
        let params = match id {
            FamilyId::P0 => FamilyParams::P0,
            FamilyId::P2 => FamilyParams::P2,
            FamilyId::P1 => FamilyParams::P1 {
                xi: need(set.xi, "xi")?,
                eta: need(set.eta, "eta")?,
            },
            FamilyId::P3 => FamilyParams::P3 {
                zeta: need(set.zeta, "zeta")?,
                chi: need(set.chi, "chi")?,
                sigma: need(set.sigma, "sigma")?,
                tau: need(set.tau, "tau")?,
            },
        };
        params.validate()?;
        Ok(params)
    }

    pub fn to_parts(&self) -> ParamSet {
        match *self {
            FamilyParams::P0 | FamilyParams::P2 => ParamSet::default(),
            FamilyParams::P1 { xi, eta } => ParamSet {
                xi: Some(xi),
                eta: Some(eta),
                ..ParamSet::default()
            },
            FamilyParams::P3 {
                zeta,
                chi,
                sigma,
                tau,
            } => ParamSet {
                zeta: Some(zeta),
                chi: Some(chi),
                sigma: Some(sigma),
                tau: Some(tau),
                ..ParamSet::default()
            },
        }
    }

    /// Uniform draw from the valid range of `id`.
    pub fn sample<R: Rng + ?Sized>(id: FamilyId, rng: &mut R) -> Self {
        let mut open_pi = || loop {
            let v = rng.random_range(0.0..PI);
            if v > 0.0 {
                return v;
            }
        };
        match id {
            FamilyId::P0 => FamilyParams::P0,
            FamilyId::P2 => FamilyParams::P2,
            FamilyId::P3 => {
                let (sigma, tau) = (open_pi(), open_pi());
                FamilyParams::P3 {
                    zeta: rng.random_range(0.0..TWO_PI),
                    chi: rng.random_range(0.0..TWO_PI),
                    sigma,
                    tau,
                }
            }
            FamilyId::P1 => loop {
                let (xi, eta) = (rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI));
                if (xi, eta) != (0.0, 0.0) {
                    return FamilyParams::P1 { xi, eta };
                }
            },
        }
    }
}

/// `R_{xi,eta} = diag(1, e^{i xi}, e^{i eta})` in the z-basis of C^3.
pub fn make_r_hat(xi: f64, eta: f64) -> CMatrix {
    CMatrix::diag(&[ONE, cis(xi), cis(eta)])
}

/// Coefficients `(a, b, c)` of the x-diagonal operator `S_{zeta,chi}`.
pub fn s_coefficients(zeta: f64, chi: f64) -> (Complex64, Complex64, Complex64) {
    let (w, w2) = (omega(), omega_sq());
    let (ez, ec) = (cis(zeta), cis(chi));
    let third = Complex64::from(1.0 / 3.0);
    (
        (ONE + ez + ec) * third,
        (ONE + w2 * ez + w * ec) * third,
        (ONE + w * ez + w2 * ec) * third,
    )
}

/// `S_{zeta,chi}`: the circulant with first row `(a, b, c)`, equal to
/// `F3 diag(1, e^{i zeta}, e^{i chi}) F3^dag`, so its x-basis matrix elements
/// are `diag(1, e^{i zeta}, e^{i chi})`.
///
/// The transposed circulant (first row `(a, c, b)`) equals `make_s(chi, zeta)`.
pub fn make_s(zeta: f64, chi: f64) -> CMatrix {
    let (a, b, c) = s_coefficients(zeta, chi);
    let row = [a, b, c];
    CMatrix::from_fn(3, 3, |r, col| row[(col + 3 - r) % 3])
}

/// Operator `r_sigma = diag(1, e^{i sigma})` on C^2, which maps `|j_x>` to
/// `(|0_z> ± e^{i sigma}|1_z>)/√2`.
pub fn make_r(sigma: f64) -> Result<CMatrix> {
    check_open_pi("sigma", sigma)?;
    Ok(CMatrix::diag(&[ONE, cis(sigma)]))
}

/// Matrix whose columns are `r_sigma|0_x>` and `r_sigma|1_x>`.
pub fn make_r_basis(sigma: f64) -> Result<CMatrix> {
    let r = make_r(sigma)?;
    Ok(&r * hw_eigenbasis(2, HwLabel::X)?.matrix())
}

/// `r_theta|j_x>` with no range check; `theta = 0` gives `|j_x>` itself.
fn rotated_x_state(theta: f64, j: usize) -> StateVector {
    let sign = if j == 0 { 1.0 } else { -1.0 };
    let s = 1.0 / 2f64.sqrt();
    StateVector::from_raw(vec![Complex64::from(s), cis(theta) * sign * s])
}

/// `(1/√2) [[F3, F3], [F3 D, -F3 D]]` with `D = diag(1, e^{i xi}, e^{i eta})`.
pub fn make_ftilde(xi: f64, eta: f64) -> CMatrix {
    let s = Complex64::from(1.0 / 2f64.sqrt());
    let f = fourier3().scale(s);
    let fd = &f * &make_r_hat(xi, eta);
    CMatrix::block2x2(&f, &f, &fd, &fd.scale(-ONE)).expect("3x3 blocks")
}

/// `[[I3, 0], [0, S_{zeta,chi}]]`.
pub fn make_itilde(zeta: f64, chi: f64) -> CMatrix {
    block_diag_lower(&make_s(zeta, chi))
}

/// `[[I3, 0], [0, lower]]` for a 3x3 `lower`.
pub fn block_diag_lower(lower: &CMatrix) -> CMatrix {
    CMatrix::block2x2(&CMatrix::identity(3), &CMatrix::zeros(3, 3), &CMatrix::zeros(3, 3), lower)
        .expect("3x3 blocks")
}

/// Matrix form of the family member, both bases, plus labels and provenance.
pub fn make_family_pair(params: FamilyParams, tol: &Tolerance) -> Result<MuPair> {
    params.validate()?;
    let four_thirds = 4.0 * PI / 3.0;
    let (first, second) = match params {
        FamilyParams::P0 => (CMatrix::identity(6), make_ftilde(0.0, 0.0)),
        FamilyParams::P1 { xi, eta } => (CMatrix::identity(6), make_ftilde(xi, eta).transpose()),
        FamilyParams::P2 => (
            make_itilde(four_thirds, four_thirds),
            make_ftilde(four_thirds, four_thirds).transpose(),
        ),
        FamilyParams::P3 {
            zeta,
            chi,
            sigma,
            tau,
        } => (make_itilde(zeta, chi), make_ftilde(sigma, tau)),
    };
    let pair = MuPair::new(
        Basis::from_matrix(first, tol)?,
        Basis::from_matrix(second, tol)?,
        tol,
    )?;
    Ok(pair
        .with_labels(state_label_form(params)?)
        .with_provenance(Provenance {
            family: params.id(),
            params,
        }))
}

fn hw(dim: usize, label: HwLabel, k: usize) -> LabeledState {
    LabeledState::hw(dim, label, k).expect("valid Heisenberg-Weyl label")
}

fn product(factor2: LabeledState, factor3: LabeledState) -> ProductLabel {
    ProductLabel::new(factor2, factor3)
}

/// `|j_a, J_b>` over `j = 0, 1` and `J = 0, 1, 2`, index `3 j + J`.
fn direct_labels(a: HwLabel, b: HwLabel) -> Vec<ProductLabel> {
    (0..2)
        .flat_map(|j| (0..3).map(move |k| (j, k)))
        .map(|(j, k)| product(hw(2, a, j), hw(3, b, k)))
        .collect()
}

fn apply3(op: &CMatrix, state: &StateVector) -> StateVector {
    let v = CMatrix::from_columns(&[state.components().to_vec()]).expect("column");
    StateVector::from_raw((op * &v).column(0))
}

/// State-label form of the family member. Vector `3 j + J` of each member
/// corresponds to column `3 j + J` of the matrix form up to a phase; the
/// C^2 factor is always written first.
pub fn state_label_form(params: FamilyParams) -> Result<PairLabels> {
    params.validate()?;
    let labels = match params {
        FamilyParams::P0 => PairLabels {
            first: direct_labels(HwLabel::Z, HwLabel::Z),
            second: direct_labels(HwLabel::X, HwLabel::X),
        },
        FamilyParams::P1 { xi, eta } => {
            let r = make_r_hat(xi, eta);
            let second = (0..3)
                .map(|k| product(hw(2, HwLabel::X, 0), hw(3, HwLabel::X, k)))
                .chain((0..3).map(|k| {
                    let jx = hw(3, HwLabel::X, k);
                    let state = apply3(&r, &jx.state);
                    product(
                        hw(2, HwLabel::X, 1),
                        LabeledState::new(format!("R {}", jx.name), state),
                    )
                }))
                .collect();
            PairLabels {
                first: direct_labels(HwLabel::Z, HwLabel::Z),
                second,
            }
        }
        FamilyParams::P2 => PairLabels {
            first: (0..3)
                .map(|k| product(hw(2, HwLabel::Z, 0), hw(3, HwLabel::Z, k)))
                .chain((0..3).map(|k| product(hw(2, HwLabel::Z, 1), hw(3, HwLabel::Y, k))))
                .collect(),
            second: (0..3)
                .map(|k| product(hw(2, HwLabel::X, 0), hw(3, HwLabel::X, k)))
                .chain((0..3).map(|k| product(hw(2, HwLabel::X, 1), hw(3, HwLabel::W, k))))
                .collect(),
        },
        FamilyParams::P3 {
            zeta,
            chi,
            sigma,
            tau,
        } => {
            let s = make_s(zeta, chi);
            let first = (0..3)
                .map(|k| product(hw(2, HwLabel::Z, 0), hw(3, HwLabel::Z, k)))
                .chain((0..3).map(|k| {
                    let jz = hw(3, HwLabel::Z, k);
                    let state = apply3(&s, &jz.state);
                    product(
                        hw(2, HwLabel::Z, 1),
                        LabeledState::new(format!("S {}", jz.name), state),
                    )
                }))
                .collect();
            let rotations = [(0.0, ""), (sigma, "r_sigma "), (tau, "r_tau ")];
            let second = (0..2)
                .flat_map(|j| (0..3).map(move |k| (j, k)))
                .map(|(j, k)| {
                    let (theta, prefix) = rotations[k];
                    product(
                        LabeledState::new(format!("{prefix}{j}_x"), rotated_x_state(theta, j)),
                        hw(3, HwLabel::X, k),
                    )
                })
                .collect();
            PairLabels { first, second }
        }
    };
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{is_mu_pair, product_basis, same_basis_up_to_phase};
    use crate::linalg::{is_unitary, I};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// `true` when all entries of `m` are zero except the diagonal.
    fn is_diagonal(m: &CMatrix, tol: f64) -> bool {
        (0..m.nrows())
            .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
            .all(|(r, c)| r == c || m[(r, c)].norm() <= tol)
    }

    #[test]
    fn r_hat_examples() {
        assert!(make_r_hat(0.0, 0.0).approx_eq(&CMatrix::identity(3), 0.0));
        let m = make_r_hat(PI, 0.0);
        assert!(m.approx_eq(&CMatrix::diag(&[ONE, -ONE, ONE]), 1e-15));
        let m = make_r_hat(0.4, 2.2);
        let z = crate::bases::clock(3);
        assert!(is_unitary(&m, &tol()).unwrap());
        assert!((&m * &z).approx_eq(&(&z * &m), 1e-15));
    }

    #[test]
    fn s_examples() {
        assert!(make_s(0.0, 0.0).approx_eq(&CMatrix::identity(3), 1e-15));

        let four_thirds = 4.0 * PI / 3.0;
        let s = Basis::from_matrix(make_s(four_thirds, four_thirds), &tol()).unwrap();
        let minus_i_hy = Basis::from_matrix(crate::bases::h_y().scale(-I), &tol()).unwrap();
        let w = same_basis_up_to_phase(&s, &minus_i_hy, &tol()).unwrap();
        assert_eq!(w.permutation, vec![0, 1, 2]);
        assert!(w.phases.iter().any(|p| p.abs() > 1e-3));

        let (zeta, chi) = (0.73, 4.1);
        let f3 = fourier3();
        let diag = &(&f3.adjoint() * &make_s(zeta, chi)) * &f3;
        assert!(diag.approx_eq(&CMatrix::diag(&[ONE, cis(zeta), cis(chi)]), 1e-14));
    }

    #[test]
    fn alt_circulant_layout_is_s_with_swapped_angles() {
        let (zeta, chi) = (1.3, 5.0);
        let (a, b, c) = s_coefficients(zeta, chi);
        let alt = CMatrix::from_rows(&[vec![a, c, b], vec![b, a, c], vec![c, b, a]]).unwrap();
        assert!(alt.approx_eq(&make_s(chi, zeta), 1e-15));
        assert!(alt.approx_eq(&make_s(zeta, chi).transpose(), 0.0));
    }

    #[test]
    fn r_examples() {
        let sigma = 1.1;
        let rb = make_r_basis(sigma).unwrap();
        assert!(rb
            .entries()
            .iter()
            .all(|z| (z.norm() - 1.0 / 2f64.sqrt()).abs() < 1e-15));
        let half = make_r_basis(PI / 2.0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((half[(0, 0)] - s).norm() < 1e-15 && (half[(1, 0)] - I * s).norm() < 1e-15);
        let b = Basis::from_matrix(rb, &tol()).unwrap();
        assert!(is_mu_pair(&Basis::identity(2), &b, &tol()).unwrap().is_mu);
        for bad in [0.0, PI, -0.5, 4.0] {
            assert!(matches!(make_r(bad), Err(Error::ParameterRange { .. })));
        }
    }

    #[test]
    fn ftilde_examples() {
        let f = make_ftilde(0.0, 0.0);
        assert!((f[(0, 0)] - Complex64::from(1.0 / 6f64.sqrt())).norm() < 1e-15);
        assert!(f.is_hadamard(&tol()));
        let lower_left = CMatrix::from_fn(3, 3, |r, c| f[(r + 3, c + 3)]);
        let expected = fourier3().scale((-1.0 / 2f64.sqrt()).into());
        assert!(lower_left.approx_eq(&expected, 1e-15));
        let id = Basis::identity(6);
        for (xi, eta) in [(0.0, 0.0), (1.0, 2.0), (PI, PI)] {
            let b = Basis::from_matrix(make_ftilde(xi, eta), &tol()).unwrap();
            assert!(is_mu_pair(&id, &b, &tol()).unwrap().is_mu);
        }
        let f = make_ftilde(0.0, 0.0);
        assert!((&f.adjoint() * &f).approx_eq(&CMatrix::identity(6), 1e-10));
    }

    #[test]
    fn itilde_examples() {
        assert!(make_itilde(0.0, 0.0).approx_eq(&CMatrix::identity(6), 1e-15));
        let m = make_itilde(2.0, 0.5);
        for k in 0..3 {
            assert_eq!(m.column(k), StateVector::basis_vector(6, k).unwrap().components());
        }
        assert!(is_unitary(&m, &tol()).unwrap());
    }

    #[test]
    fn family_pair_examples() {
        let p0 = make_family_pair(FamilyParams::P0, &tol()).unwrap();
        assert_eq!(p0.first, Basis::identity(6));
        assert!(p0.second.matrix().approx_eq(&make_ftilde(0.0, 0.0), 0.0));

        assert!(matches!(
            make_family_pair(FamilyParams::P1 { xi: 0.0, eta: 0.0 }, &tol()),
            Err(Error::ParameterRange { .. })
        ));

        let p3 = make_family_pair(
            FamilyParams::P3 {
                zeta: 0.0,
                chi: 0.0,
                sigma: PI / 2.0,
                tau: PI / 2.0,
            },
            &tol(),
        )
        .unwrap();
        assert!(p3.first.matrix().approx_eq(&CMatrix::identity(6), 1e-15));
        assert!(p3.second.matrix().approx_eq(&make_ftilde(PI / 2.0, PI / 2.0), 0.0));
        assert_eq!(p3.provenance.unwrap().family, FamilyId::P3);
    }

    #[test]
    fn parameter_validation() {
        let bad = [
            FamilyParams::P1 { xi: -0.1, eta: 1.0 },
            FamilyParams::P1 { xi: 1.0, eta: TWO_PI },
            FamilyParams::P3 { zeta: 0.0, chi: 0.0, sigma: 0.0, tau: 1.0 },
            FamilyParams::P3 { zeta: 0.0, chi: 0.0, sigma: 1.0, tau: PI },
            FamilyParams::P3 { zeta: 7.0, chi: 0.0, sigma: 1.0, tau: 1.0 },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
        assert!(FamilyParams::P1 { xi: 0.0, eta: 0.1 }.validate().is_ok());
        assert!(matches!(
            FamilyParams::from_parts(FamilyId::P3, &ParamSet { zeta: Some(1.0), ..Default::default() }),
            Err(Error::MissingParameter("chi"))
        ));
        let p = FamilyParams::P3 { zeta: 0.1, chi: 0.2, sigma: 0.3, tau: 0.4 };
        assert_eq!(FamilyParams::from_parts(FamilyId::P3, &p.to_parts()).unwrap(), p);
    }

    #[test]
    fn label_form_examples() {
        let p0 = state_label_form(FamilyParams::P0).unwrap();
        assert!(p0.first.iter().all(|l| l.factor2.name.ends_with("_z") && l.factor3.name.ends_with("_z")));
        assert!(p0.second.iter().all(|l| l.factor2.name.ends_with("_x") && l.factor3.name.ends_with("_x")));

        let p2 = state_label_form(FamilyParams::P2).unwrap();
        let names: Vec<String> = p2.second.iter().map(|l| l.to_string()).collect();
        assert_eq!(names[0], "|0_x,0_x>");
        assert_eq!(names[4], "|1_x,1_w>");
        let names: Vec<String> = p2.first.iter().map(|l| l.to_string()).collect();
        assert_eq!(names[5], "|1_z,2_y>");

        let p3 = state_label_form(FamilyParams::P3 { zeta: 0.1, chi: 0.2, sigma: 0.3, tau: 0.4 }).unwrap();
        let names: Vec<String> = p3.second.iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["|0_x,0_x>", "|r_sigma 0_x,1_x>", "|r_tau 0_x,2_x>",
                           "|1_x,0_x>", "|r_sigma 1_x,1_x>", "|r_tau 1_x,2_x>"]);
    }

    #[test]
    fn sampled_families_are_mu_and_match_their_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for id in FamilyId::ALL {
            for _ in 0..100 {
                let params = FamilyParams::sample(id, &mut rng);
                let pair = make_family_pair(params, &tol()).unwrap();
                let report = is_mu_pair(&pair.first, &pair.second, &tol()).unwrap();
                assert!(report.worst_deviation < tol().mu_tol);
                let labels = pair.labels.as_ref().unwrap();
                for (labels, basis) in [(&labels.first, &pair.first), (&labels.second, &pair.second)] {
                    let expanded = product_basis(labels, &tol()).unwrap();
                    let w = same_basis_up_to_phase(&expanded, basis, &tol())
                        .unwrap_or_else(|| panic!("{params:?}: label form disagrees"));
                    assert_eq!(w.permutation, (0..6).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn s_is_a_unitary_circulant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (zeta, chi) = (rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI));
            assert!(is_unitary(&make_s(zeta, chi), &tol()).unwrap());
            let (a, b, c) = s_coefficients(zeta, chi);
            assert!((a.norm_sqr() + b.norm_sqr() + c.norm_sqr() - 1.0).abs() < 1e-10);
            assert!((a * b.conj() + b * c.conj() + c * a.conj()).norm() < 1e-10);
            let xd = &(&fourier3().adjoint() * &make_s(zeta, chi)) * &fourier3();
            assert!(is_diagonal(&xd, 1e-12));
            let (xi, eta) = (rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI));
            assert!(make_ftilde(xi, eta).is_hadamard(&tol()));
        }
    }
}
