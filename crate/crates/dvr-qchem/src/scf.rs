//! Restricted closed-shell Hartree-Fock in the DVR basis.
//!
//! The DVR overlap is the identity, so the self-consistent loop is plain
//! diagonalization of the Fock matrix F = h + 2J - K. The two-index ERI
//! kernel makes both mean-field terms cheap: the Hartree potential is
//! diagonal, J_ii = sum_k g_ik D_kk, and the exchange is the elementwise
//! product K_ij = g_ij D_ij. D is the per-spin density matrix
//! (trace = n_electrons / 2).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::IntegralSet;
use crate::numerics;

/// Converged state of an SCF run.
#[derive(Debug, Clone)]
pub struct ScfResult {
    /// Orthogonal MO coefficient matrix; column p is the p-th orbital,
    /// ascending in energy.
    pub mo_coeff: DMatrix<f64>,
    /// Orbital energies, ascending (hartree).
    pub orbital_energies: DVector<f64>,
    /// Per-spin density matrix D = C_occ C_occ^T.
    pub density: DMatrix<f64>,
    /// Total energy including nuclear repulsion (hartree).
    pub e_hf: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Number of doubly occupied orbitals (n_electrons / 2).
    pub n_occ: usize,
}

#[derive(Debug, Clone)]
pub struct ScfOptions {
    pub max_iter: usize,
    /// Energy change threshold (hartree).
    pub e_tol: f64,
    /// Threshold on max |[F, D]|.
    pub comm_tol: f64,
    /// Fraction of the new density mixed in each iteration.
    pub mixing: f64,
    /// Pulay (DIIS) extrapolation of the Fock matrix. Plain mixing is enough
    /// for the chains this crate targets; the toggle is there for stiffer
    /// cases.
    pub diis: bool,
}

impl Default for ScfOptions {
    fn default() -> Self {
        ScfOptions {
            max_iter: 200,
            e_tol: 1e-10,
            comm_tol: 1e-8,
            mixing: 0.5,
            diis: false,
        }
    }
}

/// Fock matrix F = h + 2J - K for a per-spin density D.
pub fn fock_matrix(ints: &IntegralSet, density: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = ints.n();
    if density.nrows() != n || density.ncols() != n {
        return Err(Error::invalid(format!(
            "density is {}x{}, integrals are for {n} functions",
            density.nrows(),
            density.ncols()
        )));
    }
    let mut f = ints.core_hamiltonian();
    let j = &ints.g * density.diagonal();
    for i in 0..n {
        f[(i, i)] += 2.0 * j[i];
        for k in 0..n {
            f[(i, k)] -= ints.g[(i, k)] * density[(i, k)];
        }
    }
    Ok(f)
}

/// Closed-shell total energy E = sum_ij D_ij (h_ij + F_ij) + e_nn.
pub fn hf_energy(ints: &IntegralSet, density: &DMatrix<f64>, fock: &DMatrix<f64>) -> f64 {
    let h = ints.core_hamiltonian();
    let mut e = ints.e_nn;
    for i in 0..ints.n() {
        for j in 0..ints.n() {
            e += density[(i, j)] * (h[(i, j)] + fock[(i, j)]);
        }
    }
    e
}

/// Self-consistent field loop: core-Hamiltonian guess, Aufbau filling,
/// linear density mixing (optionally DIIS), convergence on both the energy
/// change and the commutator [F, D].
///
/// Non-convergence is not an error: the result is returned with
/// `converged = false` and the caller decides.
pub fn scf_solve(ints: &IntegralSet, n_electrons: usize, opts: &ScfOptions) -> Result<ScfResult> {
    let n = ints.n();
    if n_electrons % 2 != 0 {
        return Err(Error::invalid(
            "restricted closed-shell SCF needs an even electron count",
        ));
    }
    if n_electrons > 2 * n {
        return Err(Error::invalid(format!(
            "{n_electrons} electrons do not fit in {n} spatial orbitals"
        )));
    }
    let n_occ = n_electrons / 2;

    // Core-Hamiltonian guess.
    let h = ints.core_hamiltonian();
    let guess = numerics::dense_sym_eig(&h)?;
    let mut density = density_from_orbitals(&guess.vectors, n_occ);

    let mut diis = DiisState::new(8);
    let mut e_prev = hf_energy(ints, &density, &fock_matrix(ints, &density)?);
    let mut last = None;

    for iteration in 1..=opts.max_iter {
        let fock_raw = fock_matrix(ints, &density)?;
        let fock = if opts.diis {
            diis.extrapolate(&fock_raw, &(&fock_raw * &density - &density * &fock_raw))
        } else {
            fock_raw
        };
        let eig = numerics::dense_sym_eig(&fock)?;
        check_aufbau_gap(&eig.values, n_occ)?;

        // Idempotent density from the new orbitals; convergence is judged on
        // these pure quantities, mixing only steers the iteration.
        let d_pure = density_from_orbitals(&eig.vectors, n_occ);
        let f_pure = fock_matrix(ints, &d_pure)?;
        let e = hf_energy(ints, &d_pure, &f_pure);
        let comm = (&f_pure * &d_pure - &d_pure * &f_pure).amax();
        let de = (e - e_prev).abs();
        e_prev = e;

        let converged = de < opts.e_tol && comm < opts.comm_tol;
        last = Some(ScfResult {
            mo_coeff: eig.vectors,
            orbital_energies: eig.values,
            density: d_pure.clone(),
            e_hf: e,
            iterations: iteration,
            converged,
        n_occ,
        });
        if converged {
            break;
        }
        density = &density * (1.0 - opts.mixing) + d_pure * opts.mixing;
    }

    Ok(last.expect("max_iter >= 1"))
}

fn density_from_orbitals(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let occ = c.columns(0, n_occ);
    &occ * occ.transpose()
}

fn check_aufbau_gap(energies: &DVector<f64>, n_occ: usize) -> Result<()> {
    if n_occ == 0 || n_occ >= energies.len() {
        return Ok(());
    }
    let homo = energies[n_occ - 1];
    let lumo = energies[n_occ];
    let scale = homo.abs().max(lumo.abs()).max(1.0);
    if (lumo - homo).abs() < 1e-10 * scale {
        return Err(Error::AufbauDegeneracy { homo, lumo });
    }
    Ok(())
}

/// Fock-matrix extrapolation from stored (F, error) pairs.
struct DiisState {
    depth: usize,
    focks: Vec<DMatrix<f64>>,
    errors: Vec<DMatrix<f64>>,
}

impl DiisState {
    fn new(depth: usize) -> Self {
        DiisState {
            depth,
            focks: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn extrapolate(&mut self, fock: &DMatrix<f64>, error: &DMatrix<f64>) -> DMatrix<f64> {
        self.focks.push(fock.clone());
        self.errors.push(error.clone());
        if self.focks.len() > self.depth {
            self.focks.remove(0);
            self.errors.remove(0);
        }
        let m = self.focks.len();
        if m < 2 {
            return fock.clone();
        }
        // Lagrangian system: minimize |sum c_i e_i| subject to sum c_i = 1.
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] = self.errors[i].dot(&self.errors[j]);
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[m] = -1.0;
        match b.lu().solve(&rhs) {
            Some(c) => {
                let mut f = DMatrix::zeros(fock.nrows(), fock.ncols());
                for i in 0..m {
                    f += &self.focks[i] * c[i];
                }
                f
            }
            None => fock.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvr::build_sinc_dvr;
    use crate::model::{build_integrals, ChainGeometry, V_AT_CONTACT};
    use crate::numerics::SplitMix64;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn small_system(n: usize) -> IntegralSet {
        let basis = build_sinc_dvr(-(n as f64 - 1.0) / 2.0, 1.0, n).unwrap();
        let geom = ChainGeometry::new(vec![-0.5, 0.5], vec![1, 1], 2).unwrap();
        build_integrals(&basis, &geom)
    }

    #[test]
    fn fock_reduces_to_core_without_electrons() {
        let ints = small_system(5);
        let f = fock_matrix(&ints, &DMatrix::zeros(5, 5)).unwrap();
        assert!((f - ints.core_hamiltonian()).amax() == 0.0);
        assert!(fock_matrix(&ints, &DMatrix::zeros(4, 4)).is_err());
    }

    #[test]
    fn single_function_scalar_algebra() {
        let basis = build_sinc_dvr(0.0, 1.0, 1).unwrap();
        let geom = ChainGeometry::new(vec![0.0], vec![1], 2).unwrap();
        let ints = build_integrals(&basis, &geom);
        let d = DMatrix::from_element(1, 1, 1.0);
        let f = fock_matrix(&ints, &d).unwrap();
        let h = ints.core_hamiltonian()[(0, 0)];
        let g = ints.g[(0, 0)];
        assert_abs_diff_eq!(f[(0, 0)], h + g, epsilon = 1e-14);
        // Two electrons in the single orbital: E = 2h + g + e_nn.
        assert_abs_diff_eq!(
            hf_energy(&ints, &d, &f),
            2.0 * h + g + ints.e_nn,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(g, V_AT_CONTACT, epsilon = 1e-14);
    }

    /// Brute-force Fock from the full four-index ERI tensor of the diagonal
    /// approximation, (il|jk) = delta_il delta_jk g_ik.
    fn fock_four_index_oracle(ints: &IntegralSet, d: &DMatrix<f64>) -> DMatrix<f64> {
        let n = ints.n();
        let eri = |i: usize, l: usize, j: usize, k: usize| -> f64 {
            if i == l && j == k {
                ints.g[(i, j)]
            } else {
                0.0
            }
        };
        let mut f = ints.core_hamiltonian();
        for i in 0..n {
            for j in 0..n {
                let mut val = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        // Coulomb (ij|kl) and exchange (ik|lj) in chemists'
                        // notation over the DVR ERI tensor.
                        val += d[(k, l)] * (2.0 * eri(i, j, k, l) - eri(i, k, l, j));
                    }
                }
                f[(i, j)] += val;
            }
        }
        f
    }

    #[test]
    fn fock_matches_four_index_oracle() {
        let ints = small_system(5);
        let mut rng = SplitMix64::new(11);
        let mut d = DMatrix::zeros(5, 5);
        for i in 0..5 {
            for j in i..5 {
                let v = rng.next_f64() - 0.5;
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        let fast = fock_matrix(&ints, &d).unwrap();
        let slow = fock_four_index_oracle(&ints, &d);
        assert!((fast - slow).amax() < 1e-12);
    }

    #[test]
    fn zero_electrons_converges_immediately() {
        let ints = small_system(5);
        let res = scf_solve(&ints, 0, &ScfOptions::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
        assert_eq!(res.density.amax(), 0.0);
        assert_abs_diff_eq!(res.e_hf, ints.e_nn, epsilon = 1e-14);
    }

    #[test]
    fn single_orbital_two_electrons() {
        let basis = build_sinc_dvr(0.0, 1.0, 1).unwrap();
        let geom = ChainGeometry::new(vec![0.0], vec![1], 2).unwrap();
        let ints = build_integrals(&basis, &geom);
        let res = scf_solve(&ints, 2, &ScfOptions::default()).unwrap();
        assert!(res.converged);
        let h = ints.core_hamiltonian()[(0, 0)];
        assert_abs_diff_eq!(res.e_hf, 2.0 * h + ints.g[(0, 0)] + ints.e_nn, epsilon = 1e-12);
    }

    #[test]
    fn odd_electrons_rejected() {
        let ints = small_system(5);
        assert!(scf_solve(&ints, 3, &ScfOptions::default()).is_err());
        assert!(scf_solve(&ints, 12, &ScfOptions::default()).is_err());
    }

    #[test]
    fn convergence_invariants_and_energy_expressions() {
        let ints = small_system(8);
        // The two-expression identity holds to the degree the commutator is
        // converged, so ask for more than the default stopping criterion.
        let opts = ScfOptions {
            comm_tol: 1e-11,
            ..Default::default()
        };
        let res = scf_solve(&ints, 2, &opts).unwrap();
        assert!(res.converged);

        // Orthonormal MOs (identity overlap).
        let gram = res.mo_coeff.transpose() * &res.mo_coeff;
        assert!((gram - DMatrix::identity(8, 8)).amax() < 1e-10);

        // D idempotent with trace n_occ, [F, D] ~ 0.
        let d = &res.density;
        assert!((d * d - d).amax() < 1e-8);
        assert_abs_diff_eq!(d.trace(), res.n_occ as f64, epsilon = 1e-10);
        let f = fock_matrix(&ints, d).unwrap();
        assert!((&f * d - d * &f).amax() < 1e-8);

        // Independent energy expression sum_occ (eps_p + h_pp^MO) + e_nn.
        let h = ints.core_hamiltonian();
        let mut e2 = ints.e_nn;
        for p in 0..res.n_occ {
            let c = res.mo_coeff.column(p);
            e2 += res.orbital_energies[p] + (c.transpose() * &h * c)[(0, 0)];
        }
        assert_abs_diff_eq!(res.e_hf, e2, epsilon = 1e-9);
    }

    #[test]
    fn hitting_max_iter_reports_unconverged() {
        let ints = small_system(8);
        let res = scf_solve(
            &ints,
            2,
            &ScfOptions {
                max_iter: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn degenerate_frontier_orbitals_abort() {
        // Two exactly degenerate levels at the Aufbau boundary: fractional
        // occupation is out of scope, so the solve must refuse.
        let basis = build_sinc_dvr(0.0, 1.0, 2).unwrap();
        let geom = ChainGeometry::new(vec![0.5], vec![1], 2).unwrap();
        let mut ints = build_integrals(&basis, &geom);
        ints.t = DMatrix::identity(2, 2);
        ints.v = nalgebra::DVector::zeros(2);
        ints.g = DMatrix::zeros(2, 2);
        match scf_solve(&ints, 2, &ScfOptions::default()) {
            Err(crate::error::Error::AufbauDegeneracy { .. }) => {}
            other => panic!("expected Aufbau degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn diis_agrees_with_plain_mixing() {
        let ints = small_system(8);
        let plain = scf_solve(&ints, 2, &ScfOptions::default()).unwrap();
        let diis = scf_solve(
            &ints,
            2,
            &ScfOptions {
                diis: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(diis.converged);
        assert_abs_diff_eq!(plain.e_hf, diis.e_hf, epsilon = 1e-9);
        assert!(diis.iterations <= plain.iterations);
    }
}
