//! CASCI by Slater-determinant enumeration: pick an active window of HF
//! orbitals, fold the rest, and diagonalize in the fixed-(N, Sz) sector.
//!
//!     cargo run --release --example casci_determinant

use dvr_qchem::active_space::build_active_hamiltonian;
use dvr_qchem::detci::{enumerate_dets, s_squared_expectation, solve_casci};
use dvr_qchem::dvr::build_sine_dvr;
use dvr_qchem::model::{build_integrals, ChainGeometry};
use dvr_qchem::scf::{scf_solve, ScfOptions};

fn main() -> dvr_qchem::Result<()> {
    let basis = build_sine_dvr(-15.0, 15.0, 32)?;
    let geom = ChainGeometry::four_proton_chain(10.0);
    let ints = build_integrals(&basis, &geom);
    let scf = scf_solve(&ints, 4, &ScfOptions { comm_tol: 1e-11, ..Default::default() })?;
    println!("HF reference: {:.8} Ha", scf.e_hf);

    for n_active in [6usize, 12] {
        let ash = build_active_hamiltonian(&scf, &ints, n_active, 4)?;
        let dets = enumerate_dets(ash.n_orb, 2, 2)?;
        let roots = 3;
        let ci = solve_casci(&ash, 0, roots)?;
        println!(
            "\nCASCI({}, {}): {} determinants, core offset {:.8} Ha",
            ash.n_orb,
            ash.n_elec,
            dets.len(),
            ash.e_core
        );
        for r in 0..roots {
            let s2 = s_squared_expectation(&dets, &ci.coefficients.column(r).into_owned());
            println!(
                "  root {r}: E = {:.8} Ha   <S^2> = {s2:.6}   correlation vs HF = {:+.6} mHa",
                ci.energies[r],
                (ci.energies[r] - scf.e_hf) * 1e3
            );
        }
    }
    Ok(())
}
