//! Restricted Hartree-Fock on the four-proton screened-Coulomb chain.
//!
//!     cargo run --release --example hartree_fock_chain

use dvr_qchem::dvr::build_sine_dvr;
use dvr_qchem::model::{build_integrals, ChainGeometry};
use dvr_qchem::scf::{fock_matrix, hf_energy, scf_solve, ScfOptions};

fn main() -> dvr_qchem::Result<()> {
    let basis = build_sine_dvr(-15.0, 15.0, 32)?;
    let geom = ChainGeometry::four_proton_chain(10.0);
    let ints = build_integrals(&basis, &geom);

    let opts = ScfOptions {
        comm_tol: 1e-11,
        ..Default::default()
    };
    let scf = scf_solve(&ints, geom.n_electrons(), &opts)?;

    println!(
        "SCF {} after {} iterations",
        if scf.converged { "converged" } else { "NOT converged" },
        scf.iterations
    );
    println!("total energy     = {:.10} Ha", scf.e_hf);
    println!("nuclear repulsion = {:.10} Ha", ints.e_nn);

    println!("\norbital energies (lowest 8):");
    for p in 0..8 {
        let occ = if p < scf.n_occ { "occ " } else { "virt" };
        println!("  {p:>2} {occ} {:>12.6}", scf.orbital_energies[p]);
    }

    // Self-consistency diagnostics: commutator, idempotency, and the
    // independent energy expression sum_occ (eps_p + h_pp) + e_nn.
    let f = fock_matrix(&ints, &scf.density)?;
    let comm = (&f * &scf.density - &scf.density * &f).amax();
    let idem = (&scf.density * &scf.density - &scf.density).amax();
    let h = ints.core_hamiltonian();
    let mut e2 = ints.e_nn;
    for p in 0..scf.n_occ {
        let c = scf.mo_coeff.column(p);
        e2 += scf.orbital_energies[p] + (c.transpose() * &h * c)[(0, 0)];
    }
    println!("\nmax |[F, D]|                   = {comm:.2e}");
    println!("max |D^2 - D|                  = {idem:.2e}");
    println!("energy expression difference   = {:.2e}", (scf.e_hf - e2).abs());
    println!("hf_energy re-evaluation        = {:.10}", hf_energy(&ints, &scf.density, &f));
    Ok(())
}
