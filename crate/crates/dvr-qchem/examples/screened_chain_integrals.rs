//! Assemble the one- and two-electron integrals of a screened-Coulomb proton
//! chain on a DVR grid and inspect their structure.
//!
//!     cargo run --release --example screened_chain_integrals

use dvr_qchem::dvr::build_sine_dvr;
use dvr_qchem::model::{build_integrals, screened_coulomb, ChainGeometry, V_AT_CONTACT};

fn main() -> dvr_qchem::Result<()> {
    println!("screened Coulomb v(r) = erf(r)/r:");
    for r in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        println!("  v({r:>4.1}) = {:.10}", screened_coulomb(r));
    }
    println!("  contact value 2/sqrt(pi) = {V_AT_CONTACT:.10}");

    let basis = build_sine_dvr(-15.0, 15.0, 32)?;
    let geom = ChainGeometry::four_proton_chain(10.0);
    let ints = build_integrals(&basis, &geom);

    println!("\nfour-proton chain, {} DVR functions:", ints.n());
    println!("  nuclear repulsion      = {:.10} Ha", ints.e_nn);
    println!("  kinetic diagonal range = {:.4} .. {:.4} Ha",
        (0..ints.n()).map(|i| ints.t[(i, i)]).fold(f64::INFINITY, f64::min),
        (0..ints.n()).map(|i| ints.t[(i, i)]).fold(f64::NEG_INFINITY, f64::max));
    println!("  deepest attraction     = {:.6} Ha", ints.v.min());

    // The two-electron integrals collapse to a two-index kernel in a DVR:
    // g_ik = v(|x_i - x_k|), with the finite contact value on the diagonal.
    println!("\n  g[0][k] for the first grid point:");
    for k in 0..6 {
        println!("    g[0][{k}] = {:.8}", ints.g[(0, k)]);
    }
    println!("  (every diagonal entry equals the contact value {:.8})", ints.g[(0, 0)]);
    Ok(())
}
