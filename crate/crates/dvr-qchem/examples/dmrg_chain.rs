//! DMRG on the DVR chain: warmup, sweeps, truncation diagnostics, and the
//! electron-number penalty.
//!
//!     cargo run --release --example dmrg_chain

use dvr_qchem::dmrg::{chain_terms, dmrg_run, DmrgConfig};
use dvr_qchem::dvr::build_sine_dvr;
use dvr_qchem::jwci::Penalty;
use dvr_qchem::model::{build_integrals, ChainGeometry};

fn main() -> dvr_qchem::Result<()> {
    let basis = build_sine_dvr(-15.0, 15.0, 32)?;
    let geom = ChainGeometry::four_proton_chain(10.0);
    let ints = build_integrals(&basis, &geom);

    // Every DVR function is a DMRG site; no orbital optimization needed.
    let penalty = Penalty { mu: 1.0, n_target: 4.0 };
    let terms = chain_terms(&ints, Some(penalty));
    println!("chain of {} sites, penalty mu = {}", terms.len(), penalty.mu);

    let config = DmrgConfig {
        d_schedule: vec![12],
        n_sweeps: 4,
        lanczos_tol: 1e-8,
        sweep_e_tol: 1e-9,
    };
    let t0 = std::time::Instant::now();
    let res = dmrg_run(&terms, &config)?;
    println!("finished in {:.1?}", t0.elapsed());

    println!("\nground energy (D = {}) = {:.8} Ha", res.d_used, res.energy);
    println!("half-sweep energies:");
    for (i, e) in res.sweep_energies.iter().enumerate() {
        println!("  {:>2}: {:.10}", i + 1, e);
    }
    let max_trunc = res.truncation_errors.iter().cloned().fold(0.0f64, f64::max);
    println!("largest discarded weight = {max_trunc:.3e}");
    println!(
        "<N> = {:.6} (target {}), <(N - target)^2> = {:.2e}, on target: {}",
        res.n_expectation, penalty.n_target, res.n_variance, res.number_on_target
    );
    Ok(())
}
