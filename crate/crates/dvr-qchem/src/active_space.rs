//! Integral transformation from the DVR grid to molecular orbitals, active
//! space selection, and frozen-core folding.
//!
//! Orbitals are the canonical HF orbitals, taken in ascending energy: the
//! lowest (n_electrons - n_active_electrons)/2 are frozen (kept doubly
//! occupied), the next L span the active space. Frozen orbitals contribute a
//! constant energy and a mean-field correction to the active one-electron
//! matrix, exactly like the core of a closed-shell molecule.
//!
//! Four-index quantities use chemists' notation throughout: (pq|rs) pairs
//! (p,q) on electron 1 and (r,s) on electron 2, so the two-electron operator
//! is 1/2 sum (pq|rs) c+_ps c+_rt c_st c_qs.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::IntegralSet;
use crate::scf::ScfResult;

/// Dense four-index tensor over `m` orbitals, chemists' notation (pq|rs).
#[derive(Debug, Clone)]
pub struct Eri4 {
    m: usize,
    data: Vec<f64>,
}

impl Eri4 {
    pub fn zeros(m: usize) -> Self {
        Eri4 {
            m,
            data: vec![0.0; m * m * m * m],
        }
    }

    pub fn n_orb(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[((p * self.m + q) * self.m + r) * self.m + s]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        self.data[((p * self.m + q) * self.m + r) * self.m + s] = v;
    }
}

/// Effective Hamiltonian over an active orbital window:
/// H = e_core + sum h_eff_ij c+_i c_j + 1/2 sum (ij|kl) c+ c+ c c.
#[derive(Debug, Clone)]
pub struct ActiveSpaceHamiltonian {
    /// Number of active orbitals L.
    pub n_orb: usize,
    /// Electrons distributed over the active orbitals.
    pub n_elec: usize,
    /// Frozen-core energy plus nuclear repulsion (hartree).
    pub e_core: f64,
    /// Effective one-electron matrix h~ over active orbitals (hartree).
    pub h_eff: DMatrix<f64>,
    /// Active-space ERIs, chemists' notation (hartree).
    pub eri: Eri4,
    /// Indices of the active orbitals in the parent MO list.
    pub orbital_indices: Vec<usize>,
}

/// One-electron transform h_pq = U^T h U for an N x M coefficient block.
pub fn mo_transform_one(h: &DMatrix<f64>, u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if h.nrows() != h.ncols() || h.nrows() != u.nrows() {
        return Err(Error::invalid(format!(
            "one-electron transform: h is {}x{}, U is {}x{}",
            h.nrows(),
            h.ncols(),
            u.nrows(),
            u.ncols()
        )));
    }
    Ok(u.transpose() * h * u)
}

/// Two-electron transform of the diagonal DVR kernel:
/// (pq|rs) = sum_ij (U_ip U_iq) g_ij (U_jr U_js).
///
/// The pair intermediate M[(p,q), i] = U_ip U_iq turns the contraction into
/// one M g M^T sandwich, O(N^2 M^2 + N M^4) instead of the naive N^2 M^4.
pub fn mo_transform_eri(g: &DMatrix<f64>, u: &DMatrix<f64>) -> Result<Eri4> {
    let n = u.nrows();
    let m = u.ncols();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::invalid(format!(
            "ERI transform: g is {}x{}, U has {n} rows",
            g.nrows(),
            g.ncols()
        )));
    }
    let mut pairs = DMatrix::zeros(m * m, n);
    for p in 0..m {
        for q in 0..m {
            for i in 0..n {
                pairs[(p * m + q, i)] = u[(i, p)] * u[(i, q)];
            }
        }
    }
    let sandwich = &pairs * g * pairs.transpose();
    let mut eri = Eri4::zeros(m);
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    // Symmetrize the (pq) <-> (rs) exchange exactly; the two
                    // sandwich entries differ only by summation roundoff.
                    let v = 0.5 * (sandwich[(p * m + q, r * m + s)] + sandwich[(r * m + s, p * m + q)]);
                    eri.set(p, q, r, s, v);
                }
            }
        }
    }
    Ok(eri)
}

/// Folds a set of doubly occupied orbitals into a constant and an effective
/// one-electron matrix over the active set.
///
/// Returns (E_frozen, h_eff over active indices, active-block ERI slice).
pub fn frozen_core_fold(
    h_mo: &DMatrix<f64>,
    eri_mo: &Eri4,
    frozen: &[usize],
    active: &[usize],
) -> Result<(f64, DMatrix<f64>, Eri4)> {
    let m = eri_mo.n_orb();
    if h_mo.nrows() != m || h_mo.ncols() != m {
        return Err(Error::invalid(format!(
            "frozen-core fold: h is {}x{}, ERI over {m} orbitals",
            h_mo.nrows(),
            h_mo.ncols()
        )));
    }
    for &i in frozen.iter().chain(active) {
        if i >= m {
            return Err(Error::invalid(format!("orbital index {i} out of range ({m})")));
        }
    }
    if frozen.iter().any(|f| active.contains(f)) {
        return Err(Error::invalid("frozen and active orbital sets overlap"));
    }

    // E_FC = 2 sum_f h_ff + sum_fg (2 J_fg - K_fg), J_fg = (ff|gg),
    // K_fg = (fg|gf).
    let mut e_fc = 0.0;
    for &f in frozen {
        e_fc += 2.0 * h_mo[(f, f)];
        for &g in frozen {
            e_fc += 2.0 * eri_mo.get(f, f, g, g) - eri_mo.get(f, g, g, f);
        }
    }

    // h~_ij = h_ij + sum_k 2 (ij|kk) - (ik|kj).
    let l = active.len();
    let mut h_eff = DMatrix::zeros(l, l);
    for (ai, &i) in active.iter().enumerate() {
        for (aj, &j) in active.iter().enumerate() {
            let mut v = h_mo[(i, j)];
            for &k in frozen {
                v += 2.0 * eri_mo.get(i, j, k, k) - eri_mo.get(i, k, k, j);
            }
            h_eff[(ai, aj)] = v;
        }
    }

    let mut eri_active = Eri4::zeros(l);
    for (ap, &p) in active.iter().enumerate() {
        for (aq, &q) in active.iter().enumerate() {
            for (ar, &r) in active.iter().enumerate() {
                for (as_, &s) in active.iter().enumerate() {
                    eri_active.set(ap, aq, ar, as_, eri_mo.get(p, q, r, s));
                }
            }
        }
    }
    Ok((e_fc, h_eff, eri_active))
}

/// Builds the active-space Hamiltonian for `n_act_orb` orbitals and
/// `n_act_elec` electrons around the Fermi level of a converged SCF state.
pub fn build_active_hamiltonian(
    scf: &ScfResult,
    ints: &IntegralSet,
    n_act_orb: usize,
    n_act_elec: usize,
) -> Result<ActiveSpaceHamiltonian> {
    let n = ints.n();
    let n_electrons = 2 * scf.n_occ;
    if n_act_elec > n_electrons {
        return Err(Error::invalid(format!(
            "{n_act_elec} active electrons but only {n_electrons} electrons in total"
        )));
    }
    if (n_electrons - n_act_elec) % 2 != 0 {
        return Err(Error::invalid(
            "frozen electrons must come in pairs (even n_electrons - n_act_elec)",
        ));
    }
    let n_frozen = (n_electrons - n_act_elec) / 2;
    if n_frozen + n_act_orb > n {
        return Err(Error::invalid(format!(
            "active window [{n_frozen}, {}) exceeds the {n} available orbitals",
            n_frozen + n_act_orb
        )));
    }
    if n_act_orb == 0 || n_act_orb > 16 {
        return Err(Error::invalid(format!(
            "dense active-space storage supports 1..=16 orbitals, got {n_act_orb}"
        )));
    }

    // Transform over the frozen + active window only.
    let window = n_frozen + n_act_orb;
    let u = scf.mo_coeff.columns(0, window).into_owned();
    let h_mo = mo_transform_one(&ints.core_hamiltonian(), &u)?;
    let eri_mo = mo_transform_eri(&ints.g, &u)?;

    let frozen: Vec<usize> = (0..n_frozen).collect();
    let active: Vec<usize> = (n_frozen..window).collect();
    let (e_fc, h_eff, eri) = frozen_core_fold(&h_mo, &eri_mo, &frozen, &active)?;

    Ok(ActiveSpaceHamiltonian {
        n_orb: n_act_orb,
        n_elec: n_act_elec,
        e_core: e_fc + ints.e_nn,
        h_eff,
        eri,
        orbital_indices: active,
    })
}
