//! CASCI by explicit Slater-determinant enumeration.
//!
//! Determinants are bitstring pairs (alpha mask, beta mask) over the active
//! orbitals. The fermionic convention is: all alpha spin-orbitals before all
//! beta, creation operators applied in ascending orbital order within each
//! channel. That makes alpha and beta excitation signs independent (the
//! cross-channel parity factors cancel pairwise in every matrix element),
//! which the spin-chain route cross-checks exactly.
//!
//! Matrix elements between determinants follow the Slater-Condon rules, with
//! every sign computed by sequential application of annihilation/creation
//! primitives rather than a transcribed parity formula.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::active_space::{ActiveSpaceHamiltonian, Eri4};
use crate::error::{Error, Result};
use crate::numerics::{self, IterOpts};

/// A Slater determinant: bit p set means spatial orbital p is occupied in
/// that spin channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Determinant {
    pub alpha: u64,
    pub beta: u64,
}

/// All determinants of fixed (n_up, n_down) over `n_orb` orbitals,
/// lexicographically ordered by (alpha, beta).
#[derive(Debug, Clone)]
pub struct DeterminantBasis {
    pub n_orb: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub dets: Vec<Determinant>,
    index: HashMap<Determinant, usize>,
}

impl DeterminantBasis {
    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn index_of(&self, det: &Determinant) -> Option<usize> {
        self.index.get(det).copied()
    }
}

/// Eigenpairs of the CI Hamiltonian: energies include the core offset,
/// coefficient columns are normalized over the determinant basis.
#[derive(Debug, Clone)]
pub struct CiResult {
    pub energies: DVector<f64>,
    pub coefficients: DMatrix<f64>,
}

/// Enumerates all C(L, n_up) * C(L, n_down) determinants.
pub fn enumerate_dets(l: usize, n_up: usize, n_down: usize) -> Result<DeterminantBasis> {
    if l > 63 {
        return Err(Error::invalid("determinant bitmasks support up to 63 orbitals"));
    }
    if n_up > l || n_down > l {
        return Err(Error::invalid(format!(
            "cannot place {n_up} up / {n_down} down electrons in {l} orbitals"
        )));
    }
    let alphas = masks_with_popcount(l, n_up);
    let betas = masks_with_popcount(l, n_down);
    let mut dets = Vec::with_capacity(alphas.len() * betas.len());
    for &a in &alphas {
        for &b in &betas {
            dets.push(Determinant { alpha: a, beta: b });
        }
    }
    let index = dets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    Ok(DeterminantBasis {
        n_orb: l,
        n_up,
        n_down,
        dets,
        index,
    })
}

/// All `l`-bit masks with the given popcount, ascending.
fn masks_with_popcount(l: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let limit = 1u64 << l;
    // Gosper's hack walks same-popcount masks in ascending order.
    let mut m = (1u64 << k) - 1;
    while m < limit {
        out.push(m);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

#[inline]
fn parity_below(mask: u64, p: usize) -> f64 {
    if (mask & ((1u64 << p) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn annihilate(mask: u64, p: usize) -> Option<(u64, f64)> {
    if mask & (1 << p) == 0 {
        None
    } else {
        Some((mask ^ (1 << p), parity_below(mask, p)))
    }
}

#[inline]
fn create(mask: u64, p: usize) -> Option<(u64, f64)> {
    if mask & (1 << p) != 0 {
        None
    } else {
        Some((mask | (1 << p), parity_below(mask, p)))
    }
}

/// Sign of c+_p c_q within one spin channel (both acting on `mask`).
fn single_sign(mask: u64, p: usize, q: usize) -> Option<f64> {
    let (m1, s1) = annihilate(mask, q)?;
    let (_, s2) = create(m1, p)?;
    Some(s1 * s2)
}

/// Sign of c+_p1 c+_p2 c_q2 c_q1 within one spin channel.
fn double_sign(mask: u64, p1: usize, p2: usize, q2: usize, q1: usize) -> Option<f64> {
    let (m1, s1) = annihilate(mask, q1)?;
    let (m2, s2) = annihilate(m1, q2)?;
    let (m3, s3) = create(m2, p2)?;
    let (_, s4) = create(m3, p1)?;
    Some(s1 * s2 * s3 * s4)
}

fn occupied(mask: u64, l: usize) -> Vec<usize> {
    (0..l).filter(|&p| mask & (1 << p) != 0).collect()
}

/// Hamiltonian matrix element <J| H_AS |I> without the scalar core offset.
///
/// Zero whenever the determinants differ in more than two spin-orbitals.
pub fn slater_condon_element(
    det_i: &Determinant,
    det_j: &Determinant,
    h_eff: &DMatrix<f64>,
    eri: &Eri4,
) -> f64 {
    let l = h_eff.nrows();
    let diff_a = (det_i.alpha ^ det_j.alpha).count_ones() / 2;
    let diff_b = (det_i.beta ^ det_j.beta).count_ones() / 2;
    match (diff_a, diff_b) {
        (0, 0) => diagonal_element(det_i, l, h_eff, eri),
        (1, 0) => single_element(det_i.alpha, det_j.alpha, det_i.beta, l, h_eff, eri),
        (0, 1) => single_element(det_i.beta, det_j.beta, det_i.alpha, l, h_eff, eri),
        (2, 0) => same_spin_double_element(det_i.alpha, det_j.alpha, eri),
        (0, 2) => same_spin_double_element(det_i.beta, det_j.beta, eri),
        (1, 1) => mixed_double_element(det_i, det_j, eri),
        _ => 0.0,
    }
}

fn diagonal_element(det: &Determinant, l: usize, h_eff: &DMatrix<f64>, eri: &Eri4) -> f64 {
    let occ_a = occupied(det.alpha, l);
    let occ_b = occupied(det.beta, l);
    let mut e = 0.0;
    for &p in occ_a.iter().chain(&occ_b) {
        e += h_eff[(p, p)];
    }
    for &p in &occ_a {
        for &q in &occ_a {
            e += 0.5 * (eri.get(p, p, q, q) - eri.get(p, q, q, p));
        }
    }
    for &p in &occ_b {
        for &q in &occ_b {
            e += 0.5 * (eri.get(p, p, q, q) - eri.get(p, q, q, p));
        }
    }
    for &p in &occ_a {
        for &q in &occ_b {
            e += eri.get(p, p, q, q);
        }
    }
    e
}

/// Element for a single excitation q -> p in the `same` channel; `other` is
/// the untouched channel's occupation mask of the ket.
fn single_element(
    same_i: u64,
    same_j: u64,
    other: u64,
    l: usize,
    h_eff: &DMatrix<f64>,
    eri: &Eri4,
) -> f64 {
    let removed = same_i & !same_j;
    let added = same_j & !same_i;
    let q = removed.trailing_zeros() as usize;
    let p = added.trailing_zeros() as usize;
    let sign = match single_sign(same_i, p, q) {
        Some(s) => s,
        None => return 0.0,
    };
    let mut v = h_eff[(p, q)];
    for &r in &occupied(same_i, l) {
        // r = q contributes (pq|qq) - (pq|qq) = 0, harmless to include.
        v += eri.get(p, q, r, r) - eri.get(p, r, r, q);
    }
    for &r in &occupied(other, l) {
        v += eri.get(p, q, r, r);
    }
    sign * v
}

fn same_spin_double_element(same_i: u64, same_j: u64, eri: &Eri4) -> f64 {
    let removed = same_i & !same_j;
    let added = same_j & !same_i;
    let q1 = removed.trailing_zeros() as usize;
    let q2 = 63 - removed.leading_zeros() as usize;
    let p1 = added.trailing_zeros() as usize;
    let p2 = 63 - added.leading_zeros() as usize;
    let sign = match double_sign(same_i, p1, p2, q2, q1) {
        Some(s) => s,
        None => return 0.0,
    };
    sign * (eri.get(p1, q1, p2, q2) - eri.get(p1, q2, p2, q1))
}

fn mixed_double_element(det_i: &Determinant, det_j: &Determinant, eri: &Eri4) -> f64 {
    let q = (det_i.alpha & !det_j.alpha).trailing_zeros() as usize;
    let p = (det_j.alpha & !det_i.alpha).trailing_zeros() as usize;
    let s = (det_i.beta & !det_j.beta).trailing_zeros() as usize;
    let r = (det_j.beta & !det_i.beta).trailing_zeros() as usize;
    let sign_a = match single_sign(det_i.alpha, p, q) {
        Some(v) => v,
        None => return 0.0,
    };
    let sign_b = match single_sign(det_i.beta, r, s) {
        Some(v) => v,
        None => return 0.0,
    };
    sign_a * sign_b * eri.get(p, q, r, s)
}

/// Sparse row storage of the CI Hamiltonian (core offset excluded).
struct CiMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CiMatrix {
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.dim);
        for row in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[row] = acc;
        }
        y
    }

    fn diagonal(&self) -> DVector<f64> {
        let mut d = DVector::zeros(self.dim);
        for row in 0..self.dim {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                if self.cols[k] as usize == row {
                    d[row] += self.vals[k];
                }
            }
        }
        d
    }
}

/// Builds the CI matrix by enumerating single and double excitations of each
/// determinant; elements are kept so repeated matrix-vector products are
/// cheap.
fn build_ci_matrix(basis: &DeterminantBasis, h_eff: &DMatrix<f64>, eri: &Eri4) -> CiMatrix {
    let l = basis.n_orb;
    let dim = basis.len();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    row_ptr.push(0);

    let push = |cols: &mut Vec<u32>, vals: &mut Vec<f64>, j: usize, v: f64| {
        if v != 0.0 {
            cols.push(j as u32);
            vals.push(v);
        }
    };

    for det in &basis.dets {
        let row_start = cols.len();
        let occ_a = occupied(det.alpha, l);
        let virt_a: Vec<usize> = (0..l).filter(|&p| det.alpha & (1 << p) == 0).collect();
        let occ_b = occupied(det.beta, l);
        let virt_b: Vec<usize> = (0..l).filter(|&p| det.beta & (1 << p) == 0).collect();

        push(&mut cols, &mut vals, basis.index_of(det).unwrap(), diagonal_element(det, l, h_eff, eri));

        // Alpha singles and doubles.
        for &q in &occ_a {
            for &p in &virt_a {
                let j = Determinant {
                    alpha: det.alpha ^ (1 << q) | (1 << p),
                    beta: det.beta,
                };
                let v = single_element(det.alpha, j.alpha, det.beta, l, h_eff, eri);
                push(&mut cols, &mut vals, basis.index_of(&j).unwrap(), v);
            }
        }
        for (ia, &q1) in occ_a.iter().enumerate() {
            for &q2 in &occ_a[ia + 1..] {
                for (ja, &p1) in virt_a.iter().enumerate() {
                    for &p2 in &virt_a[ja + 1..] {
                        let j = Determinant {
                            alpha: det.alpha ^ (1 << q1) ^ (1 << q2) | (1 << p1) | (1 << p2),
                            beta: det.beta,
                        };
                        let v = same_spin_double_element(det.alpha, j.alpha, eri);
                        push(&mut cols, &mut vals, basis.index_of(&j).unwrap(), v);
                    }
                }
            }
        }

        // Beta singles and doubles.
        for &q in &occ_b {
            for &p in &virt_b {
                let j = Determinant {
                    alpha: det.alpha,
                    beta: det.beta ^ (1 << q) | (1 << p),
                };
                let v = single_element(det.beta, j.beta, det.alpha, l, h_eff, eri);
                push(&mut cols, &mut vals, basis.index_of(&j).unwrap(), v);
            }
        }
        for (ib, &q1) in occ_b.iter().enumerate() {
            for &q2 in &occ_b[ib + 1..] {
                for (jb, &p1) in virt_b.iter().enumerate() {
                    for &p2 in &virt_b[jb + 1..] {
                        let j = Determinant {
                            alpha: det.alpha,
                            beta: det.beta ^ (1 << q1) ^ (1 << q2) | (1 << p1) | (1 << p2),
                        };
                        let v = same_spin_double_element(det.beta, j.beta, eri);
                        push(&mut cols, &mut vals, basis.index_of(&j).unwrap(), v);
                    }
                }
            }
        }

        // Mixed doubles.
        for &q in &occ_a {
            for &p in &virt_a {
                for &s in &occ_b {
                    for &r in &virt_b {
                        let j = Determinant {
                            alpha: det.alpha ^ (1 << q) | (1 << p),
                            beta: det.beta ^ (1 << s) | (1 << r),
                        };
                        let v = mixed_double_element(det, &j, eri);
                        push(&mut cols, &mut vals, basis.index_of(&j).unwrap(), v);
                    }
                }
            }
        }

        let _ = row_start;
        row_ptr.push(cols.len());
    }

    CiMatrix {
        dim,
        row_ptr,
        cols,
        vals,
    }
}

/// Determinant count below which the CI matrix is diagonalized densely; the
/// Davidson path with the determinant-diagonal preconditioner takes over
/// above it.
const DENSE_LIMIT: usize = 2000;

/// Lowest `n_roots` states of the active-space Hamiltonian in the
/// S_z = two_s_z / 2 sector. Energies include the core offset.
pub fn solve_casci(
    ash: &ActiveSpaceHamiltonian,
    two_s_z: i32,
    n_roots: usize,
) -> Result<CiResult> {
    let n_elec = ash.n_elec as i32;
    if (n_elec + two_s_z) % 2 != 0 {
        return Err(Error::invalid(format!(
            "no ({} electron, 2Sz = {two_s_z}) sector exists",
            ash.n_elec
        )));
    }
    let n_up = (n_elec + two_s_z) / 2;
    let n_down = n_elec - n_up;
    if n_up < 0 || n_down < 0 {
        return Err(Error::invalid(format!(
            "2Sz = {two_s_z} is out of range for {} electrons",
            ash.n_elec
        )));
    }
    let basis = enumerate_dets(ash.n_orb, n_up as usize, n_down as usize)?;
    let dim = basis.len();
    if n_roots == 0 || n_roots > dim {
        return Err(Error::invalid(format!(
            "{n_roots} roots requested from a {dim}-determinant space"
        )));
    }

    if dim <= DENSE_LIMIT {
        let mut h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = slater_condon_element(&basis.dets[j], &basis.dets[i], &ash.h_eff, &ash.eri);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let eig = numerics::dense_sym_eig(&h)?;
        Ok(CiResult {
            energies: eig.values.rows(0, n_roots).map(|e| e + ash.e_core),
            coefficients: eig.vectors.columns(0, n_roots).into_owned(),
        })
    } else {
        let matrix = build_ci_matrix(&basis, &ash.h_eff, &ash.eri);
        let opts = IterOpts {
            k: n_roots,
            tol: 1e-10,
            max_iter: 20_000,
            diagonal: Some(matrix.diagonal()),
            ..Default::default()
        };
        let eig = numerics::lowest_eigs(dim, |x| matrix.apply(x), &opts)?;
        Ok(CiResult {
            energies: eig.values.map(|e| e + ash.e_core),
            coefficients: eig.vectors,
        })
    }
}

/// Expectation of total S^2 for a CI vector, via S^2 = S-S+ + Sz(Sz + 1):
/// the S+ image lives one sector up and its norm is accumulated directly.
pub fn s_squared_expectation(basis: &DeterminantBasis, coeffs: &DVector<f64>) -> f64 {
    let sz = (basis.n_up as f64 - basis.n_down as f64) / 2.0;
    let mut raised: HashMap<Determinant, f64> = HashMap::new();
    for (idx, det) in basis.dets.iter().enumerate() {
        let c = coeffs[idx];
        if c == 0.0 {
            continue;
        }
        for p in 0..basis.n_orb {
            // S+ = sum_p c+_{p,up} c_{p,down}.
            if det.beta & (1 << p) == 0 || det.alpha & (1 << p) != 0 {
                continue;
            }
            let (beta, s_b) = annihilate(det.beta, p).unwrap();
            let (alpha, s_a) = create(det.alpha, p).unwrap();
            // The beta operator passes the full alpha string of the ket.
            let alpha_parity = if det.alpha.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let entry = raised.entry(Determinant { alpha, beta }).or_insert(0.0);
            *entry += c * s_a * s_b * alpha_parity;
        }
    }
    let s_minus_s_plus: f64 = raised.values().map(|v| v * v).sum();
    s_minus_s_plus + sz * (sz + 1.0)
}
