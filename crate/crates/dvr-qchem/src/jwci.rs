//! CASCI through the Jordan-Wigner mapping: the active-space Hamiltonian is
//! rewritten over a chain of four-level sites (one per orbital, states
//! {empty, down, up, doubly occupied}) and diagonalized in the full 4^L
//! space.
//!
//! Fermionic operators become a per-site 4x4 matrix dressed with a parity
//! string over all earlier sites. Everything is assembled from those
//! explicit matrices, which makes this module an independent sign oracle for
//! the determinant route and for the DMRG block algebra: the three must
//! agree to numerical precision on any instance small enough to compare.
//!
//! Site basis indexing: b = 2 n_up + n_down, i.e. 0 = |0>, 1 = |down>,
//! 2 = |up>, 3 = |up down>, with the up qubit as the leading factor.

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::active_space::ActiveSpaceHamiltonian;
use crate::error::{Error, Result};
use crate::numerics::{self, IterOpts};

/// Annihilator of the up electron: |up> -> |0>, |up down> -> |down>.
const A_UP: [[f64; 4]; 4] = [
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
];

/// Annihilator of the down electron with the on-site up-parity folded in:
/// |down> -> |0>, |up down> -> -|up>.
const A_DN: [[f64; 4]; 4] = [
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 0.0, 0.0],
];

/// Diagonal of (-1)^(n_up + n_down).
const PARITY: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Diagonal of the site electron number.
const N_SITE: [f64; 4] = [0.0, 1.0, 1.0, 2.0];

/// Diagonal of the site spin projection.
const SZ_SITE: [f64; 4] = [0.0, -0.5, 0.5, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// The single-site operator algebra of the four-level (spinful fermion)
/// site.
#[derive(Debug, Clone)]
pub struct SiteOperatorSet {
    pub a_up: Matrix4<f64>,
    pub a_dn: Matrix4<f64>,
    pub n_up: Matrix4<f64>,
    pub n_dn: Matrix4<f64>,
    pub n: Matrix4<f64>,
    pub parity: Matrix4<f64>,
}

/// Constant site matrices of the mapping.
pub fn jw_site_ops() -> SiteOperatorSet {
    let a_up = Matrix4::from_fn(|r, c| A_UP[r][c]);
    let a_dn = Matrix4::from_fn(|r, c| A_DN[r][c]);
    SiteOperatorSet {
        n_up: a_up.transpose() * a_up,
        n_dn: a_dn.transpose() * a_dn,
        n: a_up.transpose() * a_up + a_dn.transpose() * a_dn,
        parity: Matrix4::from_diagonal(&nalgebra::Vector4::from_row_slice(&PARITY)),
        a_up,
        a_dn,
    }
}

/// A fermionic operator embedded in the 4^L chain space, stored as a column
/// map: every basis state is sent to at most one other state with a sign.
#[derive(Debug, Clone)]
pub struct EmbeddedOp {
    pub l: usize,
    pub dim: usize,
    cols: Vec<Option<(u64, f64)>>,
}

impl EmbeddedOp {
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.dim);
        for (col, entry) in self.cols.iter().enumerate() {
            if let Some((row, v)) = entry {
                y[*row as usize] += v * x[col];
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (col, entry) in self.cols.iter().enumerate() {
            if let Some((row, v)) = entry {
                m[(*row as usize, col)] = *v;
            }
        }
        m
    }
}

/// At most one nonzero per column for these generalized-permutation site
/// matrices.
fn column_action(m: &[[f64; 4]; 4], col: usize) -> Option<(usize, f64)> {
    (0..4).find_map(|row| {
        let v = m[row][col];
        if v != 0.0 {
            Some((row, v))
        } else {
            None
        }
    })
}

#[derive(Debug, Clone)]
struct ResolvedFactor {
    site: usize,
    /// Column map of the (possibly transposed) site matrix.
    table: [Option<(usize, f64)>; 4],
}

fn resolve_factor(site: usize, spin: Spin, dagger: bool) -> ResolvedFactor {
    let base = match spin {
        Spin::Up => &A_UP,
        Spin::Down => &A_DN,
    };
    let mut table = [None; 4];
    for col in 0..4 {
        table[col] = if dagger {
            // Transpose: entry (row, col) of the base matrix becomes a map
            // col -> row of the dagger acting on column `col` = row of base.
            (0..4).find_map(|row| {
                let v = base[col][row];
                if v != 0.0 {
                    Some((row, v))
                } else {
                    None
                }
            })
        } else {
            column_action(base, col)
        };
    }
    ResolvedFactor { site, table }
}

/// Applies one factor (with its parity string over earlier sites) to a basis
/// state; returns the image state and accumulated sign, or None if
/// annihilated.
#[inline]
fn factor_map(f: &ResolvedFactor, l: usize, state: u64, amp: f64) -> Option<(u64, f64)> {
    let shift = 2 * (l - 1 - f.site);
    let digit = ((state >> shift) & 3) as usize;
    let (new_digit, v) = f.table[digit]?;
    // Parity string over sites before this one (the more significant digits).
    let mut sign = v;
    let mut rest = state >> (shift + 2);
    while rest != 0 {
        sign *= PARITY[(rest & 3) as usize];
        rest >>= 2;
    }
    let new_state = (state & !(3u64 << shift)) | ((new_digit as u64) << shift);
    Some((new_state, amp * sign))
}

/// Jordan-Wigner image of c_{spin,site} (or its dagger) on an `l`-site
/// chain: parity strings on earlier sites, the 4x4 matrix on `site`,
/// identity after.
pub fn embed_fermion_op(
    _ops: &SiteOperatorSet,
    site: usize,
    spin: Spin,
    dagger: bool,
    l: usize,
) -> Result<EmbeddedOp> {
    if site >= l {
        return Err(Error::invalid(format!(
            "site {site} out of range for an {l}-site chain"
        )));
    }
    if l > MAX_EXACT_SITES {
        return Err(Error::DimensionGuard {
            l,
            max: MAX_EXACT_SITES,
        });
    }
    let dim = 1usize << (2 * l);
    let factor = resolve_factor(site, spin, dagger);
    let cols = (0..dim as u64)
        .map(|b| factor_map(&factor, l, b, 1.0).map(|(s, v)| (s, v)))
        .collect();
    Ok(EmbeddedOp { l, dim, cols })
}

/// One product term of the Hamiltonian: coeff times a chain of elementary
/// fermion operators (leftmost factor applied last).
#[derive(Debug, Clone)]
struct Term {
    coeff: f64,
    factors: Vec<ResolvedFactor>,
}

impl Term {
    /// Walks the factor chain right-to-left on a single basis state.
    #[inline]
    fn map_state(&self, l: usize, state: u64) -> Option<(u64, f64)> {
        let mut cur = (state, 1.0);
        for f in self.factors.iter().rev() {
            cur = factor_map(f, l, cur.0, cur.1)?;
        }
        Some(cur)
    }
}

/// Hard cap on exact diagonalization: 4^10 is the largest space this module
/// will represent.
pub const MAX_EXACT_SITES: usize = 10;

/// Sites up to which the term sum is materialized as a sparse matrix;
/// beyond, products are applied term by term.
const MATERIALIZE_SITES: usize = 6;

/// Electron-number penalty mu (N_hat - n_target)^2, expanded into
/// density-density, one-body, and constant pieces of the term list.
#[derive(Debug, Clone, Copy)]
pub struct Penalty {
    pub mu: f64,
    pub n_target: f64,
}

/// The mapped Hamiltonian over `l` four-level sites.
#[derive(Debug)]
pub struct SpinChainHamiltonian {
    pub l: usize,
    pub dim: usize,
    /// Scalar offset (core energy, plus mu N^2 if a penalty is folded).
    pub offset: f64,
    terms: Vec<Term>,
    matrix: Option<SparseColumns>,
}

#[derive(Debug)]
struct SparseColumns {
    dim: usize,
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseColumns {
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.dim);
        for col in 0..self.dim {
            let xc = x[col];
            if xc == 0.0 {
                continue;
            }
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                y[self.rows[k] as usize] += self.vals[k] * xc;
            }
        }
        y
    }

    fn diagonal(&self) -> DVector<f64> {
        let mut d = DVector::zeros(self.dim);
        for col in 0..self.dim {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                if self.rows[k] as usize == col {
                    d[col] += self.vals[k];
                }
            }
        }
        d
    }

    fn max_asymmetry(&self) -> f64 {
        let mut entries = std::collections::HashMap::new();
        for col in 0..self.dim {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                entries.insert((self.rows[k] as usize, col), self.vals[k]);
            }
        }
        entries
            .iter()
            .map(|(&(r, c), &v)| (v - entries.get(&(c, r)).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }
}

impl SpinChainHamiltonian {
    /// H x without the scalar offset.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        if let Some(m) = &self.matrix {
            return m.apply(x);
        }
        let mut y = DVector::zeros(self.dim);
        for term in &self.terms {
            for state in 0..self.dim as u64 {
                let xb = x[state as usize];
                if xb == 0.0 {
                    continue;
                }
                if let Some((out, v)) = term.map_state(self.l, state) {
                    y[out as usize] += term.coeff * v * xb;
                }
            }
        }
        y
    }

    pub fn diagonal(&self) -> DVector<f64> {
        if let Some(m) = &self.matrix {
            return m.diagonal();
        }
        let mut d = DVector::zeros(self.dim);
        for term in &self.terms {
            for state in 0..self.dim as u64 {
                if let Some((out, v)) = term.map_state(self.l, state) {
                    if out == state {
                        d[state as usize] += term.coeff * v;
                    }
                }
            }
        }
        d
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        let mut unit = DVector::zeros(self.dim);
        for col in 0..self.dim {
            unit[col] = 1.0;
            h.set_column(col, &self.apply(&unit));
            unit[col] = 0.0;
        }
        h
    }

    /// Is the matrix representation stored (small chains) or applied
    /// term-by-term (large chains)?
    pub fn is_materialized(&self) -> bool {
        self.matrix.is_some()
    }
}

/// Maps the active-space Hamiltonian onto the spin chain:
/// H = sum h~_pq c+_ps c_qs + 1/2 sum (pq|rs) c+_ps c+_rt c_st c_qs (+ penalty),
/// with the core energy as a scalar offset.
pub fn build_jw_hamiltonian(
    ash: &ActiveSpaceHamiltonian,
    penalty: Option<Penalty>,
) -> Result<SpinChainHamiltonian> {
    let l = ash.n_orb;
    if l > MAX_EXACT_SITES {
        return Err(Error::DimensionGuard {
            l,
            max: MAX_EXACT_SITES,
        });
    }
    let dim = 1usize << (2 * l);
    let spins = [Spin::Up, Spin::Down];
    let mut terms = Vec::new();

    for p in 0..l {
        for q in 0..l {
            let coeff = ash.h_eff[(p, q)];
            if coeff == 0.0 {
                continue;
            }
            for s in spins {
                terms.push(Term {
                    coeff,
                    factors: vec![resolve_factor(p, s, true), resolve_factor(q, s, false)],
                });
            }
        }
    }
    for p in 0..l {
        for q in 0..l {
            for r in 0..l {
                for s in 0..l {
                    let coeff = 0.5 * ash.eri.get(p, q, r, s);
                    if coeff == 0.0 {
                        continue;
                    }
                    for sp in spins {
                        for tau in spins {
                            terms.push(Term {
                                coeff,
                                factors: vec![
                                    resolve_factor(p, sp, true),
                                    resolve_factor(r, tau, true),
                                    resolve_factor(s, tau, false),
                                    resolve_factor(q, sp, false),
                                ],
                            });
                        }
                    }
                }
            }
        }
    }

    let mut offset = ash.e_core;
    if let Some(pen) = penalty {
        // mu (N - n)^2 = mu sum_ij n_i n_j - 2 mu n sum_i n_i + mu n^2.
        offset += pen.mu * pen.n_target * pen.n_target;
        for i in 0..l {
            for j in 0..l {
                for sp in spins {
                    for tau in spins {
                        terms.push(Term {
                            coeff: pen.mu,
                            factors: vec![
                                resolve_factor(i, sp, true),
                                resolve_factor(i, sp, false),
                                resolve_factor(j, tau, true),
                                resolve_factor(j, tau, false),
                            ],
                        });
                    }
                }
            }
        }
        for i in 0..l {
            for sp in spins {
                terms.push(Term {
                    coeff: -2.0 * pen.mu * pen.n_target,
                    factors: vec![resolve_factor(i, sp, true), resolve_factor(i, sp, false)],
                });
            }
        }
    }

    let matrix = if l <= MATERIALIZE_SITES {
        Some(materialize(&terms, l, dim))
    } else {
        None
    };

    Ok(SpinChainHamiltonian {
        l,
        dim,
        offset,
        terms,
        matrix,
    })
}

fn materialize(terms: &[Term], l: usize, dim: usize) -> SparseColumns {
    let mut col_ptr = Vec::with_capacity(dim + 1);
    let mut rows: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    col_ptr.push(0);
    let mut scratch: std::collections::HashMap<u64, f64> = std::collections::HashMap::new();
    for col in 0..dim as u64 {
        scratch.clear();
        for term in terms {
            if let Some((row, v)) = term.map_state(l, col) {
                *scratch.entry(row).or_insert(0.0) += term.coeff * v;
            }
        }
        let mut entries: Vec<(u64, f64)> = scratch.iter().map(|(&r, &v)| (r, v)).collect();
        entries.sort_unstable_by_key(|e| e.0);
        for (r, v) in entries {
            if v != 0.0 {
                rows.push(r as u32);
                vals.push(v);
            }
        }
        col_ptr.push(rows.len());
    }
    let mut m = SparseColumns {
        dim,
        col_ptr,
        rows,
        vals,
    };
    symmetrize(&mut m);
    m
}

/// The term list is Hermitian pair by pair, so any asymmetry is summation
/// roundoff; average it away so the stored matrix equals its transpose
/// exactly. A real asymmetry would be an assembly bug and trips the debug
/// assertion.
fn symmetrize(m: &mut SparseColumns) {
    debug_assert!(
        m.max_asymmetry()
            <= 1e-12 * m.vals.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0),
        "materialized Hamiltonian asymmetric beyond roundoff"
    );
    let mut transposed: std::collections::HashMap<(u32, u32), f64> = std::collections::HashMap::new();
    for col in 0..m.dim {
        for k in m.col_ptr[col]..m.col_ptr[col + 1] {
            transposed.insert((col as u32, m.rows[k]), m.vals[k]);
        }
    }
    for col in 0..m.dim {
        for k in m.col_ptr[col]..m.col_ptr[col + 1] {
            let mirror = transposed
                .get(&(m.rows[k], col as u32))
                .copied()
                .unwrap_or(0.0);
            m.vals[k] = 0.5 * (m.vals[k] + mirror);
        }
    }
}

/// Diagonal expectation vectors of the total electron number and spin
/// projection over the chain basis.
pub fn number_diagonal(l: usize) -> DVector<f64> {
    site_sum_diagonal(l, &N_SITE)
}

pub fn sz_diagonal(l: usize) -> DVector<f64> {
    site_sum_diagonal(l, &SZ_SITE)
}

fn site_sum_diagonal(l: usize, per_digit: &[f64; 4]) -> DVector<f64> {
    let dim = 1usize << (2 * l);
    DVector::from_fn(dim, |b, _| {
        let mut acc = 0.0;
        let mut rest = b as u64;
        for _ in 0..l {
            acc += per_digit[(rest & 3) as usize];
            rest >>= 2;
        }
        acc
    })
}

/// Eigenstates of the mapped Hamiltonian with their number and spin
/// diagnostics.
#[derive(Debug, Clone)]
pub struct JwciResult {
    /// Ascending energies, offset included (hartree).
    pub energies: Vec<f64>,
    /// Eigenvector columns over the 4^L basis.
    pub states: DMatrix<f64>,
    /// <N> per root.
    pub n_expect: Vec<f64>,
    /// <S_z> per root.
    pub sz_expect: Vec<f64>,
}

/// Lowest `n_roots` eigenpairs of the chain Hamiltonian.
pub fn solve_jwci(h: &SpinChainHamiltonian, n_roots: usize) -> Result<JwciResult> {
    let opts = IterOpts {
        k: n_roots,
        tol: 1e-10,
        max_iter: 40_000,
        diagonal: Some(h.diagonal()),
        ..Default::default()
    };
    let eig = numerics::lowest_eigs(h.dim, |x| h.apply(x), &opts)?;
    let n_diag = number_diagonal(h.l);
    let sz_diag = sz_diagonal(h.l);
    let mut n_expect = Vec::with_capacity(n_roots);
    let mut sz_expect = Vec::with_capacity(n_roots);
    for r in 0..n_roots {
        let v = eig.vectors.column(r);
        n_expect.push(v.iter().zip(n_diag.iter()).map(|(c, n)| c * c * n).sum());
        sz_expect.push(v.iter().zip(sz_diag.iter()).map(|(c, s)| c * c * s).sum());
    }
    Ok(JwciResult {
        energies: eig.values.iter().map(|e| e + h.offset).collect(),
        states: eig.vectors,
        n_expect,
        sz_expect,
    })
}

/// Lowest state whose rounded electron number matches `n_target`, found by
/// computing roots in growing batches. Returns the result and the matching
/// root index.
pub fn lowest_in_number_sector(
    h: &SpinChainHamiltonian,
    n_target: usize,
) -> Result<(JwciResult, usize)> {
    let mut n_roots = 8.min(h.dim);
    loop {
        let res = solve_jwci(h, n_roots)?;
        if let Some(idx) = res
            .n_expect
            .iter()
            .position(|&n| (n - n_target as f64).abs() < 0.5 && n.round() as usize == n_target)
        {
            return Ok((res, idx));
        }
        if n_roots == h.dim {
            return Err(Error::Convergence {
                message: format!("no root with <N> = {n_target} among all {n_roots} states"),
                best: None,
            });
        }
        n_roots = (2 * n_roots).min(h.dim);
    }
}
