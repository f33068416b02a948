//! The one-dimensional pseudo-hydrogen chain with a screened Coulomb
//! interaction, and the assembly of all one- and two-electron integrals in a
//! DVR basis.
//!
//! The interaction is v(r) = erf(r)/r, finite at contact (2/sqrt(pi)), so
//! nothing on the grid is singular. Within the DVR diagonal approximation
//! the electron-nuclear term is a vector over grid points and the
//! electron-repulsion integrals reduce to the two-index kernel
//! g_ik = v(|x_i - x_k|).

use nalgebra::{DMatrix, DVector};

use crate::dvr::{self, DvrBasis};
use crate::error::{Error, Result};

/// erf(0)/0 limit: 2/sqrt(pi).
pub const V_AT_CONTACT: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Nuclear frame of a chain: positions (bohr, ascending), integer charges,
/// and the electron count for downstream solvers.
#[derive(Debug, Clone)]
pub struct ChainGeometry {
    positions: Vec<f64>,
    charges: Vec<u32>,
    n_electrons: usize,
}

impl ChainGeometry {
    pub fn new(positions: Vec<f64>, charges: Vec<u32>, n_electrons: usize) -> Result<Self> {
        if positions.len() != charges.len() {
            return Err(Error::invalid(format!(
                "{} positions but {} charges",
                positions.len(),
                charges.len()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("nuclear positions must be strictly ascending"));
        }
        if charges.iter().any(|&z| z == 0) {
            return Err(Error::invalid("nuclear charges must be at least 1"));
        }
        if n_electrons % 2 != 0 {
            return Err(Error::invalid(
                "only even electron counts are supported (restricted closed shell)",
            ));
        }
        Ok(ChainGeometry {
            positions,
            charges,
            n_electrons,
        })
    }

    /// The benchmark chain: four protons at -L/2, -L/6, +L/6, +L/2 with four
    /// electrons. `l` in bohr.
    pub fn four_proton_chain(l: f64) -> Self {
        ChainGeometry::new(
            vec![-l / 2.0, -l / 6.0, l / 6.0, l / 2.0],
            vec![1, 1, 1, 1],
            4,
        )
        .expect("static geometry is valid")
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn charges(&self) -> &[u32] {
        &self.charges
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn n_nuclei(&self) -> usize {
        self.positions.len()
    }
}

/// Every integral a solver needs, bundled with the basis it was built on.
#[derive(Debug, Clone)]
pub struct IntegralSet {
    /// Kinetic matrix (hartree).
    pub t: DMatrix<f64>,
    /// Electron-nuclear attraction at each grid point (hartree).
    pub v: DVector<f64>,
    /// Two-index electron-repulsion kernel g_ik = v(|x_i - x_k|) (hartree).
    pub g: DMatrix<f64>,
    /// Nuclear repulsion (hartree).
    pub e_nn: f64,
    pub basis: DvrBasis,
}

impl IntegralSet {
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    /// Core Hamiltonian h = t + diag(v).
    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        let mut h = self.t.clone();
        for i in 0..self.n() {
            h[(i, i)] += self.v[i];
        }
        h
    }
}

/// Screened Coulomb interaction erf(r)/r, extended by its analytic limit
/// 2/sqrt(pi) at r = 0. Strictly positive and strictly decreasing.
pub fn screened_coulomb(r: f64) -> f64 {
    assert!(r >= 0.0, "screened_coulomb needs r >= 0, got {r}");
    if r < 1e-6 {
        // Series of erf(r)/r around 0; at r = 1e-6 the truncation error is
        // far below machine epsilon while the direct quotient already loses
        // digits.
        V_AT_CONTACT * (1.0 - r * r / 3.0 + r.powi(4) / 10.0)
    } else {
        libm::erf(r) / r
    }
}

/// Electron-nuclear attraction vector v_i = sum_I -Z_I v(|x_i - R_I|).
pub fn nuclear_attraction_vector(basis: &DvrBasis, geom: &ChainGeometry) -> DVector<f64> {
    DVector::from_fn(basis.len(), |i, _| {
        let x = basis.grid()[i];
        geom.positions
            .iter()
            .zip(&geom.charges)
            .map(|(&r, &z)| -(z as f64) * screened_coulomb((x - r).abs()))
            .sum()
    })
}

/// Electron-repulsion kernel under the diagonal approximation:
/// g_ik = v(|x_i - x_k|), including the finite contact value on the diagonal.
pub fn eri_matrix(basis: &DvrBasis) -> DMatrix<f64> {
    let grid = basis.grid();
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in i..n {
            let v = screened_coulomb((grid[i] - grid[k]).abs());
            g[(i, k)] = v;
            g[(k, i)] = v;
        }
    }
    g
}

/// Nuclear repulsion sum_{I<J} Z_I Z_J v(|R_I - R_J|) under the same screened
/// interaction as the electronic terms.
///
/// Coincident nuclei are not a singularity here; they are accepted with a
/// warning on stderr.
pub fn nuclear_repulsion(geom: &ChainGeometry) -> f64 {
    let mut e = 0.0;
    for i in 0..geom.n_nuclei() {
        for j in (i + 1)..geom.n_nuclei() {
            let r = (geom.positions[i] - geom.positions[j]).abs();
            if r == 0.0 {
                eprintln!(
                    "warning: coincident nuclei {i} and {j}; screened repulsion stays finite"
                );
            }
            e += (geom.charges[i] * geom.charges[j]) as f64 * screened_coulomb(r);
        }
    }
    e
}

/// Builds the full [`IntegralSet`] for a basis and geometry.
pub fn build_integrals(basis: &DvrBasis, geom: &ChainGeometry) -> IntegralSet {
    IntegralSet {
        t: dvr::kinetic_matrix(basis),
        v: nuclear_attraction_vector(basis, geom),
        g: eri_matrix(basis),
        e_nn: nuclear_repulsion(geom),
        basis: basis.clone(),
    }
}
