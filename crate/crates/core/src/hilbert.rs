//! Truncated-oscillator operators, density-matrix validation, Hermitian
//! spectra, entropies, and momentum-space eigenfunctions.
//!
//! Everything works on small dense complex matrices. Operators built from the
//! ladder algebra are always the matrix elements of the untruncated operators
//! restricted to the lowest `dim` levels, so diagonal entries stay exact all
//! the way to the top level.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Max |A - A^dagger| element tolerated before an operator is rejected as
/// non-Hermitian by the eigendecomposition.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Hermiticity drift tolerated when validating a density matrix.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-12;
/// |Tr rho - 1| tolerated when validating a density matrix.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated when validating a density matrix.
pub const DENSITY_EIGENVALUE_FLOOR: f64 = -1e-10;
/// Eigenvalues below this threshold count as exactly zero inside entropies.
pub const ENTROPY_CLIP: f64 = 1e-12;
/// Max |V L V^dagger - A| element tolerated in a returned spectrum.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Dense complex operator on the truncated oscillator space (dim >= 2, finite
/// entries).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    mat: CMatrix,
}

impl OperatorMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                left: mat.nrows(),
                right: mat.ncols(),
            });
        }
        if mat.nrows() < 2 {
            return Err(Error::InvalidDimension(mat.nrows()));
        }
        if mat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidState {
                reason: "non-finite operator entry",
                metric: f64::NAN,
            });
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.mat)
    }
}

/// Validated density matrix: Hermitian within 1e-12, unit trace within 1e-10,
/// eigenvalues above -1e-10.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                left: mat.nrows(),
                right: mat.ncols(),
            });
        }
        let herm = hermiticity_deviation(&mat);
        if !(herm <= DENSITY_HERMITICITY_TOL) {
            return Err(Error::HermiticityViolation { deviation: herm });
        }
        let trace = mat.trace();
        let trace_dev = (trace.re - 1.0).abs().max(trace.im.abs());
        if !(trace_dev <= DENSITY_TRACE_TOL) {
            return Err(Error::InvalidState {
                reason: "trace differs from one",
                metric: trace_dev,
            });
        }
        // Work with the exactly Hermitian part so the eigenvalues are real.
        let sym = (&mat + mat.adjoint()) * Complex::new(0.5, 0.0);
        let eigs = sym.symmetric_eigenvalues();
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < DENSITY_EIGENVALUE_FLOOR {
            return Err(Error::InvalidState {
                reason: "negative eigenvalue",
                metric: min_eig,
            });
        }
        Ok(Self { mat })
    }

    /// Constructor for integrator output, where the positivity budget is the
    /// integrator's (wider) one. The matrix must already be exactly Hermitian
    /// and trace-renormalized; `eig_floor` is the accepted negativity.
    pub(crate) fn from_evolution(mat: CMatrix, eig_floor: f64) -> Result<Self> {
        let herm = hermiticity_deviation(&mat);
        if !(herm <= DENSITY_HERMITICITY_TOL) {
            return Err(Error::HermiticityViolation { deviation: herm });
        }
        let trace = mat.trace();
        let trace_dev = (trace.re - 1.0).abs().max(trace.im.abs());
        if !(trace_dev <= DENSITY_TRACE_TOL) {
            return Err(Error::InvalidState {
                reason: "trace differs from one",
                metric: trace_dev,
            });
        }
        let min_eig = mat
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < eig_floor {
            return Err(Error::InvalidState {
                reason: "negative eigenvalue",
                metric: min_eig,
            });
        }
        Ok(Self { mat })
    }

    /// Projector |psi><psi| onto a normalized state vector.
    pub fn from_pure(state: &CVector) -> Result<Self> {
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState {
                reason: "state vector is not normalized",
                metric: (norm - 1.0).abs(),
            });
        }
        let mat = state * state.adjoint();
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Diagonal entries as real populations.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }
}

/// Eigendecomposition of a Hermitian operator: eigenvalues ascending,
/// orthonormal eigenvector columns, reconstruction verified to 1e-10.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// Rebuild V diag(lambda) V^dagger.
    pub fn reconstruct(&self) -> CMatrix {
        let lambda = CMatrix::from_fn(self.eigenvalues.len(), self.eigenvalues.len(), |i, j| {
            if i == j {
                Complex::new(self.eigenvalues[i], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * lambda * self.eigenvectors.adjoint()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }
}

/// Annihilation and creation operators on the lowest `dim` levels:
/// a[n-1, n] = sqrt(n).
pub fn ladder_operators(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    Ok((OperatorMatrix::new(a)?, OperatorMatrix::new(adag)?))
}

/// Squared quadratures and the oscillator Hamiltonian on the lowest `dim`
/// levels, for X = (a + a^dagger)/sqrt(2 omega) and
/// P = i (a^dagger - a) sqrt(omega / 2):
///
/// ```text
/// X^2[n, n]   = (2n + 1) / (2 omega)      X^2[n, n+2] =  sqrt((n+1)(n+2)) / (2 omega)
/// P^2[n, n]   = omega (2n + 1) / 2        P^2[n, n+2] = -omega sqrt((n+1)(n+2)) / 2
/// H[n, n]     = omega (n + 1/2)
/// ```
///
/// Entries are the matrix elements of the untruncated operators, so
/// P^2 / 2 + omega^2 X^2 / 2 = H holds exactly at every dimension.
pub fn quadrature_operators(
    dim: usize,
    omega: f64,
) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            reason: "oscillator frequency must be positive",
        });
    }
    let mut x_sq = CMatrix::zeros(dim, dim);
    let mut p_sq = CMatrix::zeros(dim, dim);
    let mut h = CMatrix::zeros(dim, dim);
    for n in 0..dim {
        let nf = n as f64;
        x_sq[(n, n)] = Complex::new((2.0 * nf + 1.0) / (2.0 * omega), 0.0);
        p_sq[(n, n)] = Complex::new(omega * (2.0 * nf + 1.0) / 2.0, 0.0);
        h[(n, n)] = Complex::new(omega * (nf + 0.5), 0.0);
        if n + 2 < dim {
            let c = ((nf + 1.0) * (nf + 2.0)).sqrt();
            x_sq[(n, n + 2)] = Complex::new(c / (2.0 * omega), 0.0);
            x_sq[(n + 2, n)] = Complex::new(c / (2.0 * omega), 0.0);
            p_sq[(n, n + 2)] = Complex::new(-omega * c / 2.0, 0.0);
            p_sq[(n + 2, n)] = Complex::new(-omega * c / 2.0, 0.0);
        }
    }
    Ok((
        OperatorMatrix::new(x_sq)?,
        OperatorMatrix::new(p_sq)?,
        OperatorMatrix::new(h)?,
    ))
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending
/// and the reconstruction re-verified.
pub fn eig_hermitian(mat: &CMatrix) -> Result<Spectrum> {
    let dev = hermiticity_deviation(mat);
    if !(dev <= HERMITICITY_TOL) {
        return Err(Error::HermiticityViolation { deviation: dev });
    }
    // Diagonalize the exactly Hermitian part; the deviation above bounds the
    // difference this makes.
    let sym = (mat + mat.adjoint()) * Complex::new(0.5, 0.0);
    let se = sym.symmetric_eigen();

    let n = mat.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }

    let spectrum = Spectrum {
        eigenvalues,
        eigenvectors,
    };
    let recon_dev = max_abs(&(spectrum.reconstruct() - mat));
    if !(recon_dev <= RECONSTRUCTION_TOL) {
        return Err(Error::NumericalFailure {
            context: "eigendecomposition reconstruction drifted",
            estimate: spectrum.eigenvalues.iter().sum(),
            error: recon_dev,
        });
    }
    Ok(spectrum)
}

/// Entropy -sum(p ln p) of a probability-like list, treating entries below
/// the clipping threshold as exactly zero. Natural logarithm.
pub fn entropy_of_probabilities(ps: &[f64]) -> f64 {
    ps.iter()
        .filter(|&&p| p >= ENTROPY_CLIP)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Von Neumann entropy S(rho) = -Tr[rho ln rho] in nats.
///
/// Eigenvalues inside [-1e-10, 1e-12) are treated as zero; anything more
/// negative means the input left the state space and is rejected.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let spectrum = eig_hermitian(rho.matrix())?;
    entropy_from_eigenvalues(&spectrum.eigenvalues)
}

/// Entropy from a precomputed eigenvalue list, with the same clipping and
/// rejection rules as [`von_neumann_entropy`].
pub fn entropy_from_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let min_eig = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < DENSITY_EIGENVALUE_FLOOR {
        return Err(Error::InvalidState {
            reason: "negative eigenvalue",
            metric: min_eig,
        });
    }
    let trace: f64 = eigenvalues.iter().sum();
    if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
        return Err(Error::InvalidState {
            reason: "trace differs from one",
            metric: (trace - 1.0).abs(),
        });
    }
    Ok(entropy_of_probabilities(eigenvalues))
}

/// Entropy of an eigenvalue list that may contain genuine negative weight:
/// negative entries are clipped to zero and the rest renormalized to unit sum.
///
/// This is the documented fallback for matrices produced by closed-form
/// expressions that leave the state space; the returned `negativity` (the
/// magnitude of the most negative eigenvalue, zero if none) makes the clipping
/// visible to callers.
pub fn clipped_entropy(eigenvalues: &[f64]) -> (f64, f64) {
    let min_eig = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let negativity = (-min_eig).max(0.0);
    let clipped: Vec<f64> = eigenvalues.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return (0.0, negativity);
    }
    let normalized: Vec<f64> = clipped.iter().map(|&p| p / total).collect();
    (entropy_of_probabilities(&normalized), negativity)
}

/// Momentum-space oscillator eigenfunction psi_n(p) for frequency `omega`
/// (hbar = 1):
///
/// ```text
/// psi_n(p) = (pi omega)^(-1/4) (2^n n!)^(-1/2) H_n(p / sqrt(omega)) e^(-p^2 / (2 omega))
/// ```
///
/// Evaluated through the three-term recurrence of the normalized Hermite
/// functions, which stays stable for all n and p of interest.
pub fn momentum_wavefunction(n: usize, omega: f64, p: f64) -> f64 {
    debug_assert!(omega > 0.0, "omega must be positive");
    let x = p / omega.sqrt();
    let gauss = (-0.5 * x * x).exp();
    let h0 = std::f64::consts::PI.powf(-0.25) * gauss;
    if n == 0 {
        return omega.powf(-0.25) * h0;
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * x * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    omega.powf(-0.25) * cur
}

/// Random density matrix drawn from the Ginibre ensemble: rho = G G^dagger
/// normalized to unit trace. Full rank with probability one.
pub fn random_density_matrix<R: Rng>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let g = CMatrix::from_fn(dim, dim, |_, _| standard_complex(rng));
    let mut rho = &g * g.adjoint();
    let trace = rho.trace().re;
    rho /= Complex::new(trace, 0.0);
    // kill rounding asymmetry before validation
    let rho = (&rho + rho.adjoint()) * Complex::new(0.5, 0.0);
    DensityMatrix::new(rho)
}

/// Random normalized pure state with complex Gaussian amplitudes.
pub fn random_pure_state<R: Rng>(rng: &mut R, dim: usize) -> Result<CVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut v = CVector::from_fn(dim, |_, _| standard_complex(rng));
    let norm = v.norm();
    v /= Complex::new(norm, 0.0);
    Ok(v)
}

fn standard_complex<R: Rng>(rng: &mut R) -> C64 {
    // Box-Muller from uniform draws; keeps the dependency surface small.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex::new(r * theta.cos(), r * theta.sin()) * Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    #[test]
    fn ladder_matrix_elements() {
        for dim in 2..=8 {
            let (a, adag) = ladder_operators(dim).unwrap();
            for n in 1..dim {
                let want = (n as f64).sqrt();
                assert_eq!(a.matrix()[(n - 1, n)], z(want, 0.0));
                assert_eq!(adag.matrix()[(n, n - 1)], z(want, 0.0));
            }
            // number operator a^dagger a = diag(0..dim-1), exact at every level
            let num = adag.matrix() * a.matrix();
            for n in 0..dim {
                assert!((num[(n, n)] - z(n as f64, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn ladder_commutator_truncates_at_top() {
        let dim = 6;
        let (a, adag) = ladder_operators(dim).unwrap();
        let comm = a.matrix() * adag.matrix() - adag.matrix() * a.matrix();
        for n in 0..dim - 1 {
            assert!((comm[(n, n)] - z(1.0, 0.0)).norm() < 1e-14);
        }
        // the top level loses the raising path in the truncated product
        assert!((comm[(dim - 1, dim - 1)] - z(-(dim as f64 - 1.0), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quadrature_known_entries() {
        let (x_sq, _, h) = quadrature_operators(3, 1.0).unwrap();
        assert!((x_sq.matrix()[(0, 2)] - z(std::f64::consts::SQRT_2 / 2.0, 0.0)).norm() < 1e-15);
        let (_, _, h2) = quadrature_operators(2, 1.0).unwrap();
        assert!((h2.matrix()[(0, 0)] - z(0.5, 0.0)).norm() < 1e-15);
        assert!((h2.matrix()[(1, 1)] - z(1.5, 0.0)).norm() < 1e-15);
        assert!((h.matrix()[(2, 2)] - z(2.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quadratures_match_untruncated_ladder_products() {
        // Build (a + a^dagger)^2 etc. in a larger space and compare the
        // truncated block: an independent route to the same matrix elements.
        let omega: f64 = 0.7;
        let dim = 5;
        let big = dim + 2;
        let (a, adag) = ladder_operators(big).unwrap();
        let x_big = (a.matrix() + adag.matrix()) * z(1.0 / (2.0 * omega).sqrt(), 0.0);
        let p_big = (adag.matrix() - a.matrix()) * z(0.0, 1.0) * z((omega / 2.0).sqrt(), 0.0);
        let x_sq_big = &x_big * &x_big;
        let p_sq_big = &p_big * &p_big;

        let (x_sq, p_sq, h) = quadrature_operators(dim, omega).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                assert!(
                    (x_sq.matrix()[(i, j)] - x_sq_big[(i, j)]).norm() < 1e-12,
                    "x_sq mismatch at ({i},{j})"
                );
                assert!(
                    (p_sq.matrix()[(i, j)] - p_sq_big[(i, j)]).norm() < 1e-12,
                    "p_sq mismatch at ({i},{j})"
                );
            }
        }
        // energy identity, exact by construction
        let lhs = p_sq.matrix() * z(0.5, 0.0) + x_sq.matrix() * z(0.5 * omega * omega, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                assert!((lhs[(i, j)] - h.matrix()[(i, j)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_bad_dimensions_and_parameters() {
        assert!(ladder_operators(1).is_err());
        assert!(quadrature_operators(3, 0.0).is_err());
        assert!(quadrature_operators(3, -2.0).is_err());
    }

    #[test]
    fn eig_known_two_by_two() {
        let m = CMatrix::from_row_slice(2, 2, &[z(0.5, 0.0), z(0.0, -0.5), z(0.0, 0.5), z(0.5, 0.0)]);
        let s = eig_hermitian(&m).unwrap();
        assert!((s.eigenvalues[0] - 0.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2usize, 3, 4, 6, 9] {
            let g = CMatrix::from_fn(dim, dim, |_, _| standard_complex(&mut rng));
            let herm = (&g + g.adjoint()) * z(0.5, 0.0);
            let s = eig_hermitian(&herm).unwrap();
            // ascending
            for w in s.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
            // orthonormal columns
            let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
            for i in 0..dim {
                for j in 0..dim {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((gram[(i, j)] - z(want, 0.0)).norm() < 1e-12);
                }
            }
            // reconstruction
            let dev = max_abs(&(s.reconstruct() - &herm));
            assert!(dev < 1e-12, "reconstruction dev {dev:.2e}");
            // eigenvalue product matches the determinant for small dims
            if dim <= 4 {
                let det = herm.determinant();
                let prod: f64 = s.eigenvalues.iter().product();
                assert!((det.re - prod).abs() < 1e-8 * (1.0 + prod.abs()));
                assert!(det.im.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[z(1.0, 0.0), z(0.5, 0.0), z(0.0, 0.0), z(1.0, 0.0)]);
        match eig_hermitian(&m) {
            Err(Error::HermiticityViolation { deviation }) => assert!(deviation > 0.4),
            other => panic!("expected hermiticity violation, got {other:?}"),
        }
    }

    #[test]
    fn density_matrix_validation() {
        // valid: maximally mixed
        let m = CMatrix::from_fn(3, 3, |i, j| if i == j { z(1.0 / 3.0, 0.0) } else { z(0.0, 0.0) });
        assert!(DensityMatrix::new(m).is_ok());

        // trace off
        let m = CMatrix::from_fn(3, 3, |i, j| if i == j { z(0.5, 0.0) } else { z(0.0, 0.0) });
        assert!(DensityMatrix::new(m).is_err());

        // negative eigenvalue
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[z(1.1, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(-0.1, 0.0)],
        );
        assert!(DensityMatrix::new(m).is_err());

        // non-Hermitian
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[z(0.5, 0.0), z(0.1, 0.0), z(0.3, 0.0), z(0.5, 0.0)],
        );
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn entropy_known_values() {
        // pure state
        let v = CVector::from_vec(vec![z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0)]);
        let rho = DensityMatrix::from_pure(&v).unwrap();
        assert!(von_neumann_entropy(&rho).unwrap() <= 1e-12);

        // diag(1/2, 1/4, 1/4) -> 1.5 ln 2
        let m = CMatrix::from_fn(3, 3, |i, j| {
            if i != j {
                z(0.0, 0.0)
            } else if i == 0 {
                z(0.5, 0.0)
            } else {
                z(0.25, 0.0)
            }
        });
        let rho = DensityMatrix::new(m).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - 1.5 * std::f64::consts::LN_2).abs() < 1e-12);

        // maximally mixed: ln(dim)
        for dim in [2usize, 3, 5] {
            let m = CMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    z(1.0 / dim as f64, 0.0)
                } else {
                    z(0.0, 0.0)
                }
            });
            let rho = DensityMatrix::new(m).unwrap();
            let s = von_neumann_entropy(&rho).unwrap();
            assert!((s - (dim as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_rejects_invalid_spectra() {
        assert!(entropy_from_eigenvalues(&[1.05, -0.05]).is_err());
        assert!(entropy_from_eigenvalues(&[0.7, 0.2]).is_err());
        // boundary negativity within the floor is clipped, not rejected
        let s = entropy_from_eigenvalues(&[1.0 + 5e-11, -5e-11]).unwrap();
        assert!(s.abs() < 1e-9);
    }

    #[test]
    fn clipped_entropy_reports_negativity() {
        let (s, neg) = clipped_entropy(&[0.74, 0.31, -0.05]);
        assert!((neg - 0.05).abs() < 1e-15);
        let p0: f64 = 0.74 / 1.05;
        let p1: f64 = 0.31 / 1.05;
        let want = -p0 * p0.ln() - p1 * p1.ln();
        assert!((s - want).abs() < 1e-12);

        let (s_clean, neg_clean) = clipped_entropy(&[0.5, 0.5, 0.0]);
        assert!((s_clean - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(neg_clean, 0.0);
    }

    #[test]
    fn majorization_diagonal_entropy_dominates() {
        // dephasing can only raise the entropy (the diagonal is majorized by
        // the spectrum); checked over seeded random states
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let rho = random_density_matrix(&mut rng, 3).unwrap();
            let s_rho = von_neumann_entropy(&rho).unwrap();
            let s_diag = entropy_of_probabilities(&rho.populations());
            assert!(s_diag >= s_rho - 1e-12);
        }
    }

    #[test]
    fn wavefunction_ground_state_value() {
        let want = std::f64::consts::PI.powf(-0.25);
        assert!((momentum_wavefunction(0, 1.0, 0.0) - want).abs() < 1e-14);
    }

    #[test]
    fn wavefunction_matches_explicit_hermite() {
        // H_2(x) = 4x^2 - 2, H_3(x) = 8x^3 - 12x with normalization
        // (2^n n! sqrt(pi))^(-1/2) e^(-x^2/2)
        let omega: f64 = 1.3;
        for &p in &[-2.1, -0.4, 0.0, 0.9, 2.7] {
            let x: f64 = p / omega.sqrt();
            let gauss = (-0.5 * x * x).exp();
            let h2 = (4.0 * x * x - 2.0) * gauss
                / (4.0 * 2.0 * std::f64::consts::PI.sqrt()).sqrt();
            let h3 = (8.0 * x * x * x - 12.0 * x) * gauss
                / (8.0 * 6.0 * std::f64::consts::PI.sqrt()).sqrt();
            let w2 = momentum_wavefunction(2, omega, p);
            let w3 = momentum_wavefunction(3, omega, p);
            assert!((w2 - omega.powf(-0.25) * h2).abs() < 1e-13, "n=2 at p={p}");
            assert!((w3 - omega.powf(-0.25) * h3).abs() < 1e-13, "n=3 at p={p}");
        }
    }

    #[test]
    fn wavefunction_parity() {
        for n in 0..6 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let plus = momentum_wavefunction(n, 0.8, 1.7);
            let minus = momentum_wavefunction(n, 0.8, -1.7);
            assert!((minus - sign * plus).abs() < 1e-13);
        }
    }

    #[test]
    fn wavefunction_orthonormality() {
        // Simpson quadrature of psi_m psi_n over a wide window
        let omega: f64 = 2.0;
        let l = 12.0 * omega.sqrt();
        let n_steps = 4000;
        let h = 2.0 * l / n_steps as f64;
        for m in 0..=5 {
            for n in m..=5 {
                let f = |p: f64| momentum_wavefunction(m, omega, p) * momentum_wavefunction(n, omega, p);
                let mut s = f(-l) + f(l);
                for k in 1..n_steps {
                    let p = -l + k as f64 * h;
                    s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(p);
                }
                let integral = s * h / 3.0;
                let want = if m == n { 1.0 } else { 0.0 };
                assert!(
                    (integral - want).abs() < 1e-8,
                    "overlap ({m},{n}) = {integral}"
                );
            }
        }
    }

    #[test]
    fn random_states_are_valid_and_deterministic() {
        let mut rng_a = ChaCha8Rng::seed_from_u64(5);
        let mut rng_b = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let ra = random_density_matrix(&mut rng_a, 4).unwrap();
            let rb = random_density_matrix(&mut rng_b, 4).unwrap();
            assert_eq!(ra.matrix(), rb.matrix());
        }
        let v = random_pure_state(&mut rng_a, 3).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}
