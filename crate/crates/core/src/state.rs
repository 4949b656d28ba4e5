//! States, effects and the preferred basis.

use crate::error::{Error, Result};
use crate::linalg::{normalized, BipartiteLayout, ComplexMatrix};
use crate::real::Real;
use nalgebra::DVector;
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

/// Positive, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates hermiticity, positivity and unit trace at the scalar's algebra tolerance.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let tol = T::algebra_tol();
        matrix.ensure_square()?;
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect.as_f64()));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let min = matrix.eigenvalues_hermitian()?[0];
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// Wraps the output of a trace-preserving completely positive map without re-checking it.
    pub(crate) fn from_trusted(matrix: ComplexMatrix<T>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` for the normalised version of `psi`.
    pub fn pure(psi: &DVector<Complex<T>>) -> Result<Self> {
        if psi.norm() <= T::zero() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = normalized(psi);
        Ok(Self::from_trusted(ComplexMatrix::outer(&v, &v)))
    }

    /// Computational basis state `|i⟩⟨i|`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::InvalidArgument(format!("basis label {i} in dimension {dim}")));
        }
        Ok(Self::from_trusted(ComplexMatrix::matrix_unit(dim, i, i)))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Self::from_trusted(ComplexMatrix::identity(dim).scale(T::one() / T::from_count(dim))))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[T]) -> Result<Self> {
        let entries: Vec<_> = populations.iter().map(|&p| Complex::new(p, T::zero())).collect();
        Self::new(ComplexMatrix::diagonal_from(&entries))
    }

    /// Thermal state `exp(−β E)/Z` for the listed energies.
    pub fn boltzmann(energies: &[T], beta: T) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidArgument("no energy levels".into()));
        }
        let weights: Vec<T> = energies.iter().map(|&e| (-beta * e).exp()).collect();
        let z = weights.iter().fold(T::zero(), |acc, &w| acc + w);
        Self::diagonal(&weights.iter().map(|&w| w / z).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn purity(&self) -> T {
        self.matrix.trace_product_re(&self.matrix)
    }

    pub fn population(&self, i: usize) -> T {
        self.matrix.get(i, i).re
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &DensityMatrix<T>, lambda: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "mixing dimension {} with {}",
                self.dim(),
                other.dim()
            )));
        }
        if lambda < T::zero() || lambda > T::one() {
            return Err(Error::InvalidArgument("mixing weight outside [0, 1]".into()));
        }
        Ok(Self::from_trusted(
            &self.matrix.scale(lambda) + &other.matrix.scale(T::one() - lambda),
        ))
    }

    /// Convex combination of several states.
    pub fn convex(weights: &[T], states: &[DensityMatrix<T>]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch("weights and states differ in length".into()));
        }
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != first.dim() {
                return Err(Error::DimensionMismatch("mixture of different dimensions".into()));
            }
            acc = &acc + &s.matrix.scale(*w);
        }
        Self::new(acc)
    }

    pub fn tensor(&self, other: &DensityMatrix<T>) -> Self {
        Self::from_trusted(crate::linalg::tensor(&self.matrix, &other.matrix))
    }
}

/// Operator `0 ≼ M ≼ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect<T: Real> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Effect<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let tol = T::algebra_tol();
        matrix.ensure_square()?;
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect.as_f64()));
        }
        let ev = matrix.eigenvalues_hermitian()?;
        let (min, max) = (ev[0], ev[ev.len() - 1]);
        if min < -tol || max > T::one() + tol {
            return Err(Error::InvalidEffect(format!("spectrum [{min:e}, {max:e}] outside [0, 1]")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim))
    }

    /// Rank-one projector onto the normalised `psi`.
    pub fn projector(psi: &DVector<Complex<T>>) -> Result<Self> {
        Ok(Self::from_trusted(DensityMatrix::pure(psi)?.into_matrix()))
    }

    pub fn basis_projector(dim: usize, i: usize) -> Result<Self> {
        Ok(Self::from_trusted(DensityMatrix::basis(dim, i)?.into_matrix()))
    }

    pub fn complement(&self) -> Self {
        Self::from_trusted(&ComplexMatrix::identity(self.dim()) - &self.matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    /// Born-rule value `tr(M ρ)`.
    pub fn expectation(&self, rho: &DensityMatrix<T>) -> T {
        self.matrix.trace_product_re(rho.matrix())
    }
}

/// Ordering of the computational basis that defines coherence.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PreferredBasis {
    ordering: Vec<usize>,
}

impl PreferredBasis {
    pub fn new(ordering: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; ordering.len()];
        for &label in &ordering {
            if label >= ordering.len() || std::mem::replace(&mut seen[label], true) {
                return Err(Error::InvalidArgument(format!(
                    "basis ordering {ordering:?} is not a permutation"
                )));
            }
        }
        if ordering.is_empty() {
            return Err(Error::InvalidArgument("empty basis".into()));
        }
        Ok(Self { ordering })
    }

    pub fn computational(dim: usize) -> Self {
        Self { ordering: (0..dim).collect() }
    }

    pub fn dim(&self) -> usize {
        self.ordering.len()
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }
}

/// `|+⟩⟨+|` with `|+⟩ = Σ_i |i⟩/√d`.
pub fn maximally_coherent_state<T: Real>(d: usize) -> Result<DensityMatrix<T>> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let v = DVector::from_element(d, Complex::new(T::one(), T::zero()));
    DensityMatrix::pure(&v)
}

/// `|Ψ⟩ = Σ_i |i⟩|i⟩/√d` on the layout `(d, d)`.
pub fn maximally_entangled_vector<T: Real>(d: usize) -> Result<DVector<Complex<T>>> {
    let layout = BipartiteLayout::new(d, d)?;
    let mut v = DVector::zeros(layout.joint());
    let amp = Complex::new(T::one() / T::from_count(d).sqrt(), T::zero());
    for i in 0..d {
        v[layout.index(i, i)] = amp;
    }
    Ok(v)
}

pub fn maximally_entangled_state<T: Real>(d: usize) -> Result<DensityMatrix<T>> {
    DensityMatrix::pure(&maximally_entangled_vector(d)?)
}

/// Vector of independent standard complex Gaussians.
pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex<T>> {
    DVector::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    })
}

/// Haar-random pure state.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    loop {
        let v = gaussian_vector(d, rng);
        if v.norm() > T::zero() {
            return DensityMatrix::pure(&v);
        }
    }
}

/// Induced-measure mixed state `G G†/tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_mixed_state<T: Real, R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    if d == 0 || rank == 0 {
        return Err(Error::InvalidArgument("dimension and rank must be positive".into()));
    }
    let g = crate::linalg::ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from_fn(d, rank, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    }));
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    Ok(DensityMatrix::from_trusted(gg.scale(T::one() / tr).hermitian_part()))
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase correction.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = nalgebra::DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm_sqr().sqrt();
        if n > T::zero() {
            let phase = rjj / Complex::new(n, T::zero());
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    ComplexMatrix::from_dmatrix(q)
}

/// Effect `V diag(λ) V†` with Haar `V` and independent uniform `λ ∈ [0, 1]`.
pub fn random_effect<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Effect<T> {
    let v = random_unitary::<T, R>(d, rng);
    let lambdas: Vec<Complex<T>> =
        (0..d).map(|_| Complex::new(T::lit(rng.random::<f64>()), T::zero())).collect();
    let m = ComplexMatrix::diagonal_from(&lambdas).conjugate_by(&v).hermitian_part();
    Effect::from_trusted(m)
}

/// Projector onto the eigenvectors of `h` whose eigenvalue exceeds the tie tolerance.
///
/// For traceless `h` this is the optimal two-outcome measurement and
/// `tr(P h) = ‖h‖_tr / 2`.
pub fn positive_part_projector<T: Real>(h: &ComplexMatrix<T>) -> Result<Effect<T>> {
    h.ensure_square()?;
    let defect = h.hermiticity_defect();
    if defect > T::algebra_tol() {
        return Err(Error::NotHermitian(defect.as_f64()));
    }
    let eig = h.hermitian_eigen()?;
    let mut p = ComplexMatrix::zeros(h.rows(), h.rows());
    for (value, vector) in eig.values.iter().zip(&eig.vectors) {
        if *value > T::tie_tol() {
            p = &p + &ComplexMatrix::outer(vector, vector);
        }
    }
    Ok(Effect::from_trusted(p.hermitian_part()))
}
