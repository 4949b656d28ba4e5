//! Dense complex linear algebra on small Hilbert spaces.
//!
//! [`ComplexMatrix`] is a thin newtype over a `nalgebra` dense matrix. The
//! bipartite index convention is fixed crate-wide: the joint basis vector
//! `|i, α⟩` of a system/environment pair lives at index `i * dim_e + α`.

use crate::error::{Error, Result};
use crate::real::Real;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use std::ops::{Add, Mul, Neg, Sub};

/// Largest supported dimension for either tensor factor.
pub const MAX_FACTOR_DIM: usize = 8;
/// Largest supported joint dimension.
pub const MAX_JOINT_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real>(DMatrix<Complex<T>>);

impl<T: Real> ComplexMatrix<T> {
    pub fn from_dmatrix(m: DMatrix<Complex<T>>) -> Self {
        Self(m)
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex<T>]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    /// Convenience constructor from real entries, row-major.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries: Vec<Complex<T>> = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex::new(T::lit(x), T::zero())))
            .collect();
        Self::from_row_major(r, c, &entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// `|i⟩⟨j|` in dimension `dim`.
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = Complex::new(T::one(), T::zero());
        Self(m)
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &DVector<Complex<T>>, w: &DVector<Complex<T>>) -> Self {
        Self(v * w.adjoint())
    }

    pub fn diagonal_from(values: &[Complex<T>]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex<T>> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex<T>> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major_entries(&self) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> Complex<T> {
        self.0.trace()
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self(&self.0 * s)
    }

    /// `A B A†`.
    pub fn conjugate_by(&self, a: &ComplexMatrix<T>) -> Self {
        Self(&a.0 * &self.0 * a.0.adjoint())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &ComplexMatrix<T>) -> T {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch in comparison");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr().sqrt())
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }

    /// Entrywise comparison within `tol`. Matrices of different shapes are never equal.
    pub fn approx_eq(&self, other: &ComplexMatrix<T>, tol: T) -> bool {
        self.0.shape() == other.0.shape() && self.max_abs_diff(other) <= tol
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        if !self.is_square() {
            return T::max_value().unwrap_or_else(T::one);
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// `‖U†U − I‖` measured entrywise.
    pub fn unitarity_defect(&self) -> T {
        if !self.is_square() {
            return T::max_value().unwrap_or_else(T::one);
        }
        let prod = Self(self.0.adjoint() * &self.0);
        prod.max_abs_diff(&Self::identity(self.rows()))
    }

    pub fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare { rows: self.rows(), cols: self.cols() })
        }
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        self.ensure_square()?;
        let defect = self.unitarity_defect();
        if defect > T::channel_tol() {
            return Err(Error::NotUnitary(defect.as_f64()));
        }
        Ok(())
    }

    /// `(A + A†)/2`, used to scrub round-off before a Hermitian eigensolve.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self((&self.0 + self.0.adjoint()).map(|z| z * half))
    }

    /// Real part of `tr(A B)`.
    pub fn trace_product_re(&self, other: &ComplexMatrix<T>) -> T {
        let n = self.rows();
        let m = self.cols();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for k in 0..m {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc.re
    }

    /// Hermitian matrix with every diagonal entry set to zero.
    pub fn hollow(&self) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows().min(m.ncols()) {
            m[(i, i)] = Complex::new(T::zero(), T::zero());
        }
        Self(m)
    }

    /// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> Result<HermitianEigen<T>> {
        self.ensure_square()?;
        let eig = self.hermitian_part().0.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
        Ok(HermitianEigen { values, vectors })
    }

    pub fn eigenvalues_hermitian(&self) -> Result<Vec<T>> {
        self.ensure_square()?;
        let mut values: Vec<T> =
            self.hermitian_part().0.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(values)
    }
}

/// Spectrum of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: Vec<DVector<Complex<T>>>,
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        ComplexMatrix(-&self.0)
    }
}

/// Factorisation `H_S ⊗ H_E` with the `(i, α) → i·dim_e + α` index map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BipartiteLayout {
    pub dim_s: usize,
    pub dim_e: usize,
}

impl BipartiteLayout {
    pub fn new(dim_s: usize, dim_e: usize) -> Result<Self> {
        let layout = Self { dim_s, dim_e };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_s == 0 || self.dim_e == 0 {
            return Err(Error::InvalidArgument("layout dimensions must be positive".into()));
        }
        for dim in [self.dim_s, self.dim_e] {
            if dim > MAX_FACTOR_DIM {
                return Err(Error::DimensionCap { dim, cap: MAX_FACTOR_DIM });
            }
        }
        if self.joint() > MAX_JOINT_DIM {
            return Err(Error::DimensionCap { dim: self.joint(), cap: MAX_JOINT_DIM });
        }
        Ok(())
    }

    pub fn joint(&self) -> usize {
        self.dim_s * self.dim_e
    }

    pub fn index(&self, i: usize, alpha: usize) -> usize {
        i * self.dim_e + alpha
    }

    fn check(&self, m: &ComplexMatrix<impl Real>) -> Result<()> {
        if m.rows() != self.joint() || m.cols() != self.joint() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for layout {}x{}",
                m.rows(),
                m.cols(),
                self.dim_s,
                self.dim_e
            )));
        }
        Ok(())
    }
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Environment,
}

/// Kronecker product `a ⊗ b`.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    ComplexMatrix(a.0.kronecker(&b.0))
}

pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    layout: BipartiteLayout,
    keep: Subsystem,
) -> Result<ComplexMatrix<T>> {
    layout.check(m)?;
    let (ds, de) = (layout.dim_s, layout.dim_e);
    let zero = Complex::new(T::zero(), T::zero());
    let out = match keep {
        Subsystem::System => DMatrix::from_fn(ds, ds, |i, j| {
            (0..de).fold(zero, |acc, a| acc + m.0[(layout.index(i, a), layout.index(j, a))])
        }),
        Subsystem::Environment => DMatrix::from_fn(de, de, |a, b| {
            (0..ds).fold(zero, |acc, i| acc + m.0[(layout.index(i, a), layout.index(i, b))])
        }),
    };
    Ok(ComplexMatrix(out))
}

/// Transpose on the environment factor only.
pub fn partial_transpose<T: Real>(
    m: &ComplexMatrix<T>,
    layout: BipartiteLayout,
) -> Result<ComplexMatrix<T>> {
    layout.check(m)?;
    let de = layout.dim_e;
    let out = DMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        let (i, a) = (r / de, r % de);
        let (j, b) = (c / de, c % de);
        m.0[(layout.index(i, b), layout.index(j, a))]
    });
    Ok(ComplexMatrix(out))
}

/// Sum of singular values. Hermitian inputs go through the eigensolver.
pub fn trace_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    m.ensure_square()?;
    if m.is_hermitian(T::algebra_tol()) {
        let values = m.eigenvalues_hermitian()?;
        Ok(values.iter().fold(T::zero(), |acc, v| acc + v.abs()))
    } else {
        let svd = m.0.clone().svd(false, false);
        Ok(svd.singular_values.iter().fold(T::zero(), |acc, &s| acc + s))
    }
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let svd = m.0.clone().svd(false, false);
    svd.singular_values.iter().fold(T::zero(), |acc, &s| if s > acc { s } else { acc })
}

/// Normalised copy of a nonzero vector.
pub fn normalized<T: Real>(v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
    let n = v.norm();
    v.map(|z| z / Complex::new(n, T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn phi_plus() -> ComplexMatrix<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        ComplexMatrix::outer(&v, &v)
    }

    fn pauli_x() -> ComplexMatrix<f64> {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        assert!(tensor(&i2, &i2).approx_eq(&ComplexMatrix::identity(4), 0.0));
    }

    #[test]
    fn basis_projector_tensor_lands_on_layout_index() {
        let p0 = ComplexMatrix::<f64>::matrix_unit(2, 0, 0);
        let p1 = ComplexMatrix::<f64>::matrix_unit(2, 1, 1);
        let t = tensor(&p0, &p1);
        let layout = BipartiteLayout::new(2, 2).unwrap();
        let k = layout.index(0, 1);
        assert_eq!(k, 1);
        for r in 0..4 {
            for col in 0..4 {
                let expected = if r == k && col == k { 1.0 } else { 0.0 };
                assert_eq!(t.get(r, col), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn sigma_x_tensor_flips_both_bits() {
        let xx = tensor(&pauli_x(), &pauli_x());
        let ket00 = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let out = xx.as_dmatrix() * ket00;
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (z, e) in out.iter().zip(expected) {
            assert!((z - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn bell_state_marginals_are_maximally_mixed() {
        let layout = BipartiteLayout::new(2, 2).unwrap();
        let half = ComplexMatrix::<f64>::identity(2).scale(0.5);
        let rs = partial_trace(&phi_plus(), layout, Subsystem::System).unwrap();
        let re = partial_trace(&phi_plus(), layout, Subsystem::Environment).unwrap();
        assert!(rs.approx_eq(&half, 1e-15));
        assert!(re.approx_eq(&half, 1e-15));
    }

    #[test]
    fn product_state_marginal_is_the_factor() {
        let layout = BipartiteLayout::new(2, 3).unwrap();
        let a = ComplexMatrix::<f64>::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]]).unwrap();
        let b = ComplexMatrix::<f64>::from_real_rows(&[
            &[0.5, 0.1, 0.0],
            &[0.1, 0.25, 0.05],
            &[0.0, 0.05, 0.25],
        ])
        .unwrap();
        let ab = tensor(&a, &b);
        assert!(partial_trace(&ab, layout, Subsystem::System).unwrap().approx_eq(&a, 1e-15));
        assert!(partial_trace(&ab, layout, Subsystem::Environment).unwrap().approx_eq(&b, 1e-15));
    }

    #[test]
    fn partial_trace_rejects_wrong_size() {
        let layout = BipartiteLayout::new(2, 2).unwrap();
        let m = ComplexMatrix::<f64>::identity(3);
        assert!(matches!(
            partial_trace(&m, layout, Subsystem::System),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(partial_transpose(&m, layout).is_err());
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&ComplexMatrix::<f64>::zeros(3, 3)).unwrap(), 0.0);
        assert!((trace_norm(&ComplexMatrix::<f64>::identity(4)).unwrap() - 4.0).abs() < 1e-14);
        let hollow = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]).unwrap();
        assert!((trace_norm(&hollow).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            trace_norm(&ComplexMatrix::<f64>::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn trace_norm_of_non_hermitian_uses_singular_values() {
        // |0⟩⟨1| has a single singular value 1.
        let m = ComplexMatrix::<f64>::matrix_unit(2, 0, 1);
        assert!((trace_norm(&m).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_partial_transpose_has_negative_eigenvalue() {
        let layout = BipartiteLayout::new(2, 2).unwrap();
        let pt = partial_transpose(&phi_plus(), layout).unwrap();
        let ev = pt.eigenvalues_hermitian().unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-14);
        assert!(ev[1..].iter().all(|&v| (v - 0.5).abs() < 1e-14));
    }

    #[test]
    fn partial_transpose_of_product_transposes_environment_factor() {
        let layout = BipartiteLayout::new(2, 2).unwrap();
        let a = ComplexMatrix::<f64>::from_real_rows(&[&[0.6, 0.1], &[0.1, 0.4]]).unwrap();
        let b = ComplexMatrix::<f64>::from_row_major(
            2,
            2,
            &[c(0.5, 0.0), c(0.2, 0.3), c(0.2, -0.3), c(0.5, 0.0)],
        )
        .unwrap();
        let pt = partial_transpose(&tensor(&a, &b), layout).unwrap();
        assert!(pt.approx_eq(&tensor(&a, &b.transpose()), 1e-15));
    }

    #[test]
    fn layout_caps_are_enforced() {
        assert!(BipartiteLayout::new(9, 1).is_err());
        assert!(BipartiteLayout::new(0, 2).is_err());
        assert!(BipartiteLayout::new(8, 8).is_ok());
    }

    #[test]
    fn single_precision_instantiation() {
        let hollow = ComplexMatrix::<f32>::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]).unwrap();
        assert!((trace_norm(&hollow).unwrap() - 1.0).abs() < 1e-6);
    }

    fn arb_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
            let entries: Vec<_> = v.into_iter().map(|(re, im)| c(re, im)).collect();
            ComplexMatrix::from_row_major(dim, dim, &entries).unwrap()
        })
    }

    fn arb_hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
        arb_matrix(dim).prop_map(|m| m.hermitian_part())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn partial_transpose_is_an_involution(m in arb_matrix(6)) {
            let layout = BipartiteLayout::new(2, 3).unwrap();
            let twice = partial_transpose(&partial_transpose(&m, layout).unwrap(), layout).unwrap();
            prop_assert!(twice.approx_eq(&m, 1e-12));
        }

        #[test]
        fn trace_norm_is_a_norm(a in arb_hermitian(3), b in arb_hermitian(3), s in -3.0f64..3.0) {
            let na = trace_norm(&a).unwrap();
            let nb = trace_norm(&b).unwrap();
            prop_assert!(na >= 0.0);
            prop_assert!((trace_norm(&a.scale(s)).unwrap() - s.abs() * na).abs() < 1e-9);
            prop_assert!(trace_norm(&(&a + &b)).unwrap() <= na + nb + 1e-9);
        }
    }
}
