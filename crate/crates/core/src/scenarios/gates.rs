//! Small fixed unitaries used by the scenario catalogue.

use crate::linalg::{tensor, ComplexMatrix};
use crate::real::Real;
use nalgebra::DMatrix;
use num_complex::Complex;

pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
    let s = T::one() / T::lit(2.0).sqrt();
    let c = |x: T| Complex::new(x, T::zero());
    ComplexMatrix::from_dmatrix(DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]))
}

pub fn pauli_x<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2 literal")
}

/// Controlled-NOT with the first (system) factor as control.
pub fn cnot<T: Real>() -> ComplexMatrix<T> {
    controlled(&ComplexMatrix::identity(2), &pauli_x())
}

/// `a ⊗ |0⟩⟨0| + b ⊗ |1⟩⟨1|` on a system ⊗ qubit-environment layout,
/// i.e. the system unitary applied is chosen by the environment bit.
pub fn environment_controlled<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    &tensor(a, &ComplexMatrix::matrix_unit(2, 0, 0)) + &tensor(b, &ComplexMatrix::matrix_unit(2, 1, 1))
}

/// `|0⟩⟨0| ⊗ a + |1⟩⟨1| ⊗ b` on a qubit-system ⊗ environment layout.
pub fn controlled<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    &tensor(&ComplexMatrix::matrix_unit(2, 0, 0), a) + &tensor(&ComplexMatrix::matrix_unit(2, 1, 1), b)
}

/// `diag(e^{iθ_0}, …)`.
pub fn phase_diagonal<T: Real>(phases: &[f64]) -> ComplexMatrix<T> {
    let entries: Vec<Complex<T>> =
        phases.iter().map(|&p| Complex::new(T::lit(p.cos()), T::lit(p.sin()))).collect();
    ComplexMatrix::diagonal_from(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates_are_unitary() {
        assert!(hadamard::<f64>().unitarity_defect() < 1e-15);
        assert!(cnot::<f64>().unitarity_defect() < 1e-15);
        assert!(environment_controlled::<f64>(&ComplexMatrix::identity(2), &pauli_x()).unitarity_defect() < 1e-15);
        assert!(phase_diagonal::<f64>(&[0.0, 0.7]).unitarity_defect() < 1e-15);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let c = cnot::<f64>();
        assert_eq!(c.get(3, 2).re, 1.0);
        assert_eq!(c.get(0, 0).re, 1.0);
    }
}
