//! Piecewise-constant volume forms as exact volume cocycles.
//!
//! A constant n-form on a simplex is determined by its integral and the
//! orientation, so a PC volume form is represented *by* its cocycle: one
//! strictly positive rational per top cell of a coherently oriented
//! complex. Densities per unit Euclidean volume are derived, approximate
//! and display-only.

use crate::complex::Complex;
use crate::scalar::{scalar_to_f64, Scalar};
use crate::transfer::TransferMap;
use num_traits::{Signed, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FormError {
    #[error("cocycle value for cell {0} must be strictly positive")]
    NonPositiveVolume(usize),
    #[error("complex is not oriented")]
    NotOriented,
    #[error("expected {expected} cocycle values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("forms live on different complexes")]
    ComplexMismatch,
    #[error("transfer step was solved against other cocycle values (cell {cell}: step saw {solved}, form has {current})")]
    StaleStep { cell: usize, solved: String, current: String },
}

/// A piecewise-constant volume form on an oriented complex.
#[derive(Debug, Clone, PartialEq)]
pub struct PCForm {
    complex: Arc<Complex>,
    values: Vec<Scalar>,
}

impl PCForm {
    /// Builds a form from its cocycle. The complex must carry a coherent
    /// orientation and every value must be strictly positive.
    pub fn from_cocycle(complex: Arc<Complex>, values: Vec<Scalar>) -> Result<Self, FormError> {
        if !complex.is_oriented() {
            return Err(FormError::NotOriented);
        }
        if values.len() != complex.num_cells() {
            return Err(FormError::WrongLength { expected: complex.num_cells(), got: values.len() });
        }
        for (cell, v) in values.iter().enumerate() {
            if !v.is_positive() {
                return Err(FormError::NonPositiveVolume(cell));
            }
        }
        Ok(PCForm { complex, values })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    /// The volume cocycle, indexed by cell id.
    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> &Scalar {
        &self.values[cell]
    }

    /// Total volume: the sum of the cocycle.
    pub fn total_volume(&self) -> Scalar {
        self.values.iter().sum()
    }

    /// Volume per unit Euclidean volume of a cell. Float, display-only.
    pub fn density_approx(&self, cell: usize) -> f64 {
        let euclid = self.complex.euclidean_volume_approx(cell).unwrap_or(f64::NAN);
        scalar_to_f64(&self.values[cell]) / euclid
    }

    pub fn same_complex(&self, other: &PCForm) -> bool {
        Arc::ptr_eq(&self.complex, &other.complex) || self.complex.as_ref() == other.complex.as_ref()
    }
}

/// The difference of two volume cocycles on a common complex.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffCocycle {
    values: Vec<Scalar>,
}

impl DiffCocycle {
    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> &Scalar {
        &self.values[cell]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn total(&self) -> Scalar {
        self.values.iter().sum()
    }

    /// Cells with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}

/// D = (cocycle of `to_form`) pointwise minus (cocycle of `from_form`),
/// i.e. the excess of the second argument over the first.
pub fn diff_cocycle(from_form: &PCForm, to_form: &PCForm) -> Result<DiffCocycle, FormError> {
    if !from_form.same_complex(to_form) {
        return Err(FormError::ComplexMismatch);
    }
    let values = to_form
        .values
        .iter()
        .zip(&from_form.values)
        .map(|(b, a)| b - a)
        .collect();
    Ok(DiffCocycle { values })
}

/// The cocycle after one transfer step: the donor cell's volume becomes the
/// transferred target and the receiver absorbs the rest; every other cell,
/// and the total, are unchanged.
pub fn pullback_cocycle(step: &TransferMap, form: &PCForm) -> Result<PCForm, FormError> {
    if !(Arc::ptr_eq(step.complex(), &form.complex) || step.complex().as_ref() == form.complex.as_ref()) {
        return Err(FormError::ComplexMismatch);
    }
    let donor = step.donor();
    let receiver = step.receiver();
    for (cell, solved) in [(donor, step.donor_volume()), (receiver, step.receiver_volume())] {
        if form.value(cell) != solved {
            return Err(FormError::StaleStep {
                cell,
                solved: solved.to_string(),
                current: form.value(cell).to_string(),
            });
        }
    }
    let mut values = form.values.clone();
    values[donor] = step.donor_new_volume().clone();
    values[receiver] = step.receiver_volume() + step.donor_volume() - step.donor_new_volume();
    PCForm::from_cocycle(form.complex.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Point;
    use crate::scalar::{ratio, scalar};

    fn pt(coords: &[i64]) -> Point {
        Point::new(coords.iter().map(|&c| scalar(c)).collect())
    }

    fn square_oriented() -> Arc<Complex> {
        Arc::new(
            Complex::build(
                vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])],
                vec![vec![0, 1, 2], vec![1, 2, 3]],
            )
            .unwrap()
            .orient()
            .unwrap(),
        )
    }

    /// Eight triangles tiling the square annulus between two squares; the
    /// dual graph is an 8-cycle.
    pub fn ring8() -> Arc<Complex> {
        let outer = [[0, 0], [4, 0], [4, 4], [0, 4]];
        let inner = [[1, 1], [3, 1], [3, 3], [1, 3]];
        let mut vertices = Vec::new();
        for c in outer.iter().chain(inner.iter()) {
            vertices.push(pt(&[c[0], c[1]]));
        }
        let mut cells = Vec::new();
        for i in 0..4 {
            let (o1, o2, i1, i2) = (i, (i + 1) % 4, 4 + i, 4 + (i + 1) % 4);
            cells.push(vec![o1, o2, i1]);
            cells.push(vec![o2, i2, i1]);
        }
        Arc::new(Complex::build(vertices, cells).unwrap().orient().unwrap())
    }

    #[test]
    fn totals() {
        let k = square_oriented();
        let form = PCForm::from_cocycle(k.clone(), vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(form.total_volume(), scalar(1));

        let single = Arc::new(
            Complex::build(vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])], vec![vec![0, 1, 2]])
                .unwrap()
                .orient()
                .unwrap(),
        );
        let q = ratio(7, 3);
        let form = PCForm::from_cocycle(single, vec![q.clone()]).unwrap();
        assert_eq!(form.total_volume(), q);

        let ring = ring8();
        let form = PCForm::from_cocycle(ring, vec![ratio(3, 8); 8]).unwrap();
        assert_eq!(form.total_volume(), scalar(3));
    }

    #[test]
    fn diff_examples() {
        let k = square_oriented();
        let a = PCForm::from_cocycle(k.clone(), vec![ratio(3, 4), ratio(1, 4)]).unwrap();
        let b = PCForm::from_cocycle(k.clone(), vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert!(diff_cocycle(&a, &a).unwrap().is_zero());
        let d = diff_cocycle(&a, &b).unwrap();
        assert_eq!(d.values(), &[ratio(-1, 4), ratio(1, 4)]);
        assert_eq!(d.total(), scalar(0));
        assert_eq!(d.support(), vec![0, 1]);
    }

    #[test]
    fn diff_requires_same_complex() {
        let a = PCForm::from_cocycle(square_oriented(), vec![scalar(1), scalar(1)]).unwrap();
        let b = PCForm::from_cocycle(ring8(), vec![scalar(1); 8]).unwrap();
        assert_eq!(diff_cocycle(&a, &b).unwrap_err(), FormError::ComplexMismatch);
    }

    #[test]
    fn from_cocycle_validation() {
        let k = square_oriented();
        assert!(PCForm::from_cocycle(k.clone(), vec![scalar(1), scalar(1)]).is_ok());
        assert_eq!(
            PCForm::from_cocycle(k.clone(), vec![scalar(1), scalar(0)]).unwrap_err(),
            FormError::NonPositiveVolume(1)
        );
        assert_eq!(
            PCForm::from_cocycle(k.clone(), vec![scalar(1)]).unwrap_err(),
            FormError::WrongLength { expected: 2, got: 1 }
        );
        let unoriented = Arc::new(
            Complex::build(
                vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])],
                vec![vec![0, 1, 2], vec![1, 2, 3]],
            )
            .unwrap(),
        );
        assert_eq!(
            PCForm::from_cocycle(unoriented, vec![scalar(1), scalar(1)]).unwrap_err(),
            FormError::NotOriented
        );
    }

    #[test]
    fn uniform_density_form_has_equal_densities() {
        // Values proportional to Euclidean volumes give constant density:
        // the ring's even cells have area 2, the odd ones area 1.
        let ring = ring8();
        let values: Vec<Scalar> = (0..8).map(|c| if c % 2 == 0 { scalar(2) } else { scalar(1) }).collect();
        let form = PCForm::from_cocycle(ring, values).unwrap();
        let d0 = form.density_approx(0);
        for c in 0..8 {
            assert!((form.density_approx(c) - d0).abs() < 1e-9, "cell {c}");
        }
    }

    #[test]
    fn roundtrip_values_to_form() {
        let k = square_oriented();
        let values = vec![ratio(2, 3), ratio(5, 7)];
        let form = PCForm::from_cocycle(k, values.clone()).unwrap();
        assert_eq!(form.values(), values.as_slice());
    }
}
