//! Finite-dimensional unital algebras given by structure constants, with
//! the split algebra K^m as the main instance.

use crate::field::FieldSpec;
use crate::linalg::{EndoMap, Vector};

/// A finite-dimensional algebra over an exact field, described by the
/// products of basis elements. `table[i][j]` is the product e_i * e_j
/// expanded in the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    pub field: FieldSpec,
    pub dim: usize,
    pub unit: Vector,
    pub table: Vec<Vec<Vector>>,
}

impl Algebra {
    /// The split algebra K^m with componentwise product; basis f_1..f_m of
    /// orthogonal idempotents, unit the all-ones vector.
    pub fn split(field: FieldSpec, m: usize) -> Self {
        let table = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            Vector::basis(field, m, i)
                        } else {
                            Vector::zero(field, m)
                        }
                    })
                    .collect()
            })
            .collect();
        Algebra {
            field,
            dim: m,
            unit: Vector::ones(field, m),
            table,
        }
    }

    pub fn new(field: FieldSpec, unit: Vector, table: Vec<Vec<Vector>>) -> Self {
        let dim = unit.dim();
        assert_eq!(table.len(), dim);
        assert!(table.iter().all(|row| row.len() == dim));
        assert!(table
            .iter()
            .flatten()
            .all(|v| v.dim() == dim && v.field == field));
        Algebra {
            field,
            dim,
            unit,
            table,
        }
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        assert_eq!(a.dim(), self.dim);
        assert_eq!(b.dim(), self.dim);
        let mut out = Vector::zero(self.field, self.dim);
        for i in 0..self.dim {
            if a.coords[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if b.coords[j].is_zero() {
                    continue;
                }
                let c = a.coords[i].mul_ref(&b.coords[j]);
                out = out.add(&self.table[i][j].scale(&c));
            }
        }
        out
    }

    /// First basis triple on which associativity fails, if any.
    pub fn associativity_violation(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let ei = Vector::basis(self.field, self.dim, i);
                    let ej = Vector::basis(self.field, self.dim, j);
                    let ek = Vector::basis(self.field, self.dim, k);
                    let lhs = self.mul(&self.mul(&ei, &ej), &ek);
                    let rhs = self.mul(&ei, &self.mul(&ej, &ek));
                    if lhs != rhs {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn is_associative(&self) -> bool {
        self.associativity_violation().is_none()
    }

    pub fn is_unital(&self) -> bool {
        (0..self.dim).all(|i| {
            let ei = Vector::basis(self.field, self.dim, i);
            self.mul(&self.unit, &ei) == ei && self.mul(&ei, &self.unit) == ei
        })
    }

    /// True iff f preserves the unit and all basis products (sufficient by
    /// bilinearity).
    pub fn is_algebra_map(&self, f: &EndoMap) -> bool {
        if f.rows != self.dim || f.cols != self.dim {
            return false;
        }
        if f.apply(&self.unit) != self.unit {
            return false;
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let fi = f.apply(&Vector::basis(self.field, self.dim, i));
                let fj = f.apply(&Vector::basis(self.field, self.dim, j));
                if f.apply(&self.table[i][j]) != self.mul(&fi, &fj) {
                    return false;
                }
            }
        }
        true
    }
}

/// Algebra-map test specialized to the split algebra K^m.
pub fn is_algebra_map(f: &EndoMap) -> bool {
    Algebra::split(f.field, f.rows).is_algebra_map(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{endo_from_function, Matrix};

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn split_algebra_is_sane() {
        let a = Algebra::split(q(), 3);
        assert!(a.is_associative());
        assert!(a.is_unital());
        let f1 = Vector::basis(q(), 3, 0);
        assert_eq!(a.mul(&f1, &f1), f1);
        assert!(a.mul(&f1, &Vector::basis(q(), 3, 1)).is_zero());
    }

    #[test]
    fn algebra_map_examples() {
        assert!(is_algebra_map(&Matrix::identity(q(), 2)));
        // swap of f_1, f_2
        assert!(is_algebra_map(&endo_from_function(q(), &[1, 0])));
        // projection f_1 -> f_1, f_2 -> 0 does not preserve the unit
        let mut proj = Matrix::zero(q(), 2, 2);
        proj.set(0, 0, q().one());
        assert!(!is_algebra_map(&proj));
    }

    #[test]
    fn algebra_maps_of_split_are_exactly_functions() {
        // all 0/1 matrices on K^3 over F_2
        let f = FieldSpec::Prime(2);
        let mut maps = Vec::new();
        for code in 0u32..(1 << 9) {
            let m = Matrix::from_fn(f, 3, 3, |i, j| {
                f.from_i64(((code >> (3 * i + j)) & 1) as i64)
            });
            if is_algebra_map(&m) {
                maps.push(m);
            }
        }
        let mut expected = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    expected.push(endo_from_function(f, &[a, b, c]));
                }
            }
        }
        assert_eq!(maps.len(), 27);
        for m in &maps {
            assert!(expected.contains(m));
        }
    }
}
