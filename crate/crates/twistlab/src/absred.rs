//! Absolutely reducible module structures on K^n: the omega-matrix axioms,
//! diagonalization by characters, fiber partitions and blocks, the H_u
//! subgroup with its orbit normalization, the 2x2 canonical forms, and the
//! extraction of (u, a) cycle data from 2-cycle representations.

use rand::Rng;
use thiserror::Error;

use crate::classify::{ClassifyError, CycleDatum};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{Functional, LinalgError, Matrix, Vector};
use crate::twist::EGrid;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbsredError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("omega matrix violates the module axioms")]
    ModuleAxiomsFail,
    #[error("column sums of omega^{0} are not the dual basis functional")]
    NotSplitConsistent(usize),
    #[error("parameters are degenerate: xy = 1")]
    DegenerateParameters,
    #[error("omega^{0} does not have the classified form")]
    ExtractionFailed(usize),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("dimension mismatch")]
    DimensionMismatch,
}

/// The n x n matrix of functionals omega_ij on K^m defining a module
/// structure: a w_i = sum_j omega_ji(a) w_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaMatrix {
    pub field: FieldSpec,
    pub n: usize,
    /// ambient algebra dimension m
    pub m: usize,
    entries: Vec<Functional>,
}

impl OmegaMatrix {
    pub fn new(field: FieldSpec, n: usize, m: usize, entries: Vec<Functional>) -> Self {
        assert_eq!(entries.len(), n * n);
        assert!(entries.iter().all(|f| f.dim() == m));
        OmegaMatrix {
            field,
            n,
            m,
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Functional {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: Functional) {
        self.entries[i * self.n + j] = f;
    }

    /// Evaluates the whole matrix at an algebra element.
    pub fn eval(&self, a: &Vector) -> Matrix {
        Matrix::from_fn(self.field, self.n, self.n, |i, j| self.get(i, j).apply(a))
    }
}

/// Module axioms over A = K^m on all basis pairs: sum_k w_ik(a) w_kj(b) =
/// w_ij(ab) and w_ij(1) = delta_ij.
pub fn check_module_axioms(w: &OmegaMatrix) -> bool {
    let field = w.field;
    let one = Vector::ones(field, w.m);
    for i in 0..w.n {
        for j in 0..w.n {
            let expect = if i == j { field.one() } else { field.zero() };
            if w.get(i, j).apply(&one) != expect {
                return false;
            }
        }
    }
    for q in 0..w.m {
        for r in 0..w.m {
            let fq = Vector::basis(field, w.m, q);
            let fr = Vector::basis(field, w.m, r);
            for i in 0..w.n {
                for j in 0..w.n {
                    let mut lhs = field.zero();
                    for k in 0..w.n {
                        lhs = lhs.add_ref(&w.get(i, k).apply(&fq).mul_ref(&w.get(k, j).apply(&fr)));
                    }
                    // f_q f_r = delta_qr f_q in K^m
                    let rhs = if q == r {
                        w.get(i, j).apply(&fq)
                    } else {
                        field.zero()
                    };
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A function u on {1..n} with its fibers ordered by increasing image value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberPartition {
    pub u: Vec<usize>,
    pub fibers: Vec<Vec<usize>>,
}

impl FiberPartition {
    pub fn new(u: Vec<usize>) -> Self {
        let mut images: Vec<usize> = u.clone();
        images.sort_unstable();
        images.dedup();
        let fibers = images
            .iter()
            .map(|&v| (0..u.len()).filter(|&i| u[i] == v).collect())
            .collect();
        FiberPartition { u, fibers }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn s(&self) -> usize {
        self.fibers.len()
    }

    /// Index k of the fiber containing i.
    pub fn fiber_of(&self, i: usize) -> usize {
        self.fibers.iter().position(|f| f.contains(&i)).unwrap()
    }
}

/// Access to the F-blocks X^{kl} of a matrix.
pub struct BlockView<'a> {
    pub matrix: &'a Matrix,
    pub partition: &'a FiberPartition,
}

impl<'a> BlockView<'a> {
    pub fn new(matrix: &'a Matrix, partition: &'a FiberPartition) -> Self {
        assert_eq!(matrix.rows, partition.n());
        assert_eq!(matrix.cols, partition.n());
        BlockView { matrix, partition }
    }

    /// X^{kl} = (x_pq) for p in F_k, q in F_l.
    pub fn block(&self, k: usize, l: usize) -> Matrix {
        let rows = &self.partition.fibers[k];
        let cols = &self.partition.fibers[l];
        Matrix::from_fn(self.matrix.field, rows.len(), cols.len(), |i, j| {
            self.matrix.get(rows[i], cols[j]).clone()
        })
    }

    /// The column block X^k: all rows, columns in F_k.
    pub fn column_block(&self, k: usize) -> Matrix {
        let cols = &self.partition.fibers[k];
        Matrix::from_fn(self.matrix.field, self.matrix.rows, cols.len(), |i, j| {
            self.matrix.get(i, cols[j]).clone()
        })
    }
}

/// The characters of K^m attached to u: chars[i] = f_{u(i)}^*.
pub fn chars_from_u(field: FieldSpec, m: usize, u: &[usize]) -> Vec<Functional> {
    u.iter()
        .map(|&v| Functional::dual_basis(field, m, v))
        .collect()
}

/// omega = X . diag(chars) . X^{-1}, entrywise as functionals.
pub fn omega_from_diag(
    x: &Matrix,
    m: usize,
    chars: &[Functional],
) -> Result<OmegaMatrix, AbsredError> {
    let n = x.rows;
    assert_eq!(chars.len(), n);
    assert!(chars.iter().all(|c| c.dim() == m));
    let field = x.field;
    let xinv = x.inverse()?;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut f = Functional::zero(field, m);
            for k in 0..n {
                let c = x.get(i, k).mul_ref(xinv.get(k, j));
                if !c.is_zero() {
                    f = f.add(&chars[k].scale(&c));
                }
            }
            entries.push(f);
        }
    }
    Ok(OmegaMatrix::new(field, n, m, entries))
}

/// Membership in H_u: invertible with vanishing off-diagonal blocks,
/// cross-checked against the commutant characterization y_ij = 0 whenever
/// u(i) != u(j).
pub fn is_in_hu(y: &Matrix, f: &FiberPartition) -> bool {
    let n = f.n();
    if y.rows != n || y.cols != n || y.inverse().is_err() {
        return false;
    }
    let view = BlockView::new(y, f);
    let by_blocks = (0..f.s()).all(|k| (0..f.s()).all(|l| k == l || view.block(k, l).is_zero()));
    let by_commutant = (0..n).all(|i| (0..n).all(|j| f.u[i] == f.u[j] || y.get(i, j).is_zero()));
    debug_assert_eq!(by_blocks, by_commutant);
    by_blocks && by_commutant
}

/// A matrix in the H_u-orbit of the input whose column blocks carry an
/// identity sub-block after the recorded row permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedMatrix {
    pub matrix: Matrix,
    /// per-fiber row permutation sigma_k (as the image list)
    pub sigmas: Vec<Vec<usize>>,
    /// per-fiber residual block Z_k
    pub zs: Vec<Matrix>,
}

/// Normalizes X within its H_u-orbit: for each fiber, the lexicographically
/// first maximal independent set of rows of the column block is reduced to
/// the identity.
pub fn normalize(x: &Matrix, f: &FiberPartition) -> Result<NormalizedMatrix, AbsredError> {
    let n = f.n();
    let field = x.field;
    x.inverse()?;
    let mut out = x.clone();
    let mut sigmas = Vec::new();
    let mut zs = Vec::new();
    for k in 0..f.s() {
        let cols = &f.fibers[k];
        let nk = cols.len();
        let view = BlockView::new(x, f);
        let xk = view.column_block(k);
        // lexicographically first n_k linearly independent rows
        let mut chosen: Vec<usize> = Vec::new();
        for r in 0..n {
            if chosen.len() == nk {
                break;
            }
            let mut cand = Matrix::from_fn(field, chosen.len() + 1, nk, |i, j| {
                let row = if i < chosen.len() { chosen[i] } else { r };
                xk.get(row, j).clone()
            });
            if cand.rref().len() == chosen.len() + 1 {
                chosen.push(r);
            }
        }
        assert_eq!(chosen.len(), nk, "column block has full column rank");
        let yk = Matrix::from_fn(field, nk, nk, |i, j| xk.get(chosen[i], j).clone());
        let yk_inv = yk.inverse()?;
        let new_block = xk.mul(&yk_inv);
        for (j, &c) in cols.iter().enumerate() {
            for i in 0..n {
                out.set(i, c, new_block.get(i, j).clone());
            }
        }
        // sigma_k maps block-row positions to original rows: chosen first,
        // the rest in order
        let rest: Vec<usize> = (0..n).filter(|r| !chosen.contains(r)).collect();
        let mut sigma = chosen.clone();
        sigma.extend(rest.iter().copied());
        let z = Matrix::from_fn(field, n - nk, nk, |i, j| new_block.get(rest[i], j).clone());
        sigmas.push(sigma);
        zs.push(z);
    }
    out.inverse()?;
    Ok(NormalizedMatrix {
        matrix: out,
        sigmas,
        zs,
    })
}

/// True iff X^{-1} Y lies in H_u, i.e. X and Y define the same module.
pub fn same_orbit(x: &Matrix, y: &Matrix, f: &FiberPartition) -> Result<bool, AbsredError> {
    let z = x.inverse()?.mul(y);
    Ok(is_in_hu(&z, f))
}

/// The two canonical 2x2 forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoForm {
    /// (1 x; y 1)
    X1,
    /// (x 1; 1 y)
    X2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized2 {
    pub form: TwoForm,
    pub x: Scalar,
    pub y: Scalar,
}

impl Normalized2 {
    pub fn matrix(&self, field: FieldSpec) -> Matrix {
        let one = field.one();
        let rows = match self.form {
            TwoForm::X1 => vec![vec![one.clone(), self.x.clone()], vec![self.y.clone(), one]],
            TwoForm::X2 => vec![vec![self.x.clone(), one.clone()], vec![one, self.y.clone()]],
        };
        Matrix::from_rows(field, rows)
    }
}

/// Canonical representative of the H_u-orbit of a 2x2 invertible matrix:
/// X1 = (1 x; y 1) or X2 = (x 1; 1 y) with xy != 1. A single fiber always
/// yields X1 with x = y = 0; matrices already of either exact form are
/// returned unchanged; otherwise each column is scaled by its first
/// non-zero entry and the resulting edge case (1 1; x1 y1) is resolved to
/// X2 (x1^{-1}, y1) when x1 != 0 and to X1 (y1^{-1}, 0) otherwise.
pub fn normalize2(x: &Matrix, f: &FiberPartition) -> Result<Normalized2, AbsredError> {
    assert_eq!((x.rows, x.cols), (2, 2));
    let field = x.field;
    x.inverse()?;
    if f.s() == 1 {
        return Ok(Normalized2 {
            form: TwoForm::X1,
            x: field.zero(),
            y: field.zero(),
        });
    }
    if x.get(0, 0).is_one() && x.get(1, 1).is_one() {
        return Ok(Normalized2 {
            form: TwoForm::X1,
            x: x.get(0, 1).clone(),
            y: x.get(1, 0).clone(),
        });
    }
    if x.get(0, 1).is_one() && x.get(1, 0).is_one() {
        return Ok(Normalized2 {
            form: TwoForm::X2,
            x: x.get(0, 0).clone(),
            y: x.get(1, 1).clone(),
        });
    }
    // scale each column by the inverse of its first non-zero entry
    let mut scaled = x.clone();
    let mut pivot = [0usize; 2];
    for j in 0..2 {
        let p = if !x.get(0, j).is_zero() { 0 } else { 1 };
        pivot[j] = p;
        let inv = x
            .get(p, j)
            .inv()
            .map_err(|_| AbsredError::DegenerateParameters)?;
        for i in 0..2 {
            scaled.set(i, j, x.get(i, j).mul_ref(&inv));
        }
    }
    match (pivot[0], pivot[1]) {
        (0, 1) => Ok(Normalized2 {
            form: TwoForm::X1,
            x: scaled.get(0, 1).clone(),
            y: scaled.get(1, 0).clone(),
        }),
        (1, 0) => Ok(Normalized2 {
            form: TwoForm::X2,
            x: scaled.get(0, 0).clone(),
            y: scaled.get(1, 1).clone(),
        }),
        (0, 0) => {
            // (1 1; x1 y1), invertible so x1 != y1
            let x1 = scaled.get(1, 0).clone();
            let y1 = scaled.get(1, 1).clone();
            if !x1.is_zero() {
                Ok(Normalized2 {
                    form: TwoForm::X2,
                    x: x1.inv().unwrap(),
                    y: y1,
                })
            } else {
                Ok(Normalized2 {
                    form: TwoForm::X1,
                    x: y1.inv().map_err(|_| AbsredError::DegenerateParameters)?,
                    y: field.zero(),
                })
            }
        }
        _ => unreachable!("both columns starting with zero would be singular"),
    }
}

/// The 2x2 omega matrix of a two-dimensional absolutely reducible module:
/// w11 = (1-xy)^{-1}[a1 - xy a2], w12 = -x(1-xy)^{-1}[a1 - a2],
/// w21 = y(1-xy)^{-1}[a1 - a2], w22 = (1-xy)^{-1}[-xy a1 + a2].
pub fn two_dim_action(
    x: &Scalar,
    y: &Scalar,
    a1: &Functional,
    a2: &Functional,
) -> Result<OmegaMatrix, AbsredError> {
    let field = a1.field;
    let m = a1.dim();
    assert_eq!(a2.dim(), m);
    let xy = x.mul_ref(y);
    let denom = field.one().sub_ref(&xy);
    let dinv = denom.inv().map_err(|_| AbsredError::DegenerateParameters)?;
    let diff = a1.sub(a2);
    let w11 = a1.sub(&a2.scale(&xy)).scale(&dinv);
    let w12 = diff.scale(&x.neg_ref().mul_ref(&dinv));
    let w21 = diff.scale(&y.mul_ref(&dinv));
    let w22 = a2.sub(&a1.scale(&xy)).scale(&dinv);
    Ok(OmegaMatrix::new(field, 2, m, vec![w11, w12, w21, w22]))
}

/// The per-p omega matrices of a 2x2 grid over K^m: entry (i, j) of
/// omega^p is row p of E_{ij} read as a functional.
pub fn omegas_from_cycle_grid(g: &EGrid) -> Vec<OmegaMatrix> {
    assert_eq!(g.n, 2);
    let m = g.m();
    let field = g.algebra.field;
    (0..m)
        .map(|p| {
            let entries = (0..2)
                .flat_map(|i| {
                    (0..2).map(move |j| Functional {
                        field,
                        coeffs: g.get(i, j).row(p),
                    })
                })
                .collect();
            OmegaMatrix::new(field, 2, m, entries)
        })
        .collect()
}

/// Recovers the (u, a) cycle datum from the per-p omega matrices of a
/// splitted, unital and factorizable 2-cycle representation.
pub fn extract_cycle_datum(ws: &[OmegaMatrix]) -> Result<CycleDatum, AbsredError> {
    let m = ws.len();
    if m == 0 {
        return Err(AbsredError::DimensionMismatch);
    }
    let field = ws[0].field;
    let mut u = vec![0usize; m];
    let mut a = vec![field.zero(); m];
    for (p, w) in ws.iter().enumerate() {
        if w.n != 2 || w.m != m {
            return Err(AbsredError::DimensionMismatch);
        }
        if !check_module_axioms(w) {
            return Err(AbsredError::ModuleAxiomsFail);
        }
        let fp = Functional::dual_basis(field, m, p);
        if w.get(0, 0).add(w.get(1, 0)) != fp || w.get(0, 1).add(w.get(1, 1)) != fp {
            return Err(AbsredError::NotSplitConsistent(p));
        }
        let w12 = w.get(0, 1);
        let w21 = w.get(1, 0);
        let (up, ap) = if w12.is_zero() && w21.is_zero() {
            // diagonal: both entries must be f_p^*
            if *w.get(0, 0) != fp {
                return Err(AbsredError::ExtractionFailed(p));
            }
            (p, field.zero())
        } else if !w12.is_zero() {
            // w12 = a_p (f_p^* - f_{u(p)}^*), a_p != 0
            let ap = w12.coeffs[p].clone();
            let up = fit_difference(w12, p, &ap).ok_or(AbsredError::ExtractionFailed(p))?;
            (up, ap)
        } else {
            // a_p = 0 and w21 = f_p^* - f_{u(p)}^*
            let up =
                fit_difference(w21, p, &field.one()).ok_or(AbsredError::ExtractionFailed(p))?;
            (up, field.zero())
        };
        // certify the fit against the classified form of the whole matrix
        let fup = Functional::dual_basis(field, m, up);
        let cp = field.one().sub_ref(&ap);
        let expect = [
            fp.scale(&ap).add(&fup.scale(&cp)),
            fp.sub(&fup).scale(&ap),
            fp.sub(&fup).scale(&cp),
            fp.scale(&cp).add(&fup.scale(&ap)),
        ];
        for (idx, e) in expect.iter().enumerate() {
            if w.get(idx / 2, idx % 2) != e {
                return Err(AbsredError::ExtractionFailed(p));
            }
        }
        u[p] = up;
        a[p] = ap;
    }
    Ok(CycleDatum::new(field, u, a)?)
}

/// If f = c (f_p^* - f_q^*) for a unique q != p, returns q.
fn fit_difference(f: &Functional, p: usize, c: &Scalar) -> Option<usize> {
    if f.coeffs[p] != *c || c.is_zero() {
        return None;
    }
    let mut q = None;
    for (i, v) in f.coeffs.iter().enumerate() {
        if i == p {
            continue;
        }
        if *v == c.neg_ref() {
            if q.is_some() {
                return None;
            }
            q = Some(i);
        } else if !v.is_zero() {
            return None;
        }
    }
    q
}

/// A uniformly random invertible matrix by rejection sampling.
pub fn random_invertible<R: Rng>(field: FieldSpec, n: usize, rng: &mut R) -> Matrix {
    loop {
        let m = Matrix::from_fn(field, n, n, |_, _| random_scalar(field, rng));
        if m.inverse().is_ok() {
            return m;
        }
    }
}

/// A random scalar: uniform in F_p, or a small random rational.
pub fn random_scalar<R: Rng>(field: FieldSpec, rng: &mut R) -> Scalar {
    match field {
        FieldSpec::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
        FieldSpec::Rationals => {
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            field.from_ratio(num, den).unwrap()
        }
    }
}

/// All invertible n x n matrices over a prime field, for exhaustive checks.
pub fn all_invertible(field: FieldSpec, n: usize) -> Vec<Matrix> {
    let elements = field.elements().expect("exhaustion needs a prime field");
    let mut out = Vec::new();
    let mut idx = vec![0usize; n * n];
    loop {
        let m = Matrix::from_fn(field, n, n, |i, j| elements[idx[i * n + j]].clone());
        if m.inverse().is_ok() {
            out.push(m);
        }
        let mut k = n * n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < elements.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// |GL_d(F_p)| = prod_{i<d} (p^d - p^i).
pub fn gl_order(p: u64, d: usize) -> u64 {
    let pd = p.pow(d as u32);
    (0..d).map(|i| pd - p.pow(i as u32)).product()
}

/// The order of H_u over a prime field: prod_k |GL_{n_k}|.
pub fn hu_order_formula(p: u64, f: &FiberPartition) -> u64 {
    f.fibers.iter().map(|fk| gl_order(p, fk.len())).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::classify::{cycle_maps, grid_from_cycle_datum};

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn module_axioms_examples() {
        // diagonal omega with characters f_{u(i)}^*
        let u = vec![1usize, 0];
        let chars = chars_from_u(q(), 2, &u);
        let w = omega_from_diag(&Matrix::identity(q(), 2), 2, &chars).unwrap();
        assert!(check_module_axioms(&w));
        // w11(1) = 0 fails eq:mod2
        let mut bad = w.clone();
        bad.set(0, 0, Functional::zero(q(), 2));
        assert!(!check_module_axioms(&bad));
    }

    #[test]
    fn blocks_match_paper_example() {
        // u(1)=4, u(2)=u(4)=2, u(3)=1 (1-based): fibers {3}, {2,4}, {1}
        let f = FiberPartition::new(vec![3, 1, 0, 1]);
        assert_eq!(f.fibers, vec![vec![2], vec![1, 3], vec![0]]);
        let x = Matrix::from_fn(q(), 4, 4, |i, j| {
            q().from_i64((10 * (i + 1) + j + 1) as i64)
        });
        let v = BlockView::new(&x, &f);
        let b21 = v.block(1, 0);
        assert_eq!((b21.rows, b21.cols), (2, 1));
        assert_eq!(b21.get(0, 0), &q().from_i64(23));
        assert_eq!(b21.get(1, 0), &q().from_i64(43));
        let b22 = v.block(1, 1);
        assert_eq!(b22.row(0), vec![q().from_i64(22), q().from_i64(24)]);
        assert_eq!(b22.row(1), vec![q().from_i64(42), q().from_i64(44)]);
        let b32 = v.block(2, 1);
        assert_eq!(b32.row(0), vec![q().from_i64(12), q().from_i64(14)]);
        // single fiber: one block = X
        let triv = FiberPartition::new(vec![0; 4]);
        assert_eq!(BlockView::new(&x, &triv).block(0, 0), x);
    }

    #[test]
    fn hu_membership() {
        let f = FiberPartition::new(vec![3, 1, 0, 1]);
        assert!(is_in_hu(&Matrix::identity(q(), 4), &f));
        // the paper's example element with y11 = y33 = 1, y22 y44 - y24 y42 = 1*1 - 2*0
        let mut y = Matrix::identity(q(), 4);
        y.set(1, 3, q().from_i64(2));
        assert!(is_in_hu(&y, &f));
        // mixing fibers
        let mut bad = Matrix::identity(q(), 4);
        bad.set(0, 2, q().one());
        assert!(!is_in_hu(&bad, &f));
    }

    #[test]
    fn orbit_invariance_of_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let field = FieldSpec::Prime(5);
        for _ in 0..25 {
            let n = rng.gen_range(2..=4);
            let m = 3;
            let u: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            let f = FiberPartition::new(u.clone());
            let chars = chars_from_u(field, m, &u);
            let x = random_invertible(field, n, &mut rng);
            // random H_u element: random invertible diagonal blocks
            let mut y = Matrix::zero(field, n, n);
            for fk in &f.fibers {
                let blk = random_invertible(field, fk.len(), &mut rng);
                for (a, &i) in fk.iter().enumerate() {
                    for (b, &j) in fk.iter().enumerate() {
                        y.set(i, j, blk.get(a, b).clone());
                    }
                }
            }
            assert!(is_in_hu(&y, &f));
            let w1 = omega_from_diag(&x, m, &chars).unwrap();
            assert!(check_module_axioms(&w1));
            let w2 = omega_from_diag(&x.mul(&y), m, &chars).unwrap();
            assert_eq!(w1, w2);
            // block action law (XY)^{kl} = X^{kl} Y^{ll}
            let xy = x.mul(&y);
            let vx = BlockView::new(&x, &f);
            let vxy = BlockView::new(&xy, &f);
            let vy = BlockView::new(&y, &f);
            for k in 0..f.s() {
                for l in 0..f.s() {
                    assert_eq!(vxy.block(k, l), vx.block(k, l).mul(&vy.block(l, l)));
                }
            }
            assert!(same_orbit(&x, &xy, &f).unwrap());
        }
    }

    #[test]
    fn hu_is_commutant_subgroup_by_exhaustion() {
        for p in [2u64, 3] {
            let field = FieldSpec::Prime(p);
            let f = FiberPartition::new(vec![0, 0]);
            let g = FiberPartition::new(vec![0, 1]);
            for part in [f, g] {
                let members: Vec<Matrix> = all_invertible(field, 2)
                    .into_iter()
                    .filter(|m| is_in_hu(m, &part))
                    .collect();
                assert_eq!(members.len() as u64, hu_order_formula(p, &part));
                for a in &members {
                    assert!(is_in_hu(&a.inverse().unwrap(), &part));
                    for b in &members {
                        assert!(is_in_hu(&a.mul(b), &part));
                    }
                }
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let f = FiberPartition::new(vec![0, 1, 1]);
        // identity normalizes to itself
        let id = Matrix::identity(q(), 3);
        let norm = normalize(&id, &f).unwrap();
        assert_eq!(norm.matrix, id);
        // random matrices over F_5
        let field = FieldSpec::Prime(5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let chars = chars_from_u(field, 3, &[0, 1, 1]);
        for _ in 0..50 {
            let x = random_invertible(field, 3, &mut rng);
            let norm = normalize(&x, &f).unwrap();
            assert!(same_orbit(&x, &norm.matrix, &f).unwrap());
            assert_eq!(
                omega_from_diag(&x, 3, &chars).unwrap(),
                omega_from_diag(&norm.matrix, 3, &chars).unwrap()
            );
            // identity sub-block sits at the recorded rows
            for (k, fk) in f.fibers.iter().enumerate() {
                let v = BlockView::new(&norm.matrix, &f);
                let blk = v.column_block(k);
                for (a, &r) in norm.sigmas[k][..fk.len()].iter().enumerate() {
                    for b in 0..fk.len() {
                        let expect = if a == b { field.one() } else { field.zero() };
                        assert_eq!(blk.get(r, b), &expect);
                    }
                }
            }
        }
        // single fiber on n=2: orbit contains the identity
        let f2 = FiberPartition::new(vec![0, 0]);
        let x = Matrix::from_rows(
            q(),
            vec![
                vec![q().from_i64(1), q().from_i64(2)],
                vec![q().from_i64(3), q().from_i64(4)],
            ],
        );
        assert_eq!(normalize(&x, &f2).unwrap().matrix, Matrix::identity(q(), 2));
    }

    #[test]
    fn normalize2_examples() {
        let single = FiberPartition::new(vec![0, 0]);
        let split = FiberPartition::new(vec![0, 1]);
        let x = Matrix::from_rows(
            q(),
            vec![
                vec![q().from_i64(2), q().from_i64(3)],
                vec![q().from_i64(4), q().from_i64(5)],
            ],
        );
        let n = normalize2(&x, &single).unwrap();
        assert_eq!(
            (n.form, n.x.is_zero(), n.y.is_zero()),
            (TwoForm::X1, true, true)
        );
        // already X1
        let x1 = Matrix::from_rows(
            q(),
            vec![
                vec![q().one(), q().from_i64(3)],
                vec![q().from_i64(5), q().one()],
            ],
        );
        let n = normalize2(&x1, &split).unwrap();
        assert_eq!(n.form, TwoForm::X1);
        assert_eq!((n.x, n.y), (q().from_i64(3), q().from_i64(5)));
        // (1 1; x1 y1) with x1 != 0 -> X2 (x1^{-1}, y1)
        let z1 = Matrix::from_rows(
            q(),
            vec![
                vec![q().one(), q().one()],
                vec![q().from_i64(2), q().from_i64(5)],
            ],
        );
        let n = normalize2(&z1, &split).unwrap();
        assert_eq!(n.form, TwoForm::X2);
        assert_eq!((n.x, n.y), (q().from_ratio(1, 2).unwrap(), q().from_i64(5)));
        // normalization stays in the orbit
        for (mat, part) in [(&x, &split), (&z1, &split), (&x1, &split)] {
            let n = normalize2(mat, part).unwrap();
            assert!(same_orbit(mat, &n.matrix(q()), part).unwrap());
        }
    }

    #[test]
    fn two_dim_action_matches_diag() {
        let field = FieldSpec::Prime(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 3;
        for _ in 0..50 {
            let a1 = Functional::dual_basis(field, m, rng.gen_range(0..m));
            let a2 = Functional::dual_basis(field, m, rng.gen_range(0..m));
            let (x, y) = loop {
                let x = random_scalar(field, &mut rng);
                let y = random_scalar(field, &mut rng);
                if !x.mul_ref(&y).is_one() {
                    break (x, y);
                }
            };
            let w = two_dim_action(&x, &y, &a1, &a2).unwrap();
            assert!(check_module_axioms(&w));
            let x1 = Normalized2 {
                form: TwoForm::X1,
                x: x.clone(),
                y: y.clone(),
            }
            .matrix(field);
            let via_diag = omega_from_diag(&x1, m, &[a1.clone(), a2.clone()]).unwrap();
            assert_eq!(w, via_diag);
            // X2 with swapped characters yields the same omega
            let x2 = Normalized2 {
                form: TwoForm::X2,
                x: x.clone(),
                y: y.clone(),
            }
            .matrix(field);
            let swapped = omega_from_diag(&x2, m, &[a2.clone(), a1.clone()]).unwrap();
            assert_eq!(swapped, w);
        }
        // degenerate xy = 1
        let a1 = Functional::dual_basis(field, m, 0);
        assert_eq!(
            two_dim_action(&field.one(), &field.one(), &a1, &a1),
            Err(AbsredError::DegenerateParameters)
        );
        // x = y = 0 gives the diagonal omega
        let a2 = Functional::dual_basis(field, m, 1);
        let w = two_dim_action(&field.zero(), &field.zero(), &a1, &a2).unwrap();
        assert_eq!(w.get(0, 0), &a1);
        assert_eq!(w.get(1, 1), &a2);
        assert!(w.get(0, 1).is_zero() && w.get(1, 0).is_zero());
    }

    #[test]
    fn extraction_round_trip() {
        let field = FieldSpec::Prime(3);
        for m in 1..=3usize {
            for d in crate::classify::enumerate_cycle_data(m, field).unwrap() {
                let g = grid_from_cycle_datum(&d);
                let ws = omegas_from_cycle_grid(&g);
                let back = extract_cycle_datum(&ws).unwrap();
                assert_eq!(grid_from_cycle_datum(&back), g);
                assert_eq!(back, d);
            }
        }
    }

    #[test]
    fn extraction_rejects_bad_input() {
        // identity loops only: omega^p diagonal with f_p^* twice -> u = id, a = 0
        let field = q();
        let d = CycleDatum::new(field, vec![0, 1], vec![field.zero(); 2]).unwrap();
        let ws = omegas_from_cycle_grid(&grid_from_cycle_datum(&d));
        let back = extract_cycle_datum(&ws).unwrap();
        assert_eq!(back.u, vec![0, 1]);
        assert!(back.a.iter().all(Scalar::is_zero));
        // break eq:split2
        let [phi1, phi_a1, phi_a2, phi2] = cycle_maps(field, &[1, 0], &[field.zero(), field.one()]);
        let g = EGrid::new(
            crate::algebra::Algebra::split(field, 2),
            2,
            vec![phi1, phi_a1, phi_a2, phi2],
        );
        let mut ws = omegas_from_cycle_grid(&g);
        let shifted = ws[0].get(1, 1).add(&Functional::dual_basis(field, 2, 0));
        ws[0].set(1, 1, shifted);
        assert!(matches!(
            extract_cycle_datum(&ws),
            Err(AbsredError::NotSplitConsistent(0) | AbsredError::ModuleAxiomsFail)
        ));
    }

    #[test]
    fn dedekind_independence() {
        for m in 1..=4usize {
            let rows: Vec<Vec<Scalar>> = (0..m)
                .map(|p| Functional::dual_basis(q(), m, p).coeffs)
                .collect();
            assert_eq!(Matrix::from_rows(q(), rows).rank(), m);
        }
    }
}
