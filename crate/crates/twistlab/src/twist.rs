//! The E-grid form of a twisting map, its four pointwise axioms, the
//! dictionary between grids and admissible quiver pairs, and the twisted
//! tensor product algebra with exhaustive associativity certification.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::Algebra;
use crate::linalg::{compose, EndoMap, Matrix, Vector};
use crate::quiver::{validate_admissible_shape, AdmissibleShape, Quiver, QuiverError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistError {
    #[error("grid violates the twisting axioms: {0:?}")]
    AxiomViolation(AxiomReport),
    #[error("derived quiver is not admissible: {0}")]
    Shape(QuiverError),
    #[error("arrow {0} -> {1} is assigned the zero map")]
    ZeroArrowMap(usize, usize),
    #[error("twisted product not associative at basis triple {0:?} (internal error)")]
    NotAssociative((usize, usize, usize)),
    #[error("twisted product does not have the expected unit (internal error)")]
    NotUnital,
}

/// The n x n grid of endomorphisms E_ij of A determined by a twisting map;
/// zero entries encode missing arrows explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EGrid {
    pub algebra: Algebra,
    pub n: usize,
    entries: Vec<EndoMap>,
}

impl EGrid {
    pub fn new(algebra: Algebra, n: usize, entries: Vec<EndoMap>) -> Self {
        assert_eq!(entries.len(), n * n);
        let m = algebra.dim;
        assert!(entries.iter().all(|e| e.rows == m && e.cols == m));
        EGrid {
            algebra,
            n,
            entries,
        }
    }

    /// The flip grid E_ij = delta_ij Id, i.e. the ordinary tensor product.
    pub fn flip(algebra: Algebra, n: usize) -> Self {
        let m = algebra.dim;
        let field = algebra.field;
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Matrix::identity(field, m)
                } else {
                    Matrix::zero(field, m, m)
                }
            })
            .collect();
        EGrid::new(algebra, n, entries)
    }

    pub fn m(&self) -> usize {
        self.algebra.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &EndoMap {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: EndoMap) {
        self.entries[i * self.n + j] = e;
    }

    pub fn entries(&self) -> &[EndoMap] {
        &self.entries
    }

    /// Lexicographic key for canonical grid-set ordering.
    pub fn sort_key(&self) -> &[EndoMap] {
        &self.entries
    }
}

/// Per-axiom verdicts: `None` means the axiom holds; otherwise the first
/// violating index tuple in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AxiomReport {
    /// (i, j, p): E_ip o E_jp != delta_ij E_ip
    pub tau1: Option<(usize, usize, usize)>,
    /// (i, j, q, r): E_ij(f_q f_r) != sum_p E_ip(f_q) E_pj(f_r)
    pub tau2: Option<(usize, usize, usize, usize)>,
    /// column j with sum_i E_ij != Id
    pub tau3: Option<usize>,
    /// (i, j): E_ij(1) != delta_ij 1
    pub tau4: Option<(usize, usize)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.tau1.is_none() && self.tau2.is_none() && self.tau3.is_none() && self.tau4.is_none()
    }
}

/// Checks the four pointwise axioms on all index tuples and basis pairs
/// (sufficient by bilinearity).
pub fn check_axioms(g: &EGrid) -> AxiomReport {
    let n = g.n;
    let m = g.m();
    let alg = &g.algebra;
    let field = alg.field;
    let mut report = AxiomReport::default();

    'tau1: for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                let lhs = compose(g.get(i, p), g.get(j, p)).unwrap();
                let rhs = if i == j {
                    g.get(i, p).clone()
                } else {
                    Matrix::zero(field, m, m)
                };
                if lhs != rhs {
                    report.tau1 = Some((i, j, p));
                    break 'tau1;
                }
            }
        }
    }

    'tau2: for i in 0..n {
        for j in 0..n {
            for q in 0..m {
                for r in 0..m {
                    let fq = Vector::basis(field, m, q);
                    let fr = Vector::basis(field, m, r);
                    let lhs = g.get(i, j).apply(&alg.table[q][r]);
                    let mut rhs = Vector::zero(field, m);
                    for p in 0..n {
                        let a = g.get(i, p).apply(&fq);
                        let b = g.get(p, j).apply(&fr);
                        rhs = rhs.add(&alg.mul(&a, &b));
                    }
                    if lhs != rhs {
                        report.tau2 = Some((i, j, q, r));
                        break 'tau2;
                    }
                }
            }
        }
    }

    for j in 0..n {
        let mut sum = Matrix::zero(field, m, m);
        for i in 0..n {
            sum = sum.add(g.get(i, j));
        }
        if !sum.is_identity() {
            report.tau3 = Some(j);
            break;
        }
    }

    'tau4: for i in 0..n {
        for j in 0..n {
            let lhs = g.get(i, j).apply(&alg.unit);
            let rhs = if i == j {
                alg.unit.clone()
            } else {
                Vector::zero(field, m)
            };
            if lhs != rhs {
                report.tau4 = Some((i, j));
                break 'tau4;
            }
        }
    }

    report
}

/// A quiver shape plus the arrow-indexed family of non-zero endomorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePair {
    pub algebra: Algebra,
    pub shape: AdmissibleShape,
    pub phi: BTreeMap<(usize, usize), EndoMap>,
}

impl AdmissiblePair {
    pub fn new(
        algebra: Algebra,
        shape: AdmissibleShape,
        phi: BTreeMap<(usize, usize), EndoMap>,
    ) -> Result<Self, TwistError> {
        for &(s, t) in shape.quiver().arrows() {
            match phi.get(&(s, t)) {
                None => return Err(TwistError::ZeroArrowMap(s, t)),
                Some(e) if e.is_zero() => return Err(TwistError::ZeroArrowMap(s, t)),
                _ => {}
            }
        }
        assert_eq!(phi.len(), shape.quiver().arrows().len());
        Ok(AdmissiblePair {
            algebra,
            shape,
            phi,
        })
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }
}

/// Reads the quiver and representation off a grid that passes the axioms.
pub fn pair_from_grid(g: &EGrid) -> Result<AdmissiblePair, TwistError> {
    let report = check_axioms(g);
    if !report.passed() {
        return Err(TwistError::AxiomViolation(report));
    }
    let mut arrows = Vec::new();
    let mut phi = BTreeMap::new();
    for i in 0..g.n {
        for j in 0..g.n {
            if !g.get(i, j).is_zero() {
                arrows.push((i, j));
                phi.insert((i, j), g.get(i, j).clone());
            }
        }
    }
    let quiver = Quiver::new(g.n, arrows).map_err(TwistError::Shape)?;
    let shape = validate_admissible_shape(quiver).map_err(TwistError::Shape)?;
    AdmissiblePair::new(g.algebra.clone(), shape, phi)
}

/// Inverse of `pair_from_grid`: E_{s,t} = phi_(s,t), all other entries zero.
pub fn grid_from_pair(p: &AdmissiblePair) -> EGrid {
    let n = p.n();
    let m = p.algebra.dim;
    let field = p.algebra.field;
    let mut entries = vec![Matrix::zero(field, m, m); n * n];
    for (&(s, t), e) in &p.phi {
        entries[s * n + t] = e.clone();
    }
    EGrid::new(p.algebra.clone(), n, entries)
}

/// Splitted condition (S_i): for each vertex, the maps on arrows into it
/// form a complete set of non-zero orthogonal idempotents.
pub fn check_splitted(p: &AdmissiblePair) -> bool {
    let q = p.shape.quiver();
    let m = p.algebra.dim;
    let field = p.algebra.field;
    for i in 0..q.n {
        let into: Vec<&(usize, usize)> = q.arrows().iter().filter(|&&(_, t)| t == i).collect();
        let mut sum = Matrix::zero(field, m, m);
        for &&a in &into {
            let pa = &p.phi[&a];
            if pa.is_zero() {
                return false;
            }
            sum = sum.add(pa);
            for &&b in &into {
                let pb = &p.phi[&b];
                let prod = pa.mul(pb);
                let expect = if a.0 == b.0 {
                    pa.clone()
                } else {
                    Matrix::zero(field, m, m)
                };
                if prod != expect {
                    return false;
                }
            }
        }
        if !sum.is_identity() {
            return false;
        }
    }
    true
}

/// Unital condition (U): phi_alpha(1) = 1 on loops, 0 otherwise.
pub fn check_unital(p: &AdmissiblePair) -> bool {
    let unit = &p.algebra.unit;
    let zero = Vector::zero(p.algebra.field, p.algebra.dim);
    p.phi.iter().all(|(&(s, t), e)| {
        let expect = if s == t { unit } else { &zero };
        e.apply(unit) == *expect
    })
}

/// Factorizable condition (F_{i,j}): path sums of length 2 agree with the
/// single-arrow value (or vanish), on all basis pairs.
pub fn check_factorizable(p: &AdmissiblePair) -> bool {
    let q = p.shape.quiver();
    let alg = &p.algebra;
    let m = alg.dim;
    let field = alg.field;
    for i in 0..q.n {
        for j in 0..q.n {
            let paths = q.paths(2, i, j);
            for a in 0..m {
                for b in 0..m {
                    let va = Vector::basis(field, m, a);
                    let vb = Vector::basis(field, m, b);
                    let mut lhs = Vector::zero(field, m);
                    for path in &paths {
                        let x = p.phi[&path[0]].apply(&va);
                        let y = p.phi[&path[1]].apply(&vb);
                        lhs = lhs.add(&alg.mul(&x, &y));
                    }
                    let rhs = if q.has_arrow(i, j) {
                        p.phi[&(i, j)].apply(&alg.table[a][b])
                    } else {
                        Vector::zero(field, m)
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

/// Consistency self-test: phi_alpha = Id exactly when alpha is a loop and
/// no other arrow targets its vertex.
pub fn check_identity_loop_characterization(p: &AdmissiblePair) -> bool {
    let q = p.shape.quiver();
    p.phi.iter().all(|(&(s, t), e)| {
        let expect = s == t && q.rank(t).unwrap() == 1;
        e.is_identity() == expect
    })
}

/// The twisted tensor product A (x)_tau K^n on the basis f_p (x) e_i,
/// indexed i*m + p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedAlgebra {
    pub n: usize,
    pub m: usize,
    pub algebra: Algebra,
}

/// Builds the structure constants of A (x)_tau K^n and re-certifies
/// associativity and unitality; failures indicate an axiom-checker bug.
pub fn build_twisted_algebra(g: &EGrid) -> Result<TwistedAlgebra, TwistError> {
    let report = check_axioms(g);
    if !report.passed() {
        return Err(TwistError::AxiomViolation(report));
    }
    let n = g.n;
    let m = g.m();
    let field = g.algebra.field;
    let dim = n * m;
    // (f_p (x) e_i)(f_q (x) e_j) = f_p * E_ij(f_q) (x) e_j
    let mut table = vec![vec![Vector::zero(field, dim); dim]; dim];
    for i in 0..n {
        for p in 0..m {
            for j in 0..n {
                for q in 0..m {
                    let fq = Vector::basis(field, m, q);
                    let fp = Vector::basis(field, m, p);
                    let prod = g.algebra.mul(&fp, &g.get(i, j).apply(&fq));
                    let mut out = Vector::zero(field, dim);
                    for (r, c) in prod.coords.into_iter().enumerate() {
                        out.coords[j * m + r] = c;
                    }
                    table[i * m + p][j * m + q] = out;
                }
            }
        }
    }
    let mut unit = Vector::zero(field, dim);
    for i in 0..n {
        for (r, c) in g.algebra.unit.coords.iter().enumerate() {
            unit.coords[i * m + r] = c.clone();
        }
    }
    let algebra = Algebra::new(field, unit, table);
    if let Some(triple) = algebra.associativity_violation() {
        return Err(TwistError::NotAssociative(triple));
    }
    if !algebra.is_unital() {
        return Err(TwistError::NotUnital);
    }
    Ok(TwistedAlgebra { n, m, algebra })
}
