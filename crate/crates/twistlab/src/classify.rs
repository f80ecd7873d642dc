//! Generators and validators for the classification data of twisting maps
//! K^n (x) K^m -> K^m (x) K^n with reduced rank at most one: per-vertex
//! idempotent functions for quivers without 2-cycles, (u, a) data for the
//! 2-cycle, the merged data for connected quivers containing a 2-cycle, and
//! Hochschild-extension constructions over a general base algebra.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::algebra::Algebra;
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{endo_from_function, image_basis, is_idempotent, kernel_basis, Matrix, Vector};
use crate::quiver::{
    unique_cycle_decomposition, AdmissibleShape, CycleTreeDecomposition, QuiverError,
};
use crate::twist::{pair_from_grid, AdmissiblePair, EGrid, TwistError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("function at vertex {0} is not idempotent")]
    NotIdempotent(usize),
    #[error("classification condition violated at arrow {arrow:?}, index {p}")]
    ConditionViolated {
        arrow: Option<(usize, usize)>,
        p: usize,
    },
    #[error("vertex {0} has no incoming non-loop arrow, so its map must be the identity")]
    SplitForced(usize),
    #[error("shape not usable: {0}")]
    BadShape(#[from] QuiverError),
    #[error("shape contains a 2-cycle")]
    HasTwoCycle,
    #[error("shape must be connected with the 2-cycle on vertices 1, 2")]
    BadCycleShape,
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error("omega is not a normalized 2-cocycle (violation at {0:?})")]
    NotACocycle((usize, usize, usize)),
    #[error("bimodule axioms fail")]
    NotABimodule,
    #[error("map at vertex {0} is not an idempotent bimodule morphism")]
    BadVertexMap(usize),
    #[error("Im omega is not contained in Im f at vertex {0}")]
    ImageConditionViolated(usize),
    #[error("enumeration over the rationals is infinite; use families")]
    InfiniteField,
    #[error("dimension mismatch")]
    DimensionMismatch,
}

// ---------------------------------------------------------------------------
// functions on {1..m} (0-based internally)

/// All m^m functions on {0..m-1}, lexicographic.
pub fn all_functions(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut u = vec![0usize; m];
    loop {
        out.push(u.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            u[i] += 1;
            if u[i] < m {
                break;
            }
            u[i] = 0;
        }
    }
}

pub fn is_idempotent_function(u: &[usize]) -> bool {
    (0..u.len()).all(|p| u[u[p]] == u[p])
}

/// All idempotent functions on {0..m-1}, lexicographic.
pub fn idempotent_functions(m: usize) -> Vec<Vec<usize>> {
    all_functions(m)
        .into_iter()
        .filter(|u| is_idempotent_function(u))
        .collect()
}

pub fn identity_function(m: usize) -> Vec<usize> {
    (0..m).collect()
}

// ---------------------------------------------------------------------------
// rank-one data without 2-cycles

/// An rrank <= 1 shape without 2-cycles plus one idempotent function per
/// vertex, subject to the arrow condition: for every non-loop arrow and
/// every p, the source or the target function fixes p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneDatum {
    pub shape: AdmissibleShape,
    pub us: Vec<Vec<usize>>,
    pub m: usize,
}

fn check_rank1_shape(shape: &AdmissibleShape) -> Result<(), ClassifyError> {
    unique_cycle_decomposition(shape)?;
    if shape.has_two_cycle() {
        return Err(ClassifyError::HasTwoCycle);
    }
    Ok(())
}

impl RankOneDatum {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        check_rank1_shape(&self.shape)?;
        let n = self.shape.n();
        if self.us.len() != n || self.us.iter().any(|u| u.len() != self.m) {
            return Err(ClassifyError::DimensionMismatch);
        }
        for (i, u) in self.us.iter().enumerate() {
            if !is_idempotent_function(u) {
                return Err(ClassifyError::NotIdempotent(i));
            }
        }
        for (s, t) in self.shape.non_loop_arrows() {
            for p in 0..self.m {
                if self.us[s][p] != p && self.us[t][p] != p {
                    return Err(ClassifyError::ConditionViolated {
                        arrow: Some((s, t)),
                        p,
                    });
                }
            }
        }
        Ok(())
    }
}

/// All rank-one data on a given shape, in lexicographic order of the
/// function tuple.
pub fn enumerate_rank1_data(
    shape: &AdmissibleShape,
    m: usize,
) -> Result<Vec<RankOneDatum>, ClassifyError> {
    check_rank1_shape(shape)?;
    let n = shape.n();
    let idems = idempotent_functions(m);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let us: Vec<Vec<usize>> = idx.iter().map(|&k| idems[k].clone()).collect();
        let d = RankOneDatum {
            shape: shape.clone(),
            us,
            m,
        };
        if d.validate().is_ok() {
            out.push(d);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < idems.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

fn rank1_grid(field: FieldSpec, shape: &AdmissibleShape, us: &[Vec<usize>], m: usize) -> EGrid {
    let n = shape.n();
    let alg = Algebra::split(field, m);
    let mut g = EGrid::new(alg, n, vec![Matrix::zero(field, m, m); n * n]);
    for i in 0..n {
        g.set(i, i, endo_from_function(field, &us[i]));
    }
    for (s, t) in shape.non_loop_arrows() {
        let phi_t = endo_from_function(field, &us[t]);
        g.set(s, t, Matrix::identity(field, m).sub(&phi_t));
    }
    g
}

/// Builds the admissible pair from a rank-one datum. Vertices without an
/// incoming non-loop arrow must carry the identity function, otherwise the
/// splitted condition cannot hold.
pub fn rep_from_rank1_datum(
    d: &RankOneDatum,
    field: FieldSpec,
) -> Result<AdmissiblePair, ClassifyError> {
    d.validate()?;
    let q = d.shape.quiver();
    for i in 0..q.n {
        if q.rrank(i).unwrap() == 0 && d.us[i] != identity_function(d.m) {
            return Err(ClassifyError::SplitForced(i));
        }
    }
    let g = rank1_grid(field, &d.shape, &d.us, d.m);
    Ok(pair_from_grid(&g)?)
}

// ---------------------------------------------------------------------------
// 2-cycle data

/// The (u, a) datum of a 2-cycle representation: any function u on
/// {1..m} plus scalars a_p, normalized so that a_p = 0 whenever u(p) = p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDatum {
    pub field: FieldSpec,
    pub u: Vec<usize>,
    pub a: Vec<Scalar>,
}

impl CycleDatum {
    /// Normalizes (a_p := 0 when u(p) = p) and validates the idempotency
    /// conditions at each non-fixed p: on a 2-cycle orbit of u, the sum
    /// a_p + a_{u(p)} = 1; otherwise a_p in {0, 1}, and additionally
    /// a_p + a_{u(p)} = 1 unless u(p) is itself a fixed point (in which
    /// case a_{u(p)} is pinned to 0 by normalization and the coefficient
    /// identity puts no constraint linking the two).
    pub fn new(field: FieldSpec, u: Vec<usize>, mut a: Vec<Scalar>) -> Result<Self, ClassifyError> {
        let m = u.len();
        if a.len() != m {
            return Err(ClassifyError::DimensionMismatch);
        }
        for p in 0..m {
            if u[p] == p {
                a[p] = field.zero();
            }
        }
        for p in 0..m {
            let t = u[p];
            if t == p {
                continue;
            }
            if u[t] == p {
                if !a[p].add_ref(&a[t]).is_one() {
                    return Err(ClassifyError::ConditionViolated { arrow: None, p });
                }
            } else {
                if !a[p].is_zero() && !a[p].is_one() {
                    return Err(ClassifyError::ConditionViolated { arrow: None, p });
                }
                if u[t] != t && !a[p].add_ref(&a[t]).is_one() {
                    return Err(ClassifyError::ConditionViolated { arrow: None, p });
                }
            }
        }
        Ok(CycleDatum { field, u, a })
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }
}

/// The four maps of a 2-cycle representation in grid order:
/// (phi_1, phi_{alpha_1}, phi_{alpha_2}, phi_2).
pub fn cycle_maps(field: FieldSpec, u: &[usize], a: &[Scalar]) -> [Matrix; 4] {
    let m = u.len();
    let mut phi1 = Matrix::zero(field, m, m);
    let mut phi_a1 = Matrix::zero(field, m, m);
    let mut phi_a2 = Matrix::zero(field, m, m);
    let mut phi2 = Matrix::zero(field, m, m);
    let one = field.one();
    for p in 0..m {
        let ap = &a[p];
        let cp = one.sub_ref(ap);
        // row p of each map: a functional in the dual basis
        let add = |mat: &mut Matrix, q: usize, v: &Scalar| {
            let cur = mat.get(p, q).add_ref(v);
            mat.set(p, q, cur);
        };
        add(&mut phi1, p, ap);
        add(&mut phi1, u[p], &cp);
        add(&mut phi_a1, p, ap);
        add(&mut phi_a1, u[p], &ap.neg_ref());
        add(&mut phi_a2, p, &cp);
        add(&mut phi_a2, u[p], &cp.neg_ref());
        add(&mut phi2, p, &cp);
        add(&mut phi2, u[p], ap);
    }
    [phi1, phi_a1, phi_a2, phi2]
}

/// The 2x2 grid over K^m defined by a cycle datum: E_11 = phi_1,
/// E_12 = phi_{alpha_1}, E_21 = phi_{alpha_2}, E_22 = phi_2.
pub fn grid_from_cycle_datum(d: &CycleDatum) -> EGrid {
    let m = d.m();
    let [phi1, phi_a1, phi_a2, phi2] = cycle_maps(d.field, &d.u, &d.a);
    EGrid::new(
        Algebra::split(d.field, m),
        2,
        vec![phi1, phi_a1, phi_a2, phi2],
    )
}

/// The admissible pair on (at most) the 2-cycle; arrows whose map vanishes
/// degrade to the smaller quiver.
pub fn rep_from_cycle_datum(d: &CycleDatum) -> Result<AdmissiblePair, ClassifyError> {
    Ok(pair_from_grid(&grid_from_cycle_datum(d))?)
}

/// All cycle data over a prime field, by exhaustive filtering.
pub fn enumerate_cycle_data(m: usize, field: FieldSpec) -> Result<Vec<CycleDatum>, ClassifyError> {
    let elements = field.elements().map_err(|_| ClassifyError::InfiniteField)?;
    let mut out = Vec::new();
    for u in all_functions(m) {
        let mut idx = vec![0usize; m];
        loop {
            let a: Vec<Scalar> = idx.iter().map(|&k| elements[k].clone()).collect();
            // only keep already-normalized vectors so each datum appears once
            if (0..m).all(|p| u[p] != p || a[p].is_zero()) {
                if let Ok(d) = CycleDatum::new(field, u.clone(), a) {
                    out.push(d);
                }
            }
            let mut i = m;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < elements.len() {
                    break;
                }
                idx[i] = 0;
            }
            if idx.iter().all(|&k| k == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// One coordinate of a symbolic a-vector over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AEntry {
    Const(Scalar),
    Param(usize),
    OneMinusParam(usize),
}

/// A parametrized family of cycle data over the rationals: free parameters
/// come from 2-cycle orbits of u, everything else is pinned to a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleFamily {
    pub u: Vec<usize>,
    pub entries: Vec<AEntry>,
    pub params: usize,
}

impl CycleFamily {
    pub fn instantiate(
        &self,
        field: FieldSpec,
        vals: &[Scalar],
    ) -> Result<CycleDatum, ClassifyError> {
        assert_eq!(vals.len(), self.params);
        let one = field.one();
        let a: Vec<Scalar> = self
            .entries
            .iter()
            .map(|e| match e {
                AEntry::Const(c) => match (field, c) {
                    (FieldSpec::Prime(p), Scalar::Rat(_)) => c.reduce_mod(p).unwrap(),
                    _ => c.clone(),
                },
                AEntry::Param(k) => vals[*k].clone(),
                AEntry::OneMinusParam(k) => one.sub_ref(&vals[*k]),
            })
            .collect();
        CycleDatum::new(field, self.u.clone(), a)
    }

    /// Draws small random rationals for the free parameters.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> CycleDatum {
        let q = FieldSpec::Rationals;
        let vals: Vec<Scalar> = (0..self.params)
            .map(|_| {
                let num = rng.gen_range(-9i64..=9);
                let den = rng.gen_range(1i64..=9);
                q.from_ratio(num, den).unwrap()
            })
            .collect();
        self.instantiate(q, &vals)
            .expect("family members are valid")
    }
}

fn families_for_u(u: &[usize]) -> Vec<CycleFamily> {
    let m = u.len();
    let q = FieldSpec::Rationals;
    let binary: Vec<usize> = (0..m).filter(|&p| u[p] != p && u[u[p]] != p).collect();
    // the sum link a_p + a_{u(p)} = 1 is absent when u(p) is a fixed point
    let constraints: Vec<(usize, usize)> = (0..m)
        .filter(|&p| u[p] != p && u[u[p]] != u[p])
        .map(|p| (p, u[p]))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << binary.len()) {
        let mut known: Vec<Option<Scalar>> = vec![None; m];
        for p in 0..m {
            if u[p] == p {
                known[p] = Some(q.zero());
            }
        }
        for (k, &p) in binary.iter().enumerate() {
            known[p] = Some(if (mask >> k) & 1 == 1 {
                q.one()
            } else {
                q.zero()
            });
        }
        let mut ok = true;
        loop {
            let mut changed = false;
            for &(p, r) in &constraints {
                match (known[p].clone(), known[r].clone()) {
                    (Some(x), Some(y)) => {
                        if !x.add_ref(&y).is_one() {
                            ok = false;
                        }
                    }
                    (Some(x), None) => {
                        known[r] = Some(q.one().sub_ref(&x));
                        changed = true;
                    }
                    (None, Some(y)) => {
                        known[p] = Some(q.one().sub_ref(&y));
                        changed = true;
                    }
                    (None, None) => {}
                }
            }
            if !ok || !changed {
                break;
            }
        }
        if !ok {
            continue;
        }
        let mut entries: Vec<Option<AEntry>> =
            known.into_iter().map(|k| k.map(AEntry::Const)).collect();
        let mut params = 0;
        for p in 0..m {
            if entries[p].is_none() {
                let r = u[p];
                // an unpinned index always sits on a 2-cycle orbit of u with
                // an unpinned partner
                assert!(u[r] == p && r != p && entries[r].is_none());
                if p < r {
                    entries[p] = Some(AEntry::Param(params));
                    entries[r] = Some(AEntry::OneMinusParam(params));
                    params += 1;
                }
            }
        }
        out.push(CycleFamily {
            u: u.to_vec(),
            entries: entries.into_iter().map(Option::unwrap).collect(),
            params,
        });
    }
    out
}

/// The complete symbolic description of cycle data over the rationals.
pub fn enumerate_cycle_families(m: usize) -> Vec<CycleFamily> {
    all_functions(m)
        .iter()
        .flat_map(|u| families_for_u(u))
        .collect()
}

// ---------------------------------------------------------------------------
// connected rank-one quivers containing a 2-cycle

/// A connected rrank-1 shape whose 2-cycle sits on vertices 1 and 2
/// (0-based: 0 and 1), a shared function u for the cycle vertices,
/// idempotent functions for the tree vertices, and the a-vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectedCycleDatum {
    pub shape: AdmissibleShape,
    pub us: Vec<Vec<usize>>,
    pub a: Vec<Scalar>,
    pub field: FieldSpec,
}

impl ConnectedCycleDatum {
    pub fn m(&self) -> usize {
        self.us[0].len()
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        let comps = unique_cycle_decomposition(&self.shape)?;
        if comps.len() != 1 || comps[0].cycle != vec![0, 1] {
            return Err(ClassifyError::BadCycleShape);
        }
        let n = self.shape.n();
        let m = self.m();
        if self.us.len() != n || self.us.iter().any(|u| u.len() != m) || self.a.len() != m {
            return Err(ClassifyError::DimensionMismatch);
        }
        if self.us[0] != self.us[1] {
            return Err(ClassifyError::BadCycleShape);
        }
        for (i, u) in self.us.iter().enumerate().skip(2) {
            if !is_idempotent_function(u) {
                return Err(ClassifyError::NotIdempotent(i));
            }
        }
        // cycle conditions, including normalization
        let d = CycleDatum::new(self.field, self.us[0].clone(), self.a.clone())?;
        if d.a != self.a {
            // a was not normalized
            return Err(ClassifyError::ConditionViolated { arrow: None, p: 0 });
        }
        // tree-arrow conditions
        check_tree_conditions(&self.shape, &self.us, &self.a, 0, 1)?;
        Ok(())
    }
}

/// The condition on non-cycle arrows: whenever neither endpoint function
/// fixes p, the arrow must leave cycle vertex c0 with a_p = 1 or cycle
/// vertex c1 with a_p = 0.
fn check_tree_conditions(
    shape: &AdmissibleShape,
    us: &[Vec<usize>],
    a: &[Scalar],
    c0: usize,
    c1: usize,
) -> Result<(), ClassifyError> {
    let m = a.len();
    for (s, t) in shape.non_loop_arrows() {
        if (s, t) == (c0, c1) || (s, t) == (c1, c0) {
            continue;
        }
        for p in 0..m {
            if us[s][p] != p && us[t][p] != p {
                let ok = (s == c0 && a[p].is_one()) || (s == c1 && a[p].is_zero());
                if !ok {
                    return Err(ClassifyError::ConditionViolated {
                        arrow: Some((s, t)),
                        p,
                    });
                }
            }
        }
    }
    Ok(())
}

fn connected_cycle_grid(d: &ConnectedCycleDatum) -> EGrid {
    let n = d.shape.n();
    let m = d.m();
    let field = d.field;
    let alg = Algebra::split(field, m);
    let mut g = EGrid::new(alg, n, vec![Matrix::zero(field, m, m); n * n]);
    let [phi1, phi_a1, phi_a2, phi2] = cycle_maps(field, &d.us[0], &d.a);
    g.set(0, 0, phi1);
    g.set(0, 1, phi_a1);
    g.set(1, 0, phi_a2);
    g.set(1, 1, phi2);
    for i in 2..n {
        g.set(i, i, endo_from_function(field, &d.us[i]));
    }
    for (s, t) in d.shape.non_loop_arrows() {
        if (s, t) == (0, 1) || (s, t) == (1, 0) {
            continue;
        }
        let phi_t = endo_from_function(field, &d.us[t]);
        g.set(s, t, Matrix::identity(field, m).sub(&phi_t));
    }
    g
}

pub fn rep_from_connected_cycle(d: &ConnectedCycleDatum) -> Result<AdmissiblePair, ClassifyError> {
    d.validate()?;
    Ok(pair_from_grid(&connected_cycle_grid(d))?)
}

// ---------------------------------------------------------------------------
// full classified grid set over a prime field

/// Every grid over F_p obtained from the rrank <= 1 classification, across
/// all admissible shapes on n vertices, deduplicated and sorted. This is
/// the set the brute-force oracle is compared against.
pub fn classified_grid_set(n: usize, m: usize, field: FieldSpec) -> Vec<EGrid> {
    let elements = field
        .elements()
        .expect("classified sets need a prime field");
    let alg = Algebra::split(field, m);
    let mut seen: BTreeSet<Vec<Matrix>> = BTreeSet::new();
    let mut out = Vec::new();
    // all rrank <= 1 shapes: each vertex picks at most one non-loop source;
    // choice[v] == v encodes "none"
    let mut choice: Vec<usize> = vec![0; n];
    let mut done = false;
    while !done {
        let extra: Vec<(usize, usize)> = (0..n)
            .filter(|&v| choice[v] != v)
            .map(|v| (choice[v], v))
            .collect();
        let shape = AdmissibleShape::with_extra_arrows(n, &extra).unwrap();
        let comps = unique_cycle_decomposition(&shape).unwrap();
        let per_comp: Vec<Vec<EntryAssignment>> = comps
            .iter()
            .map(|c| component_options(field, m, &elements, &shape, c))
            .collect();
        // cartesian product of the per-component choices
        let mut idx = vec![0usize; per_comp.len()];
        loop {
            let mut g = EGrid::new(alg.clone(), n, vec![Matrix::zero(field, m, m); n * n]);
            for (c, &k) in idx.iter().enumerate() {
                for ((i, j), e) in &per_comp[c][k] {
                    g.set(*i, *j, e.clone());
                }
            }
            if seen.insert(g.entries().to_vec()) {
                out.push(g);
            }
            let mut c = per_comp.len();
            loop {
                if c == 0 {
                    break;
                }
                c -= 1;
                idx[c] += 1;
                if idx[c] < per_comp[c].len() {
                    break;
                }
                idx[c] = 0;
            }
            if idx.iter().all(|&k| k == 0) {
                break;
            }
        }
        // odometer over choice, base n per digit
        let mut v = 0;
        loop {
            if v == n {
                done = true;
                break;
            }
            choice[v] += 1;
            if choice[v] < n {
                break;
            }
            choice[v] = 0;
            v += 1;
        }
    }
    out.sort_by(|a, b| a.entries().cmp(b.entries()));
    out
}

/// One representation choice for a component: sparse (position, map) pairs.
type EntryAssignment = Vec<((usize, usize), Matrix)>;

/// All representation choices for one connected component, as sparse entry
/// assignments.
fn component_options(
    field: FieldSpec,
    m: usize,
    elements: &[Scalar],
    shape: &AdmissibleShape,
    comp: &CycleTreeDecomposition,
) -> Vec<EntryAssignment> {
    let verts = &comp.vertices;
    let comp_set: BTreeSet<usize> = verts.iter().copied().collect();
    let non_loop: Vec<(usize, usize)> = shape
        .non_loop_arrows()
        .into_iter()
        .filter(|&(s, _)| comp_set.contains(&s))
        .collect();
    let mut out = Vec::new();
    if comp.cycle.len() == 2 {
        let (c0, c1) = (comp.cycle[0], comp.cycle[1]);
        let tree_verts: Vec<usize> = verts
            .iter()
            .copied()
            .filter(|&v| v != c0 && v != c1)
            .collect();
        let idems = idempotent_functions(m);
        for u in all_functions(m) {
            for a in normalized_a_vectors(field, elements, &u) {
                // tuples of idempotent functions for the tree vertices
                let mut idx = vec![0usize; tree_verts.len()];
                loop {
                    let mut us: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                    us.insert(c0, u.clone());
                    us.insert(c1, u.clone());
                    for (k, &v) in tree_verts.iter().enumerate() {
                        us.insert(v, idems[idx[k]].clone());
                    }
                    if tree_conditions_hold(&non_loop, &us, &a, c0, c1) {
                        out.push(cycle_component_entries(
                            field, &non_loop, &us, &a, c0, c1, verts,
                        ));
                    }
                    let mut k = tree_verts.len();
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < idems.len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                    if idx.iter().all(|&k| k == 0) {
                        break;
                    }
                }
            }
        }
    } else {
        // no 2-cycle: per-vertex idempotent functions with the or-condition,
        // identity forced at vertices without an incoming non-loop arrow
        let idems = idempotent_functions(m);
        let id = identity_function(m);
        let choices: Vec<Vec<Vec<usize>>> = verts
            .iter()
            .map(|&v| {
                if non_loop.iter().any(|&(_, t)| t == v) {
                    idems.clone()
                } else {
                    vec![id.clone()]
                }
            })
            .collect();
        let mut idx = vec![0usize; verts.len()];
        loop {
            let us: BTreeMap<usize, Vec<usize>> = verts
                .iter()
                .enumerate()
                .map(|(k, &v)| (v, choices[k][idx[k]].clone()))
                .collect();
            if non_loop
                .iter()
                .all(|&(s, t)| (0..m).all(|p| us[&s][p] == p || us[&t][p] == p))
            {
                let mut entries = Vec::new();
                for &v in verts {
                    entries.push(((v, v), endo_from_function(field, &us[&v])));
                }
                for &(s, t) in &non_loop {
                    let phi_t = endo_from_function(field, &us[&t]);
                    entries.push(((s, t), Matrix::identity(field, m).sub(&phi_t)));
                }
                out.push(entries);
            }
            let mut k = verts.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&k| k == 0) {
                break;
            }
        }
    }
    out
}

fn normalized_a_vectors(field: FieldSpec, elements: &[Scalar], u: &[usize]) -> Vec<Vec<Scalar>> {
    let m = u.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let a: Vec<Scalar> = idx.iter().map(|&k| elements[k].clone()).collect();
        if (0..m).all(|p| u[p] != p || a[p].is_zero())
            && CycleDatum::new(field, u.to_vec(), a.clone()).is_ok()
        {
            out.push(a);
        }
        let mut i = m;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < elements.len() {
                break;
            }
            idx[i] = 0;
        }
        if idx.iter().all(|&k| k == 0) {
            break;
        }
    }
    out
}

fn tree_conditions_hold(
    non_loop: &[(usize, usize)],
    us: &BTreeMap<usize, Vec<usize>>,
    a: &[Scalar],
    c0: usize,
    c1: usize,
) -> bool {
    let m = a.len();
    non_loop.iter().all(|&(s, t)| {
        if (s, t) == (c0, c1) || (s, t) == (c1, c0) {
            return true;
        }
        (0..m).all(|p| {
            us[&s][p] == p
                || us[&t][p] == p
                || (s == c0 && a[p].is_one())
                || (s == c1 && a[p].is_zero())
        })
    })
}

fn cycle_component_entries(
    field: FieldSpec,
    non_loop: &[(usize, usize)],
    us: &BTreeMap<usize, Vec<usize>>,
    a: &[Scalar],
    c0: usize,
    c1: usize,
    verts: &[usize],
) -> Vec<((usize, usize), Matrix)> {
    let m = a.len();
    let [phi1, phi_a1, phi_a2, phi2] = cycle_maps(field, &us[&c0], a);
    let mut entries = vec![
        ((c0, c0), phi1),
        ((c0, c1), phi_a1),
        ((c1, c0), phi_a2),
        ((c1, c1), phi2),
    ];
    for &v in verts {
        if v != c0 && v != c1 {
            entries.push(((v, v), endo_from_function(field, &us[&v])));
        }
    }
    for &(s, t) in non_loop {
        if (s, t) == (c0, c1) || (s, t) == (c1, c0) {
            continue;
        }
        let phi_t = endo_from_function(field, &us[&t]);
        entries.push(((s, t), Matrix::identity(field, m).sub(&phi_t)));
    }
    entries
}

// ---------------------------------------------------------------------------
// Hochschild extensions

/// A base algebra B, a B-bimodule M (by per-basis action matrices) and a
/// bilinear map omega: B x B -> M by its values on basis pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HochschildData {
    pub b: Algebra,
    pub m_dim: usize,
    /// left[i]: the action of basis element b_i on M
    pub left: Vec<Matrix>,
    /// right[i]: the action m -> m * b_i
    pub right: Vec<Matrix>,
    /// omega[i][j] = omega(b_i (x) b_j), an element of M
    pub omega: Vec<Vec<Vector>>,
}

impl HochschildData {
    fn left_act(&self, b: &Vector, m: &Vector) -> Vector {
        let mut out = Vector::zero(self.b.field, self.m_dim);
        for (i, c) in b.coords.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.left[i].apply(m).scale(c));
            }
        }
        out
    }

    fn right_act(&self, m: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::zero(self.b.field, self.m_dim);
        for (i, c) in b.coords.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.right[i].apply(m).scale(c));
            }
        }
        out
    }

    fn omega_of(&self, b: &Vector, b2: &Vector) -> Vector {
        let mut out = Vector::zero(self.b.field, self.m_dim);
        for (i, c) in b.coords.iter().enumerate() {
            for (j, d) in b2.coords.iter().enumerate() {
                let cd = c.mul_ref(d);
                if !cd.is_zero() {
                    out = out.add(&self.omega[i][j].scale(&cd));
                }
            }
        }
        out
    }

    /// Verifies the bimodule axioms, the normalization and the 2-cocycle
    /// identity on all basis triples.
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let db = self.b.dim;
        let field = self.b.field;
        if self.left.len() != db
            || self.right.len() != db
            || self.omega.len() != db
            || self.omega.iter().any(|row| row.len() != db)
        {
            return Err(ClassifyError::DimensionMismatch);
        }
        let basis = |i: usize| Vector::basis(field, db, i);
        let id = Matrix::identity(field, self.m_dim);
        // unit acts as identity
        let unit = &self.b.unit;
        let l_unit = Matrix::from_fn(field, self.m_dim, self.m_dim, |r, c| {
            let mut acc = field.zero();
            for (i, u) in unit.coords.iter().enumerate() {
                acc = acc.add_ref(&u.mul_ref(self.left[i].get(r, c)));
            }
            acc
        });
        let r_unit = Matrix::from_fn(field, self.m_dim, self.m_dim, |r, c| {
            let mut acc = field.zero();
            for (i, u) in unit.coords.iter().enumerate() {
                acc = acc.add_ref(&u.mul_ref(self.right[i].get(r, c)));
            }
            acc
        });
        if l_unit != id || r_unit != id {
            return Err(ClassifyError::NotABimodule);
        }
        // associativity of the actions and their commutation
        for i in 0..db {
            for j in 0..db {
                let prod = &self.b.table[i][j];
                for r in 0..self.m_dim {
                    let m = Vector::basis(field, self.m_dim, r);
                    let lhs = self.left_act(&basis(i), &self.left_act(&basis(j), &m));
                    if lhs != self.left_act(prod, &m) {
                        return Err(ClassifyError::NotABimodule);
                    }
                    let rhs = self.right_act(&self.right_act(&m, &basis(i)), &basis(j));
                    if rhs != self.right_act(&m, prod) {
                        return Err(ClassifyError::NotABimodule);
                    }
                    let mixed1 = self.right_act(&self.left_act(&basis(i), &m), &basis(j));
                    let mixed2 = self.left_act(&basis(i), &self.right_act(&m, &basis(j)));
                    if mixed1 != mixed2 {
                        return Err(ClassifyError::NotABimodule);
                    }
                }
            }
        }
        // normalization
        for i in 0..db {
            if !self.omega_of(&basis(i), unit).is_zero()
                || !self.omega_of(unit, &basis(i)).is_zero()
            {
                return Err(ClassifyError::NotACocycle((i, 0, 0)));
            }
        }
        // cocycle identity on basis triples
        for i in 0..db {
            for j in 0..db {
                for k in 0..db {
                    let a = basis(i);
                    let bb = basis(j);
                    let c = basis(k);
                    let t1 = self.left_act(&a, &self.omega_of(&bb, &c));
                    let t2 = self.omega_of(&self.b.mul(&a, &bb), &c);
                    let t3 = self.omega_of(&a, &self.b.mul(&bb, &c));
                    let t4 = self.right_act(&self.omega_of(&a, &bb), &c);
                    if !t1.sub(&t2).add(&t3).sub(&t4).is_zero() {
                        return Err(ClassifyError::NotACocycle((i, j, k)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The extension algebra A = B + M with multiplication
/// (b, m)(b', m') = (bb', bm' + mb' + omega(b (x) b')); basis: B first.
pub fn hochschild_extension(h: &HochschildData) -> Result<Algebra, ClassifyError> {
    h.validate()?;
    let db = h.b.dim;
    let dm = h.m_dim;
    let dim = db + dm;
    let field = h.b.field;
    let embed = |b: &Vector, m: &Vector| -> Vector {
        let mut v = Vector::zero(field, dim);
        for (i, c) in b.coords.iter().enumerate() {
            v.coords[i] = c.clone();
        }
        for (i, c) in m.coords.iter().enumerate() {
            v.coords[db + i] = c.clone();
        }
        v
    };
    let zero_b = Vector::zero(field, db);
    let zero_m = Vector::zero(field, dm);
    let mut table = vec![vec![Vector::zero(field, dim); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let (bi, mi) = if i < db {
                (Vector::basis(field, db, i), zero_m.clone())
            } else {
                (zero_b.clone(), Vector::basis(field, dm, i - db))
            };
            let (bj, mj) = if j < db {
                (Vector::basis(field, db, j), zero_m.clone())
            } else {
                (zero_b.clone(), Vector::basis(field, dm, j - db))
            };
            let b_part = h.b.mul(&bi, &bj);
            let m_part = h
                .left_act(&bi, &mj)
                .add(&h.right_act(&mi, &bj))
                .add(&h.omega_of(&bi, &bj));
            table[i][j] = embed(&b_part, &m_part);
        }
    }
    let unit = embed(&h.b.unit, &zero_m);
    let a = Algebra::new(field, unit, table);
    if let Some(t) = a.associativity_violation() {
        return Err(ClassifyError::NotACocycle(t));
    }
    Ok(a)
}

/// Conditions under which the block lift of f is an algebra map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiReport {
    pub bimodule_morphism: bool,
    pub fixes_omega: bool,
}

impl PhiReport {
    pub fn is_algebra_map(&self) -> bool {
        self.bimodule_morphism && self.fixes_omega
    }
}

/// Lifts an endomorphism f of M to phi(b, m) = (b, f(m)) on B + M and
/// reports the two lemma conditions.
pub fn phi_from_f(h: &HochschildData, f: &Matrix) -> (Matrix, PhiReport) {
    let db = h.b.dim;
    let dm = h.m_dim;
    let field = h.b.field;
    assert_eq!((f.rows, f.cols), (dm, dm));
    let phi = Matrix::from_fn(field, db + dm, db + dm, |r, c| {
        if r < db && c < db {
            if r == c {
                field.one()
            } else {
                field.zero()
            }
        } else if r >= db && c >= db {
            f.get(r - db, c - db).clone()
        } else {
            field.zero()
        }
    });
    let bimodule_morphism = (0..db)
        .all(|i| f.mul(&h.left[i]) == h.left[i].mul(f) && f.mul(&h.right[i]) == h.right[i].mul(f));
    let fixes_omega = h.omega.iter().flatten().all(|w| f.apply(w) == *w);
    (
        phi,
        PhiReport {
            bimodule_morphism,
            fixes_omega,
        },
    )
}

/// Builds an admissible pair over A = B + M from idempotent bimodule
/// endomorphisms of M whose images all contain Im omega.
pub fn rep_from_hochschild_family(
    h: &HochschildData,
    shape: &AdmissibleShape,
    fs: &[Matrix],
) -> Result<AdmissiblePair, ClassifyError> {
    check_rank1_shape(shape)?;
    let ext = hochschild_extension(h)?;
    let n = shape.n();
    if fs.len() != n {
        return Err(ClassifyError::DimensionMismatch);
    }
    let q = shape.quiver();
    let mut phis = Vec::with_capacity(n);
    for (i, f) in fs.iter().enumerate() {
        let (phi, report) = phi_from_f(h, f);
        if !is_idempotent(f) || !report.bimodule_morphism {
            return Err(ClassifyError::BadVertexMap(i));
        }
        if !report.fixes_omega {
            return Err(ClassifyError::ImageConditionViolated(i));
        }
        if q.rrank(i).unwrap() == 0 && !phi.is_identity() {
            return Err(ClassifyError::SplitForced(i));
        }
        phis.push(phi);
    }
    let dim = ext.dim;
    let field = ext.field;
    let mut g = EGrid::new(ext, n, vec![Matrix::zero(field, dim, dim); n * n]);
    for (i, phi) in phis.iter().enumerate() {
        g.set(i, i, phi.clone());
    }
    for (s, t) in shape.non_loop_arrows() {
        g.set(s, t, Matrix::identity(field, dim).sub(&phis[t]));
    }
    Ok(pair_from_grid(&g)?)
}

/// Image and kernel bases of the loop map at a vertex: A = B_i + M_i.
pub fn ideal_decomposition(p: &AdmissiblePair, i: usize) -> (Vec<Vector>, Vec<Vector>) {
    let phi = &p.phi[&(i, i)];
    (image_basis(phi), kernel_basis(phi))
}
