//! Property tests: an independent global check of the twisting axioms on
//! the nm x nm matrix of tau, plus structural invariants of the exact
//! arithmetic and the canonical forms.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistlab::absred::{normalize, random_invertible, FiberPartition};
use twistlab::algebra::Algebra;
use twistlab::classify::{all_functions, enumerate_cycle_data, grid_from_cycle_datum};
use twistlab::field::FieldSpec;
use twistlab::linalg::{compose, endo_from_function, hadamard, Matrix, Vector};
use twistlab::oracle::brute_force_twisting_maps;
use twistlab::twist::{check_axioms, EGrid};

/// tau(e_i (x) f_p) = sum_j E_ij(f_p) (x) e_j as a vector in A (x) K^n,
/// with basis f_q (x) e_j at index q * n + j.
fn tau_apply(g: &EGrid, i: usize, a: &Vector) -> Vector {
    let n = g.n;
    let m = g.m();
    let mut out = Vector::zero(g.algebra.field, m * n);
    for j in 0..n {
        let img = g.get(i, j).apply(a);
        for q in 0..m {
            out.coords[q * n + j] = out.coords[q * n + j].add_ref(&img.coords[q]);
        }
    }
    out
}

/// The four tensor-level twisting-map axioms, evaluated on basis elements
/// without reference to the pointwise formulation.
fn global_axioms(g: &EGrid) -> bool {
    let n = g.n;
    let m = g.m();
    let field = g.algebra.field;
    let fp = |p: usize| Vector::basis(field, m, p);

    // tau(e_i (x) 1) = 1 (x) e_i
    for i in 0..n {
        let mut expect = Vector::zero(field, m * n);
        for q in 0..m {
            expect.coords[q * n + i] = field.one();
        }
        if tau_apply(g, i, &g.algebra.unit) != expect {
            return false;
        }
    }
    // tau(1 (x) a) = a (x) 1
    for p in 0..m {
        let mut got = Vector::zero(field, m * n);
        for i in 0..n {
            got = got.add(&tau_apply(g, i, &fp(p)));
        }
        let mut expect = Vector::zero(field, m * n);
        for j in 0..n {
            expect.coords[p * n + j] = field.one();
        }
        if got != expect {
            return false;
        }
    }
    // tau((e_i e_j) (x) a) = (A (x) mult) (tau (x) id) (e_i (x) tau(e_j (x) a))
    for i in 0..n {
        for j in 0..n {
            for p in 0..m {
                let inner = tau_apply(g, j, &fp(p));
                let mut rhs = Vector::zero(field, m * n);
                for q in 0..n {
                    // first tensor leg of the q-th summand of tau(e_j (x) f_p)
                    let v = Vector {
                        field,
                        coords: (0..m).map(|r| inner.coords[r * n + q].clone()).collect(),
                    };
                    let img = g.get(i, q).apply(&v);
                    for r in 0..m {
                        rhs.coords[r * n + q] = rhs.coords[r * n + q].add_ref(&img.coords[r]);
                    }
                }
                let lhs = if i == j {
                    tau_apply(g, i, &fp(p))
                } else {
                    Vector::zero(field, m * n)
                };
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    // tau(e_i (x) ab) = (mult (x) K^n) (A (x) tau) (tau(e_i (x) a) (x) b)
    for i in 0..n {
        for p in 0..m {
            for r in 0..m {
                let first = tau_apply(g, i, &fp(p));
                let mut rhs = Vector::zero(field, m * n);
                for q in 0..n {
                    let v = Vector {
                        field,
                        coords: (0..m).map(|s| first.coords[s * n + q].clone()).collect(),
                    };
                    let second = tau_apply(g, q, &fp(r));
                    for j in 0..n {
                        let w = Vector {
                            field,
                            coords: (0..m).map(|s| second.coords[s * n + j].clone()).collect(),
                        };
                        let prod = hadamard(&v, &w).unwrap();
                        for s in 0..m {
                            rhs.coords[s * n + j] = rhs.coords[s * n + j].add_ref(&prod.coords[s]);
                        }
                    }
                }
                let lhs = if p == r {
                    tau_apply(g, i, &fp(p))
                } else {
                    Vector::zero(field, m * n)
                };
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

fn grid_from_bits(field: FieldSpec, n: usize, m: usize, bits: &[u8]) -> EGrid {
    let entries = (0..n * n)
        .map(|k| {
            Matrix::from_fn(field, m, m, |r, c| {
                field.from_i64(bits[k * m * m + r * m + c] as i64)
            })
        })
        .collect();
    EGrid::new(Algebra::split(field, m), n, entries)
}

proptest! {
    // the pointwise axiom checker agrees with the tensor-level definition
    #[test]
    fn pointwise_axioms_match_global(bits in proptest::collection::vec(0u8..2, 16)) {
        let g = grid_from_bits(FieldSpec::Prime(2), 2, 2, &bits);
        prop_assert_eq!(check_axioms(&g).passed(), global_axioms(&g));
    }

    #[test]
    fn pointwise_axioms_match_global_f3(bits in proptest::collection::vec(0u8..3, 16)) {
        let g = grid_from_bits(FieldSpec::Prime(3), 2, 2, &bits);
        prop_assert_eq!(check_axioms(&g).passed(), global_axioms(&g));
    }

    // rational arithmetic is a field
    #[test]
    fn rational_field_laws(a in -20i64..20, b in 1i64..20, c in -20i64..20, d in 1i64..20) {
        let q = FieldSpec::Rationals;
        let x = q.from_ratio(a, b).unwrap();
        let y = q.from_ratio(c, d).unwrap();
        prop_assert_eq!(x.add_ref(&y), y.add_ref(&x));
        prop_assert_eq!(x.mul_ref(&y), y.mul_ref(&x));
        prop_assert_eq!(x.sub_ref(&y).add_ref(&y), x.clone());
        if !y.is_zero() {
            prop_assert_eq!(x.div_ref(&y).unwrap().mul_ref(&y), x.clone());
        }
    }

    // theta_u theta_v = theta_{v o u} under the row convention
    #[test]
    fn endo_composition(u in proptest::collection::vec(0usize..3, 3),
                        v in proptest::collection::vec(0usize..3, 3)) {
        let q = FieldSpec::Rationals;
        let vu: Vec<usize> = (0..3).map(|p| v[u[p]]).collect();
        let lhs = compose(&endo_from_function(q, &u), &endo_from_function(q, &v)).unwrap();
        prop_assert_eq!(lhs, endo_from_function(q, &vu));
    }
}

#[test]
fn valid_grids_satisfy_global_axioms() {
    let field = FieldSpec::Prime(3);
    for g in &brute_force_twisting_maps(2, 2, field).unwrap().grids {
        assert!(global_axioms(g));
    }
    for m in 2..=3 {
        for d in enumerate_cycle_data(m, field).unwrap() {
            assert!(global_axioms(&grid_from_cycle_datum(&d)));
        }
    }
}

#[test]
fn normalize_is_a_projection() {
    // normalizing a normalized matrix changes nothing
    let field = FieldSpec::Prime(5);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in 2..=3 {
        for u in all_functions(n) {
            let f = FiberPartition::new(u);
            for _ in 0..20 {
                let x = random_invertible(field, n, &mut rng);
                let norm = normalize(&x, &f).unwrap();
                let again = normalize(&norm.matrix, &f).unwrap();
                assert_eq!(again.matrix, norm.matrix);
            }
        }
    }
}

#[test]
fn search_is_deterministic() {
    let field = FieldSpec::Prime(2);
    let a = brute_force_twisting_maps(3, 2, field).unwrap();
    let b = brute_force_twisting_maps(3, 2, field).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scalar_parsing_round_trip() {
    let q = FieldSpec::Rationals;
    for (num, den) in [(0, 1), (7, 3), (-7, 3), (22, 11)] {
        let s = q.from_ratio(num, den).unwrap();
        assert_eq!(twistlab::field::parse_rational(&s.to_string()).unwrap(), s);
    }
    assert!(twistlab::field::parse_rational("1/0").is_err());
    assert_eq!(
        FieldSpec::Prime(7).from_i64(9),
        FieldSpec::Prime(7).from_i64(2)
    );
}
