use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use proptest::prelude::*;

use qsym_core::diagram::{
    catalan, enumerate_diagrams, jones_generator, represent_generators, verify_represented_jones,
    LoopParameter, TLDiagram, TLElement,
};
use qsym_core::fusion::{
    amenability_check, dimension_sequence, so3_moment_integral, so3_product, trivial_multiplicity,
    FusionVector, Ring,
};
use qsym_core::homs::{gram_matrix, numeric_rank, realized_generators, DEFAULT_RANK_TOL};
use qsym_core::linalg::max_abs_diff;
use qsym_core::tensor::{build_eta, verify_frobenius, verify_jones_relations};
use qsym_core::{
    canonical_trace_weights, orthonormal_basis, regular_rep_trace, AlgebraElement, AlgebraShape,
    StructureMaps, TensorMap,
};

fn shapes_up_to(n: usize) -> Vec<AlgebraShape> {
    AlgebraShape::enumerate_up_to(n)
}

fn shape_strategy(min: usize, max: usize) -> impl Strategy<Value = AlgebraShape> {
    let shapes: Vec<AlgebraShape> = shapes_up_to(max)
        .into_iter()
        .filter(|s| s.total_dim() >= min)
        .collect();
    proptest::sample::select(shapes)
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn shape_and_elements(count: usize) -> impl Strategy<Value = (AlgebraShape, Vec<Vec<Complex64>>)> {
    shape_strategy(1, 10).prop_flat_map(move |s| {
        let n = s.total_dim();
        (Just(s), proptest::collection::vec(complex_vec(n), count))
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    complex_vec(rows * cols).prop_map(move |v| DMatrix::from_vec(rows, cols, v))
}

/// Small Gaussian integers, so that every product is exact in floating point.
fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    proptest::collection::vec((-50i32..50, -50i32..50), rows * cols).prop_map(move |v| {
        DMatrix::from_iterator(rows, cols, v.into_iter().map(|(a, b)| Complex64::new(a as f64, b as f64)))
    })
}

fn diagram_strategy(m: usize) -> impl Strategy<Value = TLDiagram> {
    proptest::sample::select(enumerate_diagrams(m))
}

fn tl_element(m: usize) -> impl Strategy<Value = TLElement> {
    proptest::collection::vec((diagram_strategy(m), -2.0f64..2.0, -2.0f64..2.0), 1..4).prop_map(
        move |terms| {
            terms.into_iter().fold(TLElement::zero(m), |acc, (d, re, im)| {
                acc.add(&TLElement::from_diagram(d, Complex64::new(re, im)))
                    .unwrap()
            })
        },
    )
}

#[test]
fn weights_sum_to_one_and_match_regular_representation() {
    for shape in shapes_up_to(20) {
        let w = canonical_trace_weights(&shape);
        let total = w
            .as_slice()
            .iter()
            .fold(Rational64::zero(), |acc, x| acc + x);
        assert!(total.is_one(), "{shape}");
        assert_eq!(regular_rep_trace(&shape), w, "{shape}");
    }
}

#[test]
fn orthonormal_basis_gram_is_identity() {
    for shape in shapes_up_to(12) {
        let basis = orthonormal_basis(&shape);
        let n = shape.total_dim();
        assert_eq!(basis.len(), n);
        assert!(max_abs_diff(&basis.gram(), &DMatrix::identity(n, n)) < 1e-12);
    }
}

#[test]
fn frobenius_and_jones_hold_up_to_dimension_16() {
    for shape in shapes_up_to(16) {
        for r in verify_frobenius(&shape, 1e-10)
            .into_iter()
            .chain(verify_jones_relations(&shape, 1e-10))
        {
            assert!(r.pass, "{shape}: {} deviates by {:e}", r.name, r.deviation);
        }
    }
}

#[test]
fn iterated_unit_norms() {
    for shape in shapes_up_to(6) {
        let maps = StructureMaps::canonical(&shape);
        let n = shape.total_dim() as f64;
        for p in 1..=4 {
            let v = maps.iterated_unit(p).unwrap();
            let norm_sq: f64 = v.as_vector().unwrap().iter().map(|z| z.norm_sqr()).sum();
            let expected = n.powi(p as i32 - 1);
            assert!((norm_sq - expected).abs() <= 1e-8 * expected, "{shape} p={p}");
        }
    }
}

#[test]
fn jones_relations_in_diagram_algebra() {
    for &b in &[4.0, 5.0, 6.0] {
        let beta = LoopParameter::new(b).unwrap();
        for m in 2..=6 {
            let e: Vec<TLElement> = (1..m).map(|i| jones_generator(m, i, beta).unwrap()).collect();
            for (i, ei) in e.iter().enumerate() {
                let sq = ei.multiply(ei, beta).unwrap();
                assert!(sq.distance(ei).unwrap() < 1e-12);
                assert!(ei.star().distance(ei).unwrap() < 1e-12);
                for (j, ej) in e.iter().enumerate() {
                    match i.abs_diff(j) {
                        0 => {}
                        1 => {
                            let eje = ei
                                .multiply(ej, beta)
                                .and_then(|x| x.multiply(ei, beta))
                                .unwrap()
                                .scale(Complex64::new(b, 0.0));
                            assert!(eje.distance(ei).unwrap() < 1e-12, "m={m} i={i} j={j}");
                        }
                        _ => {
                            let a = ei.multiply(ej, beta).unwrap();
                            let c = ej.multiply(ei, beta).unwrap();
                            assert!(a.distance(&c).unwrap() < 1e-12);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn represented_generators_satisfy_jones_relations() {
    for shape in shapes_up_to(10).into_iter().filter(|s| s.total_dim() >= 4) {
        let n = shape.total_dim();
        for k in 1..=3 {
            if n.pow(k as u32) > 1000 {
                continue;
            }
            let images = represent_generators(&shape, k).unwrap();
            for r in verify_represented_jones(&images, n as f64, 1e-9) {
                assert!(r.pass, "{shape} k={k}: {} {:e}", r.name, r.deviation);
            }
        }
    }
}

#[test]
fn appending_unit_preserves_gram_rank() {
    for blocks in [vec![2], vec![1, 1, 1, 1], vec![2, 1], vec![1, 1, 1]] {
        let shape = AlgebraShape::new(blocks).unwrap();
        let eta = build_eta(&shape);
        let eta = eta.as_vector().unwrap();
        let n = shape.total_dim();
        for k in 1..=4 {
            let base: Vec<TensorMap> = realized_generators(&shape, k)
                .into_iter()
                .map(|v| TensorMap::from_vector(n, k, DVector::from_vec(v)).unwrap())
                .collect();
            let extended: Vec<TensorMap> = base
                .iter()
                .map(|v| {
                    let w: Vec<Complex64> = v
                        .as_vector()
                        .unwrap()
                        .iter()
                        .flat_map(|a| eta.iter().map(move |b| a * b))
                        .collect();
                    TensorMap::from_vector(n, k + 1, DVector::from_vec(w)).unwrap()
                })
                .collect();
            let r0 = numeric_rank(&gram_matrix(&base).unwrap(), DEFAULT_RANK_TOL);
            let r1 = numeric_rank(&gram_matrix(&extended).unwrap(), DEFAULT_RANK_TOL);
            assert_eq!(r0.rank, r1.rank, "{shape} k={k}");
        }
    }
}

#[test]
fn gram_matrices_are_hermitian_and_psd() {
    for blocks in [vec![2], vec![2, 1], vec![1, 1, 1, 1, 1, 1]] {
        let shape = AlgebraShape::new(blocks).unwrap();
        let n = shape.total_dim();
        for k in 1..=4 {
            let vs: Vec<TensorMap> = realized_generators(&shape, k)
                .into_iter()
                .map(|v| TensorMap::from_vector(n, k, DVector::from_vec(v)).unwrap())
                .collect();
            let g = gram_matrix(&vs).unwrap();
            let scale = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(max_abs_diff(&g, &g.adjoint()) <= 1e-12 * scale.max(1.0));
            let eig = g.symmetric_eigenvalues();
            assert!(eig.iter().all(|&x| x > -1e-9 * scale.max(1.0)), "{shape} k={k}");
        }
    }
}

#[test]
fn fusion_products_do_not_depend_on_n() {
    // The products carry no n; only the dimension function does.
    let level = 16;
    for k in 0..=8 {
        for s in 0..=8 {
            let a = so3_product(
                &FusionVector::basis(Ring::So3, k),
                &FusionVector::basis(Ring::So3, s),
                level,
            )
            .unwrap();
            for n in [4, 5, 6, 7] {
                let dims = dimension_sequence(n, level).unwrap();
                let lhs = a.dimension(&dims).unwrap();
                assert_eq!(lhs, dims.get(k).unwrap() * dims.get(s).unwrap(), "n={n} k={k} s={s}");
            }
        }
    }
}

#[test]
fn moments_and_amenability() {
    for k in 0..=15 {
        assert_eq!(trivial_multiplicity(k).unwrap(), catalan(k));
    }
    for k in 0..=10 {
        let q = so3_moment_integral(k, 100_000).unwrap();
        assert!((q - catalan(k) as f64).abs() <= 1e-5, "k={k}: {q}");
    }
    for n in 4..=12 {
        assert_eq!(amenability_check(n, 20).unwrap().amenable, n == 4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_is_tracial((shape, xs) in shape_and_elements(2)) {
        let w = canonical_trace_weights(&shape);
        let x = AlgebraElement::from_unit_coordinates(&shape, &xs[0]).unwrap();
        let y = AlgebraElement::from_unit_coordinates(&shape, &xs[1]).unwrap();
        let xy = x.multiply(&y).unwrap().trace(&w).unwrap();
        let yx = y.multiply(&x).unwrap().trace(&w).unwrap();
        prop_assert!((xy - yx).norm() < 1e-12);
    }

    #[test]
    fn inner_product_is_faithful((shape, xs) in shape_and_elements(1)) {
        let x = AlgebraElement::from_unit_coordinates(&shape, &xs[0]).unwrap();
        prop_assume!(!x.is_zero());
        let ip = x.inner_product(&x).unwrap();
        prop_assert!(ip.re > 0.0);
        prop_assert!(ip.im.abs() < 1e-12);
    }

    #[test]
    fn tensor_map_adjoint_of_compose(a in matrix(4, 2), b in matrix(2, 4)) {
        let s = TensorMap::new(2, 1, 2, a).unwrap();
        let t = TensorMap::new(2, 2, 1, b).unwrap();
        let st = s.compose(&t).unwrap();
        let rhs = t.adjoint().compose(&s.adjoint()).unwrap();
        prop_assert!(st.adjoint().deviation(&rhs).unwrap() < 1e-12);
        prop_assert_eq!(s.adjoint().adjoint(), s);
    }

    #[test]
    fn tensor_is_associative(a in int_matrix(2, 1), b in int_matrix(2, 2), c in int_matrix(1, 2)) {
        let a = TensorMap::new(2, 0, 1, a).unwrap();
        let b = TensorMap::new(2, 1, 1, b).unwrap();
        let c = TensorMap::new(2, 1, 0, c).unwrap();
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn diagram_stacking_is_associative(
        (x, y, z) in (1usize..=5).prop_flat_map(|m| (diagram_strategy(m), diagram_strategy(m), diagram_strategy(m)))
    ) {
        let (xy, l1) = x.stack(&y).unwrap();
        let (xy_z, l2) = xy.stack(&z).unwrap();
        let (yz, l3) = y.stack(&z).unwrap();
        let (x_yz, l4) = x.stack(&yz).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert_eq!(l1 + l2, l3 + l4);
    }

    #[test]
    fn star_is_an_anti_automorphism(
        (x, y) in (1usize..=5).prop_flat_map(|m| (tl_element(m), tl_element(m))),
        b in proptest::sample::select(vec![4.0, 5.0, 6.0]),
    ) {
        let beta = LoopParameter::new(b).unwrap();
        let lhs = x.multiply(&y, beta).unwrap().star();
        let rhs = y.star().multiply(&x.star(), beta).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
        prop_assert!(x.star().star().distance(&x).unwrap() < 1e-15);
    }

    #[test]
    fn tl_multiplication_is_associative(
        (x, y, z) in (1usize..=5).prop_flat_map(|m| (tl_element(m), tl_element(m), tl_element(m))),
    ) {
        let beta = LoopParameter::new(5.0).unwrap();
        let lhs = x.multiply(&y, beta).and_then(|t| t.multiply(&z, beta)).unwrap();
        let rhs = x.multiply(&y.multiply(&z, beta).unwrap(), beta).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
    }
}
