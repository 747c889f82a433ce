use proptest::prelude::*;

use unitri::io::{read_csv, render, Format, Table};
use unitri::models::{ModelKind, Sampler};
use unitri::montecarlo::{run_batch_with, BatchOptions, Execution};
use unitri::rng::substream;
use unitri::triangle::{
    c_pair, heron_area, isosceles_sides, mr_transform, quartic_residual, triangle_from_vertices, vertex_area,
    ScaleMatrix, FOURTH_ROOT_3,
};

fn opts(sigma: f64, execution: Execution) -> BatchOptions {
    BatchOptions {
        sampler: Sampler::new(sigma).unwrap(),
        execution,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lognormal_models_have_unit_area(seed in any::<u64>(), sigma in 0.1f64..1.5) {
        for model in [ModelKind::Right, ModelKind::Isosceles, ModelKind::Arbitrary] {
            let b = run_batch_with(model, seed, 2_000, &opts(sigma, Execution::Sequential)).unwrap();
            for row in b.rows() {
                let t = unitri::Triangle::new(row[0], row[1], row[2]);
                let area = heron_area(&t).unwrap();
                prop_assert!((area - 1.0).abs() <= 1e-9, "{model} {row:?} area {area}");
            }
        }
    }

    #[test]
    fn right_model_sides_multiply_to_two(seed in any::<u64>(), sigma in 0.1f64..3.0) {
        let b = run_batch_with(ModelKind::Right, seed, 1_000, &opts(sigma, Execution::Sequential)).unwrap();
        for row in b.rows() {
            prop_assert!((row[0] * row[1] - 2.0).abs() <= 1e-12 * 2.0, "{row:?}");
            prop_assert!(row[3] > 0.0 && row[3] < std::f64::consts::FRAC_PI_2);
        }
    }

    #[test]
    fn isosceles_base_tracks_scale(seed in any::<u64>()) {
        let b = run_batch_with(ModelKind::Isosceles, seed, 1_000, &opts(1.0, Execution::Sequential)).unwrap();
        let offset = (2.0 / FOURTH_ROOT_3).ln();
        for row in b.rows() {
            prop_assert_eq!(row[0], row[1]);
            prop_assert!((row[2].ln() - row[3].ln() - offset).abs() <= 1e-12, "{row:?}");
        }
    }

    #[test]
    fn arbitrary_pairs_clear_the_hyperbola(seed in any::<u64>()) {
        let b = run_batch_with(ModelKind::Arbitrary, seed, 1_000, &opts(1.0, Execution::Sequential)).unwrap();
        for row in b.rows() {
            prop_assert!(row[0] * row[1] >= 2.0 * (1.0 - 1e-15), "{row:?}");
            prop_assert!(row[3] == 1.0 || row[3] == -1.0);
        }
    }

    #[test]
    fn execution_does_not_change_output(seed in any::<u64>(), n in 1usize..20_000, workers in 2usize..6) {
        for model in ModelKind::ALL {
            let seq = run_batch_with(model, seed, n, &opts(1.0, Execution::Sequential)).unwrap();
            let par = run_batch_with(model, seed, n, &opts(1.0, Execution::Parallel { workers })).unwrap();
            prop_assert_eq!(&seq.values, &par.values);
            prop_assert_eq!(seq.accepted, par.accepted);
        }
    }

    #[test]
    fn csv_round_trip_is_lossless(seed in any::<u64>(), n in 1usize..300, idx in 0usize..5) {
        let model = ModelKind::ALL[idx];
        let b = run_batch_with(model, seed, n, &opts(1.0, Execution::Sequential)).unwrap();
        let table = Table::from(&b);
        let back = read_csv(&render(&table, Format::Csv).unwrap()[..]).unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn arbitrary_doubles_round_trip(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..64)) {
        let mut t = Table::new(["x"]);
        for x in &xs {
            t.push_row(&[*x]);
        }
        let back = read_csv(&render(&t, Format::Csv).unwrap()[..]).unwrap();
        prop_assert_eq!(back.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                        t.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn both_branches_lie_on_the_surface(a in 0.05f64..20.0, t in 0.0f64..1.0) {
        // b from the hyperbola outwards
        let b = 2.0 / a * (1.0 + 4.0 * t);
        let (lo, hi) = c_pair(a, b).unwrap();
        prop_assert!(lo <= hi);
        let scale = (a + b + hi).powi(4);
        prop_assert!(quartic_residual(a, b, lo).abs() <= 1e-12 * scale);
        prop_assert!(quartic_residual(a, b, hi).abs() <= 1e-12 * scale);
    }

    #[test]
    fn below_the_hyperbola_has_no_unit_triangle(a in 0.05f64..20.0, t in 0.01f64..0.99) {
        let b = 2.0 / a * t;
        prop_assert!(c_pair(a, b).is_err());
    }

    #[test]
    fn scale_matrices_preserve_area(r in 0.01f64..100.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let m = ScaleMatrix::new(r).unwrap();
        prop_assert!((m.determinant() - 1.0).abs() < 1e-12);
        let p = [(0.0, 0.0), (1.0, 0.0), (x, y)];
        let q = [mr_transform(&m, p[0]), mr_transform(&m, p[1]), mr_transform(&m, p[2])];
        let (ap, aq) = (vertex_area(&p), vertex_area(&q));
        prop_assert!((ap - aq).abs() <= 1e-12 * (1.0 + ap.abs()) * (r + 1.0 / r));
    }

    #[test]
    fn isosceles_sides_match_mapped_seed(r in 0.05f64..20.0) {
        let seed = unitri::triangle::equilateral_seed();
        let m = ScaleMatrix::new(r).unwrap();
        let img = [mr_transform(&m, seed[0]), mr_transform(&m, seed[1]), mr_transform(&m, seed[2])];
        let from_vertices = triangle_from_vertices(&img);
        let mut got = [from_vertices.a, from_vertices.b, from_vertices.c];
        got.sort_by(f64::total_cmp);
        let t = isosceles_sides(r);
        let mut want = [t.a, t.b, t.c];
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-12 * w, "{got:?} {want:?}");
        }
    }

    #[test]
    fn substreams_are_deterministic(seed in any::<u64>(), index in any::<u64>()) {
        use rand::RngCore;
        let mut a = substream(seed, index);
        let mut b = substream(seed, index);
        for _ in 0..8 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
