use embias::stats::correlation_p_value;
use embias::{parse_embedding, pearson, EmbeddingStore};
use proptest::collection::vec;
use proptest::prelude::*;

fn token() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9'_-]{0,8}"
}

fn rows(dim: usize) -> impl Strategy<Value = Vec<(String, Vec<f64>)>> {
    vec((token(), vec(-1e3f64..1e3, dim)), 1..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn glove_round_trip(dim in 1usize..8, seed_rows in rows(8)) {
        let rows: Vec<(String, Vec<f64>)> =
            seed_rows.into_iter().map(|(w, v)| (w, v[..dim].to_vec())).collect();
        let text: String = rows
            .iter()
            .map(|(w, v)| {
                let vals: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
                format!("{w} {}\n", vals.join(" "))
            })
            .collect();
        let (first, _) = parse_embedding(text.as_bytes(), Some(dim)).unwrap();
        let mut buf = Vec::new();
        first.write_glove(&mut buf).unwrap();
        let (second, _) = parse_embedding(buf.as_slice(), Some(dim)).unwrap();
        prop_assert_eq!(&first, &second);

        // every token returns the row first parsed for it
        for (w, _) in &rows {
            let (_, v) = rows.iter().find(|(w2, _)| w2 == w).unwrap();
            let expected: Vec<f64> = v.iter().map(|x| format!("{x:.6e}").parse().unwrap()).collect();
            prop_assert_eq!(second.lookup(w).unwrap().components, expected.as_slice());
        }
    }

    #[test]
    fn normalization_is_unit_and_idempotent(r in rows(6)) {
        prop_assume!(r.iter().all(|(_, v)| v.iter().any(|x| x.abs() > 1e-3)));
        let (s, _) = EmbeddingStore::from_rows(6, r).unwrap();
        let once = s.normalize_all().unwrap();
        for v in once.iter() {
            let n = v.components.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() <= 1e-6);
        }
        let twice = once.clone().normalize_all().unwrap();
        for (a, b) in once.iter().zip(twice.iter()) {
            for (x, y) in a.components.iter().zip(b.components) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn pearson_affine_invariance_and_symmetry(
        xs in vec(-100f64..100.0, 3..40),
        noise in vec(-50f64..50.0, 40),
        a in 0.01f64..100.0, b in -100f64..100.0,
        c in 0.01f64..100.0, d in -100f64..100.0,
    ) {
        let ys: Vec<f64> = xs.iter().zip(&noise).map(|(x, e)| 0.5 * x + e).collect();
        prop_assume!(xs.iter().any(|x| *x != xs[0]) && ys.iter().any(|y| *y != ys[0]));
        let base = pearson(&xs, &ys).unwrap();
        prop_assert_eq!(base.rho, pearson(&ys, &xs).unwrap().rho);
        let xt: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let yt: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
        let moved = pearson(&xt, &yt).unwrap();
        prop_assert!((moved.rho - base.rho).abs() <= 1e-12, "{} vs {}", moved.rho, base.rho);
        prop_assert!(base.rho.abs() <= 1.0 + 1e-12);
        prop_assert!((0.0..=1.0).contains(&base.p_value));
    }
}

#[test]
fn p_value_falls_as_correlation_grows() {
    for n in [3usize, 4, 7, 12, 30, 62, 150, 400] {
        let mut last = f64::INFINITY;
        for step in 0..=40 {
            let r = step as f64 / 40.0 * 0.999;
            let p = correlation_p_value(r, n).unwrap();
            assert!(p <= last, "n={n} r={r}: {p} > {last}");
            assert_eq!(p, correlation_p_value(-r, n).unwrap());
            last = p;
        }
        assert_eq!(correlation_p_value(0.0, n).unwrap(), 1.0);
    }
}
