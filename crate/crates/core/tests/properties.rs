use proptest::prelude::*;
use serde_json::Value;
use sparsekit::config::parse_config;
use sparsekit::prelude::*;
use sparsekit::sparse::{coo_from_triplets, csr_from_coo};
use sparsekit_testkit as oracle;

fn json_tree() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i64>().prop_map(Value::from),
        (-1e3..1e3f64).prop_map(Value::from),
        prop::sample::select(vec![
            "solver::Gmres", "solver::Cg", "solver::Cgs", "preconditioner::Jacobi",
            "preconditioner::Ilu", "Iteration", "ResidualNorm", "rhs_norm", "x",
        ])
        .prop_map(Value::from),
    ];
    leaf.prop_recursive(4, 32, 6, |inner| {
        let keys = prop::sample::select(vec![
            "type", "krylov_dim", "preconditioner", "criteria", "max_iters",
            "reduction_factor", "baseline", "max_block_size", "other",
        ]);
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Array),
            prop::collection::btree_map(keys, inner, 0..5)
                .prop_map(|m| Value::Object(m.into_iter().map(|(k, v)| (k.to_string(), v)).collect())),
        ]
    })
}

proptest! {
    #[test]
    fn parse_config_is_total(tree in json_tree()) {
        match parse_config(&tree) {
            Ok(c) => prop_assert_eq!(parse_config(&c.to_value()).unwrap(), c),
            Err(Error::Config { .. } | Error::Unsupported(_)) => {}
            Err(other) => prop_assert!(false, "unexpected error kind {}", other.kind()),
        }
    }

    #[test]
    fn triplets_densify_like_raw_accumulation(
        (rows, cols, triplets) in (1usize..100, 1usize..100).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec((0..r, 0..c, -10.0..10.0f64), 0..500))
        })
    ) {
        let dev = Device::reference();
        let coo = coo_from_triplets::<f64, i32>(&dev, rows, cols, &triplets).unwrap();
        let mut want = oracle::zeros(rows, cols);
        // same accumulation order as the stable sort: input order per position
        for &(i, j, v) in &triplets {
            want[i][j] += v;
        }
        let got = oracle::densify(rows, cols, csr_from_coo(&coo).triplets());
        prop_assert_eq!(got, want);
    }
}
