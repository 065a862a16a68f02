use proptest::prelude::*;

use qrc_harness::config::ExperimentConfig;
use qrc_harness::csvio::Table;

fn lines() -> Vec<String> {
    vec![
        "task = \"memory\"".into(),
        "preset = \"memory-r3\"".into(),
        "noise = \"low\"".into(),
        "tau = 2".into(),
        "seeds = [1, 2, 3]".into(),
        "lambda = 0.001".into(),
        "horizon = 7".into(),
    ]
}

proptest! {
    #[test]
    fn hash_ignores_key_order(order in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(), train in 1usize..500) {
        let l = lines();
        let mut a: Vec<String> = l.clone();
        let mut b: Vec<String> = order.iter().map(|&k| l[k].clone()).collect();
        // Tables must follow plain keys; their inner keys are reversed too.
        a.push(format!("[sizes]\nwashout = 5\ntrain = {train}"));
        b.push(format!("[sizes]\ntrain = {train}\nwashout = 5"));
        let ha = ExperimentConfig::from_toml_str(&a.join("\n")).unwrap().hash();
        let hb = ExperimentConfig::from_toml_str(&b.join("\n")).unwrap().hash();
        prop_assert_eq!(ha, hb);
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(any::<f64>(), 3), 0..20),
                      label in "[a-z ,\"]{0,8}") {
        let mut t = Table::new(&["x", "y", "label z"]);
        for r in &rows {
            let cells = [r[0].to_string(), r[1].to_string(), label.clone()];
            t.push(&cells);
        }
        let back = Table::parse(&t.to_string().unwrap()).unwrap();
        prop_assert_eq!(&back, &t);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..2 {
                let v = back.number(i, j).unwrap();
                prop_assert!(v == r[j] || (v.is_nan() && r[j].is_nan()));
            }
        }
    }
}
