use qcx_core::{extreme_table, parse_rational, Rational, Sign};

fn fixture(name: &str) -> Vec<Vec<Option<Rational>>> {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|line| line.split(',').skip(1).map(|c| (!c.is_empty()).then(|| parse_rational(c).unwrap())).collect())
        .collect()
}

fn check(sign: Sign, name: &str) {
    let table = extreme_table(15, sign).unwrap();
    let rows = fixture(name);
    assert_eq!(rows.len(), 14);
    for ((k, computed), expected) in table.rows().zip(&rows) {
        assert_eq!(computed, expected.as_slice(), "row k={k}");
    }
}

#[test]
fn minimal_volumes_match_fixture() {
    check(Sign::Minus, "table_minus.csv");
}

#[test]
fn maximal_volumes_match_fixture() {
    check(Sign::Plus, "table_plus.csv");
}

#[test]
fn fixture_is_lower_triangular() {
    for name in ["table_minus.csv", "table_plus.csv"] {
        for (r, row) in fixture(name).iter().enumerate() {
            let k = r + 2;
            for (c, cell) in row.iter().enumerate() {
                assert_eq!(cell.is_some(), c + 2 >= k, "{name} k={k} d={}", c + 2);
            }
        }
    }
}
