use tangle_kh::homology::homology_table;
use tangle_kh::{parse_gauss_code, parse_pd_code, serialize_pd_code, FieldChoice, TangleDiagram};

fn diagram(text: &str) -> TangleDiagram {
    parse_pd_code(text).expect("fixture parses").diagram
}

// the two sides of a third Reidemeister move on a three-strand tangle
const R3_LEFT: &str = r#"{"pd":[["|c1","|a1","c2","a2"],["b2","a3|","b3|","a2"],["c2","|b1","c3|","b2"]],"signs":"+-+"}"#;
const R3_RIGHT: &str = r#"{"pd":[["|b1","a2","b2","|a1"],["c2","a2","c3|","a3|"],["|c1","b2","c2","b3|"]],"signs":"-++"}"#;

#[test]
fn third_move_preserves_homology() {
    let (left, right) = (diagram(R3_LEFT), diagram(R3_RIGHT));
    assert_eq!(left.boundary_labels().len(), 6);
    assert_eq!(right.boundary_labels().len(), 6);
    for field in [FieldChoice::Rational, FieldChoice::Prime(2), FieldChoice::Prime(3)] {
        let a = homology_table(&left, field).unwrap();
        let b = homology_table(&right, field).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{field:?}");
    }
}

#[test]
fn serialized_fixtures_reparse_identically() {
    for text in [R3_LEFT, R3_RIGHT, r#"[["2","5","3","6"],["4","|1","5","2"],["6","3","7|","4"]]"#] {
        let d = diagram(text);
        let again = diagram(&serialize_pd_code(&d));
        assert_eq!(again, d);
    }
}

#[test]
fn gauss_fixture() {
    let g = parse_gauss_code(
        "[[+1,-2,-3,+4,-5,+6,-7,+8,-4,+9],[+10,-11,+7,-12,+13,-8,+3],[-9,+5,-13,+12,-6],[-1,+2,+11,-10]] (o,o,o,c)",
    )
    .unwrap();
    assert_eq!(g.components.len(), 4);
    assert_eq!(g.crossing_count(), 13);
    assert!(parse_gauss_code("[[+1,+1]] (c)").is_err());
}
