use symbif_core::burnside::{build_lattice, generator_product, mark_vector, table_of_marks, BurnsideElement};

#[test]
fn s6_lattice_counts_and_marks() {
    let start = std::time::Instant::now();
    let lattice = build_lattice(6).unwrap();
    eprintln!("S6 lattice built in {:?}", start.elapsed());
    assert_eq!(lattice.len(), 56);
    assert_eq!(lattice.subgroup_count(), 1455);
    let labels: std::collections::BTreeSet<&str> = lattice.classes().iter().map(|c| c.label.as_str()).collect();
    assert_eq!(labels.len(), 56, "labels must be unique: {labels:?}");

    let marks = table_of_marks(&lattice);
    for h in (0..lattice.len()).step_by(5) {
        for k in (0..lattice.len()).step_by(7) {
            let p = generator_product(h, k, &lattice).unwrap();
            let mh = mark_vector(&BurnsideElement::generator(&lattice, h), &marks);
            let mk = mark_vector(&BurnsideElement::generator(&lattice, k), &marks);
            let prod: Vec<i64> = mh.iter().zip(&mk).map(|(a, b)| a * b).collect();
            assert_eq!(mark_vector(&p, &marks), prod);
        }
    }
}
