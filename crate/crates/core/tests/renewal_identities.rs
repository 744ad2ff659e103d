//! Exact identities between the enumerated walk classes.

use regenwalk_core::enumerate::{enumerate_counts, first_break_convolution, CountTable, WalkClass};
use regenwalk_core::LatticeSite;

fn tables(dim: usize, cutoff: usize) -> (CountTable, CountTable, CountTable) {
    (
        enumerate_counts(dim, cutoff, WalkClass::All).unwrap(),
        enumerate_counts(dim, cutoff, WalkClass::Bridge).unwrap(),
        enumerate_counts(dim, cutoff, WalkClass::IrreducibleBridge).unwrap(),
    )
}

#[test]
fn first_break_decomposition_holds_exactly() {
    for (dim, cutoff) in [(2, 10), (3, 7)] {
        let (_, bridges, irr) = tables(dim, cutoff);
        for (v, row) in bridges.iter().filter(|(v, _)| v.first() >= 1) {
            let rhs = first_break_convolution(&irr, &bridges, v).unwrap();
            assert_eq!(rhs.as_slice(), row, "d = {dim}, v = {v:?}");
        }
    }
}

#[test]
fn classes_are_nested() {
    let (all, bridges, irr) = tables(2, 11);
    for (x, row) in bridges.iter() {
        for (n, &c) in row.iter().enumerate() {
            assert!(irr.count(x, n) <= c);
            assert!(c <= all.count(x, n));
        }
    }
    for (x, _) in irr.iter() {
        assert!(bridges.counts(x).is_some());
    }
}

#[test]
fn counts_are_invariant_under_lattice_symmetries() {
    let (all, bridges, _) = tables(3, 7);
    let permute = |x: &LatticeSite| {
        let c = x.coords();
        LatticeSite::new(&[c[1], c[2], c[0]]).unwrap()
    };
    for (x, row) in all.iter() {
        assert_eq!(all.counts(&permute(x)), Some(row));
        let negated: Vec<i64> = x.coords().iter().map(|c| -c).collect();
        assert_eq!(all.counts(&LatticeSite::new(&negated).unwrap()), Some(row));
    }
    // bridges only keep the symmetries fixing the first axis
    for (x, row) in bridges.iter() {
        let c = x.coords();
        let swapped = LatticeSite::new(&[c[0], c[2], -c[1]]).unwrap();
        assert_eq!(bridges.counts(&swapped), Some(row));
    }
}

#[test]
fn subadditivity_of_totals() {
    let totals = enumerate_counts(2, 12, WalkClass::All).unwrap().total_counts().unwrap();
    let c = &totals.counts;
    for m in 0..=12 {
        for n in 0..=12 - m {
            assert!(c[m + n] <= c[m] * c[n], "c_{} > c_{m} c_{n}", m + n);
        }
    }
}

#[test]
fn weights_dominate_in_class_order() {
    let (all, bridges, irr) = tables(2, 10);
    for n in 1..=5 {
        let x = LatticeSite::on_axis(2, n).unwrap();
        let (g, h, f) = (
            all.evaluate_weight(1.2, &x),
            bridges.evaluate_weight(1.2, &x),
            irr.evaluate_weight(1.2, &x),
        );
        assert!(f <= h && h <= g, "n = {n}: {f} {h} {g}");
    }
}
