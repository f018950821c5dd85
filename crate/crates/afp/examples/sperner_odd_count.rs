//! Sperner's lemma by exhaustive enumeration.
//!
//! Subdivide a simplex edgewise at order r and label every lattice vertex
//! with some vertex of its carrier (the corners it actually touches).
//! Sperner's lemma says the number of fully-labeled cells is odd, in
//! particular nonzero; that parity is the combinatorial engine behind the
//! fixed-point finder. Here the labelings are random but admissible, and
//! the count comes from enumerating all r^(n-1) cells.

use afp::kkm::{sperner_fully_labeled, BarycentricPoint, SpernerCount};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for centers in 2..=4usize {
        for order in [2u64, 3, 5] {
            // Each vertex must keep one label across all cells that share
            // it, so labels are memoized per vertex, not re-rolled.
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mut memo: HashMap<Vec<u64>, usize> = HashMap::new();
            let mut label = |composition: &[u64]| -> usize {
                *memo.entry(composition.to_vec()).or_insert_with(|| {
                    let carrier = BarycentricPoint::from_composition(composition, order).carrier();
                    carrier[rng.gen_range(0..carrier.len())]
                })
            };
            let SpernerCount {
                cells,
                fully_labeled,
            } = sperner_fully_labeled(centers, order, &mut label)?;
            assert!(fully_labeled % 2 == 1, "Sperner parity violated");
            println!(
                "{} corners, order {}: {:>3} cells, {} fully labeled (odd)",
                centers, order, cells, fully_labeled
            );
        }
    }

    // The parity argument needs admissibility. A labeling that ignores
    // carriers is rejected up front rather than miscounted.
    let mut constant = |_: &[u64]| 1usize;
    match sperner_fully_labeled(3, 2, &mut constant) {
        Err(e) => println!("\nconstant labeling rejected: {e}"),
        Ok(_) => println!("\nconstant labeling slipped through (should not happen)"),
    }
    Ok(())
}
