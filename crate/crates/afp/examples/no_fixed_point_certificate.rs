//! A weak-star continuous self-map of a measure simplex with no fixed
//! point, and the machine-checked proof that none exists.
//!
//! Measures live in an atoms-plus-diffuse model: finitely many rational
//! point masses on indices 1, 2, 3, ... plus one diffuse blob that atoms
//! can never reach. The shuffle map sends the diffuse part to the atom at
//! 1 and pushes each atom j forward to the first index of the next
//! partition class. Mass keeps marching right while new mass pours in at
//! the left, so nothing can stand still.

use afp::measure::{
    no_fixed_point_certificate, orbit_displacement, Ex2Map, FiniteMeasureModel,
};
use afp::rational::{format_rational, rat_int};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = Ex2Map::dyadic();

    // From the purely diffuse start, every orbit point is a fresh Dirac
    // mass disjoint from its predecessor: total-variation displacement is
    // exactly 2, forever. The orbit never settles.
    let diffuse = FiniteMeasureModel::pure_diffuse(rat_int(1))?;
    let displacements = orbit_displacement(&map, &diffuse, 8)?;
    print!("orbit TV displacements from diffuse:");
    for (_, d) in &displacements {
        print!(" {}", format_rational(d));
    }
    println!();

    // Watch the mass march: atom 1 -> 2 -> 4 -> 8 under the dyadic
    // partition {1}, {2,3}, {4..7}, {8..15}, ...
    let mut mu = map.eval(&diffuse)?;
    for _ in 0..4 {
        let atoms: Vec<String> = mu
            .atoms()
            .iter()
            .map(|(i, m)| format!("{}@{}", format_rational(m), i))
            .collect();
        println!("  atoms: {}  diffuse: {}", atoms.join(", "), format_rational(mu.diffuse()));
        mu = map.eval(&mu)?;
    }

    // The certificate turns that picture into an exact infeasibility
    // proof for any candidate fixed point supported on {1..64} atoms plus
    // diffuse mass: the diffuse part must vanish, then the atom at 1,
    // then (walking forward classes) every remaining atom, until the
    // total cannot reach 1.
    let report = no_fixed_point_certificate(&map, 64)?;
    println!(
        "\ncertificate over supports in {{1..64}}: feasible = {}",
        report.feasible
    );
    for step in &report.steps {
        println!("  {}", serde_json::to_string(step)?);
    }
    Ok(())
}
