//! Building delta-separated sequences in a seminormed space.
//!
//! Two notions, both checked exactly. Pairwise: every two accepted points
//! are more than delta apart under rho0. Span: each accepted point is more
//! than delta from the *linear span* of its predecessors, measured by an
//! exact simplex solve. Span separation is strictly stronger and is what
//! chained-triangle constructions need.

use afp::rational::{format_rational, rat, rat_int};
use afp::seminorm::PolyhedralSeminorm;
use afp::spaces::{
    greedy_separated_sequence, span_separated_sequence, verify_pairwise_separation,
    verify_span_separation,
};
use afp::vector::SparseVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho = PolyhedralSeminorm::L1;
    let delta = rat(9, 10);

    // Distinct basis vectors are at l1 distance 2 from each other, so the
    // greedy probe accepts every one it sees.
    let basis: Vec<SparseVector> = (1..=40).map(SparseVector::basis).collect();
    let accepted = greedy_separated_sequence(basis.clone(), &rho, &delta, 6);
    println!(
        "greedy on basis vectors: accepted {} points, pairwise check: {}",
        accepted.len(),
        verify_pairwise_separation(&accepted, &rho, &delta)
    );

    // The same stream passes the stronger span criterion: e_n keeps l1
    // distance exactly 1 from span{e_1..e_{n-1}}, and 1 > 9/10.
    let accepted = span_separated_sequence(basis, &rho, &delta, 6)?;
    println!(
        "span   on basis vectors: accepted {} points, span check: {}",
        accepted.len(),
        verify_span_separation(&accepted, &rho, &delta)?
    );

    // Pairwise separation does not imply span separation. Take collinear
    // points 0 <- 2e_1 <- 4e_1: pairwise distances are 2, but each lies in
    // the span of the previous one.
    let collinear = vec![
        SparseVector::basis(1).scale(&rat_int(2)),
        SparseVector::basis(1).scale(&rat_int(4)),
    ];
    println!(
        "\ncollinear family: pairwise {} but span {}",
        verify_pairwise_separation(&collinear, &rho, &delta),
        verify_span_separation(&collinear, &rho, &delta)?
    );
    let through_probe = span_separated_sequence(collinear, &rho, &delta, 2)?;
    println!(
        "span probe on the collinear stream accepts only {} point",
        through_probe.len()
    );

    // Mixed stream: junk gets skipped, structure survives. Scaled copies
    // land inside the span of what's already accepted and are rejected
    // without disturbing the rest of the stream.
    let mixed = vec![
        SparseVector::basis(1),
        SparseVector::basis(1).scale(&rat(11, 10)),
        SparseVector::basis(2),
        SparseVector::basis(2).scale(&rat(1, 2)),
        SparseVector::basis(3),
    ];
    let accepted = span_separated_sequence(mixed, &rho, &delta, 5)?;
    println!("\nmixed stream kept {} points:", accepted.len());
    for v in &accepted {
        let entries: Vec<String> = v
            .iter()
            .map(|(i, c)| format!("{}*e_{}", format_rational(c), i))
            .collect();
        println!("  {}", entries.join(" + "));
    }
    Ok(())
}
