//! Cesaro averaging of an orbit, exactly.
//!
//! For an affine map T the residual of the k-th average telescopes:
//! x_k - T(x_k) = (y_1 - y_{k+1}) / k, where y_i is the orbit. The
//! averager exploits that identity for O(1) work per step, but it also
//! cross-checks the telescoped value against the direct residual at every
//! power-of-two step, so a map that falsely claims to be affine gets
//! caught instead of silently producing garbage.

use afp::affine::{verify_affine, CesaroAverager};
use afp::domain::Domain;
use afp::maps::{self, PointMap};
use afp::rational::{format_rational, rational_to_f64};
use afp::seminorm::PolyhedralSeminorm;
use afp::vector::SparseVector;
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // T x = x/2 + 1/2 on [0,1]. The orbit from 0 is 0, 1/2, 3/4, ...; the
    // fixed point is 1, and the k-th average misses it by exactly
    // (1 - 2^-k)/k.
    let map = maps::builtin("half-step")?;
    let mut avg = CesaroAverager::new(
        map,
        Domain::unit_box(1),
        PolyhedralSeminorm::L1,
        SparseVector::zero(),
    )?;
    println!("T x = x/2 + 1/2 from 0 (telescoped: {})", avg.telescoped());
    println!("{:>4}  {:>12}  {:>12}  {:>10}", "k", "average", "residual", "~float");
    for _ in 0..12 {
        let x = avg.average();
        let r = avg.residual()?;
        println!(
            "{:>4}  {:>12}  {:>12}  {:>10.6}",
            avg.k(),
            format_rational(&x.get(1)),
            format_rational(&r),
            rational_to_f64(&r)
        );
        avg.advance()?;
    }

    // A quarter-turn of the unit square about (1/2, 1/2). No contraction
    // at all, yet the averages circle the center and land on it exactly
    // every fourth step.
    let map = maps::builtin("rotation90")?;
    let start = SparseVector::from_entries([(1, afp::rational::rat_int(1)), (2, afp::rational::rat_int(1))]);
    let mut avg = CesaroAverager::new(
        map,
        Domain::unit_box(2),
        PolyhedralSeminorm::LInf,
        start,
    )?;
    println!("\nquarter-turn of [0,1]^2 from the corner (1,1):");
    for _ in 0..8 {
        let x = avg.average();
        println!(
            "  k={:<2} average=({}, {})  residual={}",
            avg.k(),
            format_rational(&x.get(1)),
            format_rational(&x.get(2)),
            format_rational(&avg.residual()?)
        );
        avg.advance()?;
    }

    // A map that lies about being affine. The cross-check compares the
    // telescoped residual against the directly computed one and reports
    // an exact counterexample.
    struct Liar;
    impl PointMap for Liar {
        fn apply(&self, x: &SparseVector) -> SparseVector {
            SparseVector::from_entries(x.iter().map(|(i, v)| (i, v * v)))
        }
        fn name(&self) -> &str {
            "liar"
        }
        fn declared_affine(&self) -> bool {
            true
        }
    }
    let liar: Arc<dyn PointMap> = Arc::new(Liar);
    let probes: Vec<SparseVector> = Domain::unit_box(1).grid(4)?;
    match verify_affine(liar.as_ref(), &probes, 50, 0) {
        Ok(()) => println!("\nliar slipped through (should not happen)"),
        Err(e) => println!("\naffinity check caught the liar:\n  {e}"),
    }
    Ok(())
}
