//! Norm equivalence on separated sequences, with exact constants.
//!
//! If a sequence satisfies rho(x_k) <= M and stays delta-separated from
//! spans, then four-term rational combinations y = sum alpha_i x_{k_i}
//! obey m * sum|alpha| <= rho(y) <= M * sum|alpha| with the explicit
//! constant m = delta^4 / (32 M^3). The coefficients c_i = (1/2^(2i+1))
//! (delta/M)^(i-1) driving that bound are computed in closed form, and
//! the inequality is then hammered with random combinations.

use afp::delta::{e1_bounds_check, E1Constants};
use afp::rational::{format_rational, rat, rat_int};
use afp::seminorm::PolyhedralSeminorm;
use afp::spaces::SeparationParams;
use afp::vector::SparseVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // At delta = M the coefficients are pure powers of two.
    let tight = E1Constants::new(&SeparationParams::new(rat_int(1), rat_int(1))?);
    print!("delta = M = 1:   c =");
    for c in &tight.coefficients {
        print!(" {}", format_rational(c));
    }
    println!("   m = {}", format_rational(&tight.lower_factor));

    // The benchmark setting delta = 9/10, M = 1.
    let params = SeparationParams::new(rat(9, 10), rat_int(1))?;
    let constants = E1Constants::new(&params);
    print!("delta = 9/10:    c =");
    for c in &constants.coefficients {
        print!(" {}", format_rational(c));
    }
    println!("   m = {}", format_rational(&constants.lower_factor));

    // Basis vectors satisfy the hypotheses under l1 with room to spare
    // (they are mutually 2 apart and unit norm). 2000 random four-term
    // combinations, exact arithmetic throughout.
    let points: Vec<SparseVector> = (1..=16).map(SparseVector::basis).collect();
    let report = e1_bounds_check(&points, &PolyhedralSeminorm::L1, &constants, 2000, 7)?;
    println!(
        "\n{} trials, {} violations",
        report.trials, report.violations
    );
    println!(
        "tightest lower margin rho(y) - m*sum|alpha| = {}",
        format_rational(&report.min_lower_slack)
    );
    println!(
        "tightest upper margin M*sum|alpha| - rho(y) = {}",
        format_rational(&report.min_upper_slack)
    );
    println!("(upper margin 0 is expected: same-sign combinations meet M exactly)");
    Ok(())
}
