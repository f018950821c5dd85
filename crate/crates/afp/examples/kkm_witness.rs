//! The combinatorial epsilon-fixed-point finder, end to end.
//!
//! The search covers the domain with a finite net of map values, builds
//! the simplex on those centers, and subdivides it edgewise. Each lattice
//! vertex gets labeled by the first carrier center that the map moves far
//! away from; a vertex that cannot be labeled is itself a witness with
//! residual below epsilon. Subdivision order doubles until either a
//! witness appears or the budget runs out, and exhaustion is an explicit
//! outcome, never a fabricated point.

use afp::domain::Domain;
use afp::kkm::{find_epsilon_fixed_point, grid_oracle_min_displacement, FinderOutcome, FinderParams};
use afp::maps::{self, PiecewiseAffineMap};
use afp::rational::{format_rational, rat};
use afp::seminorm::PolyhedralSeminorm;
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // x/2 + 1/4 pulls everything toward its fixed point 1/2, which sits
    // on the sampling grid, so order 1 already finds residual 0.
    let map = maps::builtin("toward-half")?;
    let params = FinderParams::new(rat(1, 8))?;
    match find_epsilon_fixed_point(map.as_ref(), &Domain::unit_box(1), &PolyhedralSeminorm::L1, &params)? {
        FinderOutcome::Witness(w) => println!(
            "toward-half: witness x={} residual={} (order {}, net {}, {} vertices)",
            format_rational(&w.point.get(1)),
            format_rational(&w.residual),
            w.order,
            w.net_size,
            w.lattice_vertices_scanned
        ),
        FinderOutcome::DepthExhausted { .. } => println!("toward-half: exhausted?!"),
    }

    // The quarter-turn of the unit square fixes only the center (1/2,1/2).
    // An odd grid resolution keeps that point off the net, so order 1
    // fails; at order 2 a midpoint of two diagonal centers hits the center
    // exactly.
    let map = maps::builtin("rotation90")?;
    let mut params = FinderParams::new(rat(1, 5))?;
    params.resolution = 7;
    match find_epsilon_fixed_point(map.as_ref(), &Domain::unit_box(2), &PolyhedralSeminorm::LInf, &params)? {
        FinderOutcome::Witness(w) => println!(
            "rotation90:  witness ({}, {}) residual={} at order {}",
            format_rational(&w.point.get(1)),
            format_rational(&w.point.get(2)),
            format_rational(&w.residual),
            w.order
        ),
        FinderOutcome::DepthExhausted { .. } => println!("rotation90: exhausted?!"),
    }

    // An honest failure: x/2 + 5/8 below 1/2 and x/2 above jumps across
    // its own gap, so every point moves by at least 1/4. Ask for
    // epsilon = 1/8 and the finder must come back empty-handed.
    let jump: PiecewiseAffineMap = serde_json::from_value(serde_json::json!({
        "schema": "afp-map/1",
        "name": "jump",
        "pieces": [
            {
                "guard": [{"normal": {"1": "1"}, "rhs": "1/2"}],
                "linear": [{"out": 1, "row": {"1": "1/2"}}],
                "offset": {"1": "5/8"}
            },
            {"linear": [{"out": 1, "row": {"1": "1/2"}}]}
        ]
    }))?;
    jump.validate()?;
    let jump = Arc::new(jump);
    let mut params = FinderParams::new(rat(1, 8))?;
    params.max_order = 8;
    match find_epsilon_fixed_point(jump.as_ref(), &Domain::unit_box(1), &PolyhedralSeminorm::L1, &params)? {
        FinderOutcome::Witness(w) => println!("jump: unexpected witness {w:?}"),
        FinderOutcome::DepthExhausted {
            max_order,
            net_size,
            lattice_vertices_scanned,
        } => println!(
            "jump:        no witness at epsilon=1/8 up to order {max_order} \
             (net {net_size}, {lattice_vertices_scanned} vertices scanned)"
        ),
    }

    // The grid oracle explains why: the smallest displacement any grid
    // point achieves is 1/4, already above epsilon.
    let (argmin, min) = grid_oracle_min_displacement(
        jump.as_ref(),
        &Domain::unit_box(1),
        &PolyhedralSeminorm::L1,
        16,
    )?;
    println!(
        "grid oracle: min displacement {} at x={}",
        format_rational(&min),
        format_rational(&argmin.get(1))
    );
    Ok(())
}
