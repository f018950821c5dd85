//! The chained-triangle set Delta and its exact geometry.
//!
//! Delta is the union of solid triangles co{0, e_n, e_{n+1}} in sparse l1:
//! an infinite fan of 2-simplices glued along shared edges. Because any
//! two points of Delta touch at most three coordinates, the l1 distance
//! between them collapses to a three-case closed form (same triangle,
//! adjacent triangles, disjoint supports). This example cross-checks the
//! closed form against dense vector arithmetic and walks the other tools:
//! the shift isometry, the nearest-point retraction, and chains built on
//! arbitrary separated families.

use afp::delta::{
    delta_distance, distance_to_delta, nearest_point_retraction, parse_delta_point,
    shift_displacement, shift_map, ChainedTriangles, DeltaPoint,
};
use afp::rational::{format_rational, rat, rat_int};
use afp::seminorm::PolyhedralSeminorm;
use afp::vector::SparseVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Three regimes of the closed form, each verified against the
    // embedded vectors.
    let cases = [
        ("1:1/2:1/4", "1:1/4:1/2", "same triangle"),
        ("1:1/2:1/2", "2:1/2:1/2", "adjacent, shared vertex e_2"),
        ("1:1:0", "4:1:0", "disjoint supports"),
    ];
    for (p, q, note) in cases {
        let p = parse_delta_point(p)?;
        let q = parse_delta_point(q)?;
        let closed = delta_distance(&p, &q);
        let dense = (&p.embed() - &q.embed()).l1_norm();
        assert_eq!(closed, dense);
        println!("d({p}, {q}) = {:<4} ({note})", format_rational(&closed));
    }

    // The shift pushes every triangle one step to the right. It is an
    // isometry of Delta, fixes only the apex, and its displacement has
    // its own closed form: the shared vertex absorbs min(a, b).
    let p = DeltaPoint::new(3, rat(1, 3), rat(1, 6))?;
    let shifted = shift_map(&p);
    println!(
        "\nshift {p} -> {shifted}, displacement {} = a + |a-b| + b",
        format_rational(&shift_displacement(&p))
    );

    // Nearest-point retraction: mass off the fan gets projected back
    // exactly. e_1 + e_3 is distance 1 from several triangles; ties break
    // to the lowest index and the lexicographically smallest weights.
    let x = SparseVector::from_entries([(1, rat_int(1)), (3, rat_int(1))]);
    println!(
        "\nretract e_1 + e_3      -> {} at l1 distance {}",
        nearest_point_retraction(&x),
        format_rational(&distance_to_delta(&x))
    );
    let deep = SparseVector::from_entries([(5, rat(3, 2)), (6, rat(3, 2))]);
    println!(
        "retract 3/2(e_5 + e_6) -> {} at l1 distance {}",
        nearest_point_retraction(&deep),
        format_rational(&distance_to_delta(&deep))
    );

    // Any span-separated family spawns its own chain of triangles
    // co{0, x_n, x_{n+1}}, with points addressed by the same (n, a, b)
    // coordinates. On the basis family the correspondence is an isometry;
    // doubling the generators doubles every distance, and the sampled
    // distortion range reports exactly that.
    let basis_chain = ChainedTriangles::new((1..=6).map(SparseVector::basis).collect())?;
    let report = basis_chain.distortion_estimate(&PolyhedralSeminorm::L1, 300, 0)?;
    println!(
        "\nbasis chain distortion over 300 pairs: [{}, {}]",
        format_rational(&report.min_ratio),
        format_rational(&report.max_ratio)
    );
    let doubled = ChainedTriangles::new(
        (1..=6)
            .map(|n| SparseVector::basis(n).scale(&rat_int(2)))
            .collect(),
    )?;
    let report = doubled.distortion_estimate(&PolyhedralSeminorm::L1, 300, 0)?;
    println!(
        "doubled generators: every ratio equals {} = {}",
        format_rational(&report.min_ratio),
        format_rational(&report.max_ratio)
    );

    // Membership is decided exactly: the embedded image of a triangle
    // point is in the chain, a blend of two far generators is not.
    let inside = basis_chain.embed(&DeltaPoint::new(2, rat(1, 3), rat(1, 3))?)?;
    let outside = SparseVector::from_entries([(1, rat(1, 2)), (4, rat(1, 2))]);
    println!(
        "\ncontains embedded (2,1/3,1/3): {}; contains (e_1+e_4)/2: {}",
        basis_chain.contains(&inside),
        basis_chain.contains(&outside)
    );
    Ok(())
}
