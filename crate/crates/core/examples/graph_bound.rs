//! Counting two-point stabilizing operators of graph states and the resulting
//! bound on how well they separate two graph-state classes.
//!
//! Run with `cargo run --release --example graph_bound`.

use entdisc::graph::{count_two_point, count_two_point_brute_force, two_point_bound, GraphSpec};

fn main() -> entdisc::Result<()> {
    let graphs = [
        ("star-3", GraphSpec::star(3)?),
        ("star-4", GraphSpec::star(4)?),
        ("path-4", GraphSpec::path(4)?),
        ("path-5", GraphSpec::path(5)?),
        ("star-5", GraphSpec::star(5)?),
    ];
    for (name, g) in &graphs {
        let (count, ops) = count_two_point(g)?;
        let (brute, _) = count_two_point_brute_force(g)?;
        let words: Vec<String> = ops.iter().map(|p| p.to_string()).collect();
        println!("{name:>7}: {count} two-point operators (enumeration {brute}) {}", words.join(" "));
    }
    let bound = two_point_bound(&graphs[1].1, &graphs[2].1)?;
    println!("\nstar-4 against path-4 orbit, two-point family: bound {bound:.4}");
    Ok(())
}
