//! Drawing outer and inner resamples from counter-based streams.
//!
//! Run with `cargo run --example resampling`.

use warpboot::resample::{draw_inner, draw_outer, resample_mean};
use warpboot::{Dataset, DependenceModel, SeedPath};

fn main() -> warpboot::Result<()> {
    let rows = vec![
        vec![1.0, 10.0],
        vec![2.0, 14.0],
        vec![4.0, 9.0],
        vec![7.0, 21.0],
        vec![3.0, 12.0],
    ];
    let ds = Dataset::from_rows(&rows)?;
    let seed = 42;

    // every resample is addressed by (trial, b, c), not by draw order
    for b in 0..3 {
        let outer = draw_outer(&ds, seed, SeedPath::outer(0, b));
        let inner = draw_inner(&outer, seed, SeedPath::inner(0, b, 0));
        println!(
            "b={b} outer mean {:?} inner mean {:?}",
            resample_mean(&ds, &outer),
            resample_mean(&ds, &inner)
        );
    }
    let again = draw_outer(&ds, seed, SeedPath::outer(0, 1));
    println!("b=1 redrawn: {:?}", resample_mean(&ds, &again));

    // columns of different lengths, resampled independently
    let ci = Dataset::new(
        DependenceModel::ComponentwiseIndependent,
        vec![vec![1.0, 2.0, 3.0], vec![5.0, 6.0, 7.0, 8.0, 9.0]],
    )?;
    let rs = draw_outer(&ci, seed, SeedPath::outer(0, 0));
    println!(
        "componentwise: n_eff {} mean {:?}",
        ci.n_eff(),
        resample_mean(&ci, &rs)
    );
    Ok(())
}
