//! Closed-form bias, `tau^2` and ideal corrected values.
//!
//! Run with `cargo run --example oracles`.

use warpboot::harness::DataGenerator;
use warpboot::oracle::{
    analytic_bias, ideal_corrected_expansion, plug_in_tau_squared, tau_squared, GammaSet, MomentSet,
};
use warpboot::{BiasKind, Cube, SeedPath, Sine, SmoothFunctional};

fn main() -> warpboot::Result<()> {
    let pop = DataGenerator::exponential_mean_two().moments();
    for f in [&Cube as &dyn SmoothFunctional, &Sine] {
        let g = GammaSet::of(f, &pop)?;
        println!(
            "{}: gamma = ({:.4}, {:.4}, {:.4}), tau^2 = {:.4}",
            f.name(),
            g.g2,
            g.g3,
            g.g4,
            tau_squared(f, &pop)
        );
        for n in [20, 40, 80] {
            println!("  n={n:<3} bias {:.6}", analytic_bias(f, &pop, n)?);
        }
    }

    let ds = DataGenerator::exponential_mean_two().generate(40, 1, SeedPath::data(0))?;
    let m = MomentSet::empirical(&ds)?;
    println!(
        "sample mean {:.4}, variance {:.4}, third {:.4}",
        m.mean, m.variance, m.third
    );
    println!("plug-in tau^2 {:.4}", plug_in_tau_squared(&Cube, &ds));
    println!(
        "ideal corrected cube: single {:.4}, double {:.4}",
        ideal_corrected_expansion(&ds, &Cube, BiasKind::Single)?,
        ideal_corrected_expansion(&ds, &Cube, BiasKind::Double)?
    );
    Ok(())
}
