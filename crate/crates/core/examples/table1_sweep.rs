//! Solves the joint design and both single-radio baselines on the bundled
//! eight-band, two-radio instance over a range of interference budgets.

use sensefuse_core::optimizer::{solve, SolveOptions, Variant};
use sensefuse_core::{PolicyConstraints, SensingScenario};

fn main() -> sensefuse_core::Result<()> {
    let s = SensingScenario::table1();
    let opts = SolveOptions::default();
    println!(
        "{:>5} {:>8} {:>11} {:>11} {:>9} {:>6} {:>10}",
        "eps", "variant", "throughput", "interfer.", "feasible", "newton", "kkt"
    );
    for i in 1..=12 {
        let eps = 0.5 * i as f64;
        let p = PolicyConstraints::table1(eps);
        for v in [
            Variant::Joint,
            Variant::SingleRadio(0),
            Variant::SingleRadio(1),
        ] {
            let r = solve(&s, &p, v, &opts)?;
            println!(
                "{eps:>5.1} {:>8} {:>11.3} {:>11.4} {:>9} {:>6} {:>10.2e}",
                v.to_string(),
                r.true_objective,
                r.metrics.interference,
                r.feasible,
                r.iterations,
                r.kkt_residual
            );
        }
    }
    Ok(())
}
