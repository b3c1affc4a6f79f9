//! Monte Carlo study of pattern counts: variance growth and normality.

use patternlab::mc::{run_mc, variance_scaling_slope};
use patternlab::wdg::FamilySpec;
use patternlab::Multiset;

fn main() -> patternlab::Result<()> {
    let reps = 4000;
    let seed = 17;
    let sizes = [32usize, 64, 128, 256];

    let words: Vec<FamilySpec> = sizes
        .iter()
        .map(|&n| Ok(FamilySpec::MPerm { m: Multiset::balanced(n, 2)?, tau: "21".parse()? }))
        .collect::<patternlab::Result<_>>()?;
    let partitions: Vec<FamilySpec> = sizes
        .iter()
        .map(|&n| Ok(FamilySpec::SetPart { n, pattern: "1-3,2-4".parse()? }))
        .collect::<patternlab::Result<_>>()?;
    let families = [("inversions, two letters", words), ("crossings in set partitions", partitions)];

    for (name, specs) in families {
        println!("{name}");
        println!("  {:>6} {:>14} {:>16} {:>8} {:>8} {:>8}", "size", "mean", "variance", "ks", "k3", "k4");
        let mut vars = Vec::new();
        for spec in &specs {
            let s = run_mc(spec, reps, seed)?.summary()?;
            println!(
                "  {:>6} {:>14.3} {:>16.3} {:>8.4} {:>8.4} {:>8.4}",
                s.size, s.mean, s.variance, s.ks, s.k3, s.k4
            );
            vars.push(s.variance);
        }
        let s: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
        println!("  log-log variance slope {:.3}\n", variance_scaling_slope(&s, &vars)?);
    }
    Ok(())
}
