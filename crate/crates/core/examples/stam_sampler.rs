//! Uniform set partitions from the urn construction, and uniform words.
//!
//! The number of urns `M` follows `P(M=m) = m^n / (e m! B_n)`; balls are then
//! thrown independently and empty urns discarded.

use std::collections::BTreeMap;

use patternlab::samplers::{murn_law, rng_from_seed, sample_multiset_perm, sample_stam_with};
use patternlab::Multiset;

fn main() -> patternlab::Result<()> {
    let n = 4;
    let law = murn_law(n, 1e-15)?;
    println!("urn law for n={n}: mean {:.4}, sd {:.4}, B_n = {}", law.mean(), law.sd(), law.bell_n());
    for (m, p) in law.support().take(8) {
        println!("  P(M={m}) = {p:.6}");
    }

    let draws = 150_000;
    let mut rng = rng_from_seed(2024);
    let mut freq: BTreeMap<String, usize> = BTreeMap::new();
    let mut empty = 0usize;
    for _ in 0..draws {
        let d = sample_stam_with(n, &law, &mut rng)?;
        *freq.entry(d.partition.to_string()).or_default() += 1;
        empty += d.empty_urns;
    }
    println!("\n{} distinct partitions of [{n}] (B_4 = 15), expected share {:.4}", freq.len(), 1.0 / 15.0);
    for (p, c) in &freq {
        println!("  {p:<16} {:.4}", *c as f64 / draws as f64);
    }
    println!("mean number of empty urns {:.4} (the limit is 1)", empty as f64 / draws as f64);

    let m: Multiset = "1^3,2^2,3".parse()?;
    println!("\nwords over {m}:");
    for seed in 0..5 {
        println!("  seed {seed}: {}", sample_multiset_perm(&m, seed));
    }
    Ok(())
}
