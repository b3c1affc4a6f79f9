//! Conditioning uniform set partitions on the number of urns.

use patternlab::cond::{
    cond_exp_table, cond_expectation_exact, concentration_probe, f_function, leading_term, mean_from_conditionals, OverlapProfile,
};
use patternlab::rational::to_f64;
use patternlab::ArcPattern;

fn main() -> patternlab::Result<()> {
    let crossing: ArcPattern = "1-3,2-4".parse()?;
    let prof = OverlapProfile::new(&crossing);
    println!("pattern {crossing}: overlap profile {:?}", prof.a);

    let n = 12;
    for m in [2, 4, 8] {
        let e = cond_expectation_exact(n, m, &crossing)?;
        println!("E[Occ | M={m}] at n={n}: {e} (~{:.4})", to_f64(&e));
    }

    // F against its dominant part as n grows with m fixed
    let a = prof.nonzero();
    for n in [20, 80, 320] {
        let f = to_f64(&f_function(&a, crossing.len(), n, 5)?);
        let lead = to_f64(&leading_term(&a, crossing.len(), n, 5)?);
        println!("F at n={n}, m=5: {f:.6e}, leading term {lead:.6e}, ratio {:.5}", f / lead);
    }

    println!("\nE[Occ] at n={n} by averaging over M: {:.6}", mean_from_conditionals(n, &crossing, 1e-15)?);
    for row in cond_exp_table(n, &crossing, 1e-6)?.iter().take(10) {
        println!("  m={:<3} P={:.5} E={:.5}", row.m, row.prob, row.expectation);
    }

    for n in [100, 1000, 10000] {
        let c = concentration_probe(n, 1e-15)?;
        println!(
            "n={n}: E[M]={:.2} sd={:.2}, P(|M-E[M]| > n^(3/4)) = {:.3e}",
            c.m_n, c.sigma_n, c.p_outside
        );
    }
    Ok(())
}
