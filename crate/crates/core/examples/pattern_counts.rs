//! Counting permutation patterns in words and arc patterns in set partitions.
//!
//! Run with `cargo run --example pattern_counts`.

use patternlab::patterns::{count_arc_pattern, count_perm_pattern, occurrences_arc_pattern, occurrences_perm_pattern};
use patternlab::{ArcPattern, PermPattern, SetPartition, Word};

fn main() -> patternlab::Result<()> {
    let w: Word = "23112".parse()?;
    let inv: PermPattern = "21".parse()?;
    println!("inversions of {w}: {}", count_perm_pattern(&w, &inv));
    for occ in occurrences_perm_pattern(&w, &inv) {
        println!("  positions {occ:?}");
    }

    let w: Word = "3142312".parse()?;
    for tau in ["12", "231", "312", "1324"] {
        let tau: PermPattern = tau.parse()?;
        println!("{tau} occurs {} times in {w}", count_perm_pattern(&w, &tau));
    }

    let p: SetPartition = "{1,4,6}{2,5}{3}".parse()?;
    println!("\n{p} has arcs {:?}", p.arcs());
    for pat in ["1-2", "1-3,2-4", "1-4,2-3", "1-2,2-3"] {
        let pat: ArcPattern = pat.parse()?;
        println!(
            "  {pat}: {} occurrences {:?}",
            count_arc_pattern(&p, &pat),
            occurrences_arc_pattern(&p, &pat)
        );
    }
    Ok(())
}
