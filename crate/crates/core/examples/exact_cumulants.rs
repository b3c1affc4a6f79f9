//! Exact joint moments and cumulants of occurrence indicators.

use patternlab::moments::{
    joint_cumulant, joint_moment_mperm_closed, total_cumulance_check, ArcIndicator, MPermClosedForm, MPermIndicator,
    PartitionEnumeration,
};
use patternlab::{Limits, Multiset};

fn show<T: std::fmt::Display>(bag: &[T]) -> String {
    bag.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn main() -> patternlab::Result<()> {
    let limits = Limits::default();
    let m: Multiset = "1^2,2^2,3^2".parse()?;
    let oracle = MPermClosedForm::new(m.clone());

    // X_{i}^{j}: position i carries letter j
    let bags: Vec<Vec<MPermIndicator>> = vec![
        vec![MPermIndicator::new(1, 1)],
        vec![MPermIndicator::new(1, 1), MPermIndicator::new(2, 1)],
        vec![MPermIndicator::new(1, 1), MPermIndicator::new(2, 2), MPermIndicator::new(3, 3)],
        vec![MPermIndicator::new(1, 1), MPermIndicator::new(2, 1), MPermIndicator::new(3, 2), MPermIndicator::new(4, 2)],
    ];
    println!("multiset {m}");
    for bag in &bags {
        println!(
            "  bag {}\n    moment {}  cumulant {}",
            show(bag),
            joint_moment_mperm_closed(&m, bag)?,
            joint_cumulant(&oracle, bag, &limits)?
        );
    }

    let n = 6;
    let parts = PartitionEnumeration::new(n, &limits)?;
    println!("\nuniform set partitions of [{n}]");
    let arc = |i, j| ArcIndicator::new(i, j);
    for bag in [vec![arc(1, 2)?], vec![arc(1, 2)?, arc(3, 4)?], vec![arc(1, 3)?, arc(2, 4)?, arc(5, 6)?]] {
        println!("  cumulant of {}: {}", show(&bag), joint_cumulant(&parts, &bag, &limits)?);
    }

    let rep = total_cumulance_check(5, &[arc(1, 3)?, arc(2, 4)?], 1e-15, &limits)?;
    println!(
        "\nlaw of total cumulance at n=5: exact {} vs conditional expansion {:.15} (discrepancy {:.2e})",
        rep.lhs, rep.rhs, rep.discrepancy
    );
    Ok(())
}
