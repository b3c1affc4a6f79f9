//! Weighted dependency graphs: maximum spanning trees, the `C_r` scan and the
//! variance bound `2 C_2 R T_1`.

use patternlab::moments::Family;
use patternlab::wdg::{estimate_Cr, mwst, param_report, ExplicitGraph, FamilySpec};
use patternlab::rational::to_f64;
use patternlab::{Limits, Rational};

fn main() -> patternlab::Result<()> {
    let mut g = ExplicitGraph::new(4);
    let w = |p: i64, q: i64| Rational::new(p.into(), q.into());
    g.set(0, 1, w(1, 2))?;
    g.set(1, 2, w(1, 3))?;
    g.set(0, 2, w(3, 4))?;
    g.set(2, 3, w(1, 1))?;
    println!("maximum spanning tree weight of a 4-vertex graph: {}", mwst(&g, &[0, 1, 2, 3]));

    let limits = Limits::default();
    for (family, r) in [
        (Family::MPerm("1^2,2^2,3".parse()?), 2),
        (Family::MPerm("1^2,2^2,3".parse()?), 3),
        (Family::SetPart(6), 2),
        (Family::SetPart(6), 3),
    ] {
        let rep = estimate_Cr(&family, r, &limits)?;
        println!(
            "{}: r={r}, {} bags, max ratio {:.4} at {:?}, violations {}",
            rep.family,
            rep.bags_scanned,
            to_f64(&rep.max_ratio_exact),
            rep.argmax_bag,
            rep.violations.len()
        );
    }

    for spec in [
        FamilySpec::MPerm { m: "1^2,2^2,3^2".parse()?, tau: "21".parse()? },
        FamilySpec::SetPart { n: 7, pattern: "1-3,2-4".parse()? },
    ] {
        let rep = param_report(&spec, &limits)?;
        println!(
            "\n{}: R={} T={:?} C2={}\n  Var exact {} <= bound {}: {}",
            match &spec {
                FamilySpec::MPerm { m, tau } => format!("pattern {tau} in words over {m}"),
                FamilySpec::SetPart { n, pattern } => format!("arcs {pattern} in partitions of [{n}]"),
            },
            rep.r,
            rep.t,
            rep.c2,
            rep.variance_exact,
            rep.variance_upper,
            rep.bound_holds
        );
    }
    Ok(())
}
