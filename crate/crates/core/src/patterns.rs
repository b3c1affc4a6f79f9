//! Counting and locating pattern occurrences.
//!
//! Word patterns: occurrences need pairwise distinct letters in the relative
//! order of `tau`. Arc patterns: every pattern arc `(i, j)` must land on an arc
//! `(x_i, x_j)` of the partition; positions not touched by arcs are free.

use std::ops::{AddAssign, Mul};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::combi::{binomial, binomial_u128, ArcPattern, PermPattern, SetPartition, Word};

pub fn count_perm_pattern(w: &Word, tau: &PermPattern) -> BigUint {
    count_perm_generic::<BigUint>(w.letters(), tau.values())
}

/// Same count in machine integers, for hot loops.
pub fn count_perm_pattern_u128(letters: &[u32], tau: &PermPattern) -> u128 {
    count_perm_generic::<u128>(letters, tau.values())
}

trait Counter: Clone + Zero + One + AddAssign + Mul<Output = Self> {
    fn binom(n: u64, k: u64) -> Self;
}

impl Counter for u128 {
    fn binom(n: u64, k: u64) -> Self {
        binomial_u128(n, k)
    }
}

impl Counter for BigUint {
    fn binom(n: u64, k: u64) -> Self {
        binomial(n, k)
    }
}

fn count_perm_generic<C: Counter>(letters: &[u32], tau: &[usize]) -> C {
    let n = letters.len();
    let l = tau.len();
    if l > n {
        return C::zero();
    }
    let mut values: Vec<u32> = letters.to_vec();
    values.sort_unstable();
    values.dedup();
    let k = values.len();
    if l > k {
        return C::zero();
    }
    // Work of the letter-tuple scan against the position scan.
    let tuple_cost = binomial_u128(k as u64, l as u64).saturating_mul(n as u128);
    let subset_cost = binomial_u128(n as u64, l as u64);
    if tuple_cost <= subset_cost {
        count_by_letter_tuples(letters, tau, &values)
    } else {
        let mut chosen = Vec::with_capacity(l);
        count_positions(letters, tau, 0, &mut chosen)
    }
}

/// For each increasing choice of `l` letters, count subsequences spelling the
/// word those letters form under `tau`.
fn count_by_letter_tuples<C: Counter>(letters: &[u32], tau: &[usize], values: &[u32]) -> C {
    let l = tau.len();
    let k = values.len();
    let rank: std::collections::HashMap<u32, usize> = values.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let ranked: Vec<usize> = letters.iter().map(|v| rank[v]).collect();
    let inv: Vec<usize> = {
        let mut inv = vec![0; l];
        for (p, &v) in tau.iter().enumerate() {
            inv[v - 1] = p;
        }
        inv
    };
    let mut total = C::zero();
    let mut slot_of = vec![usize::MAX; k];
    let mut combo: Vec<usize> = (0..l).collect();
    let mut dp: Vec<C> = vec![C::zero(); l + 1];
    loop {
        // Letter combo[v] sits at pattern position inv[v].
        for (v, &letter) in combo.iter().enumerate() {
            slot_of[letter] = inv[v];
        }
        dp.iter_mut().for_each(|d| *d = C::zero());
        dp[0] = C::one();
        for &r in &ranked {
            let p = slot_of[r];
            if p != usize::MAX {
                let add = dp[p].clone();
                dp[p + 1] += add;
            }
        }
        total += dp[l].clone();
        for &letter in &combo {
            slot_of[letter] = usize::MAX;
        }
        if !next_combination(&mut combo, k) {
            break;
        }
    }
    total
}

pub(crate) fn next_combination(c: &mut [usize], k: usize) -> bool {
    let l = c.len();
    let Some(i) = (0..l).rev().find(|&i| c[i] < k - l + i) else {
        return false;
    };
    c[i] += 1;
    for t in i + 1..l {
        c[t] = c[t - 1] + 1;
    }
    true
}

fn fits(letters: &[u32], tau: &[usize], chosen: &[usize], pos: usize) -> bool {
    let p = chosen.len();
    let c = letters[pos];
    chosen.iter().enumerate().all(|(q, &iq)| {
        let d = letters[iq];
        d != c && ((tau[q] < tau[p]) == (d < c))
    })
}

fn count_positions<C: Counter>(letters: &[u32], tau: &[usize], from: usize, chosen: &mut Vec<usize>) -> C {
    let n = letters.len();
    let l = tau.len();
    let p = chosen.len();
    let mut total = C::zero();
    for pos in from..=n - (l - p) {
        if !fits(letters, tau, chosen, pos) {
            continue;
        }
        if p + 1 == l {
            total += C::one();
        } else {
            chosen.push(pos);
            total += count_positions(letters, tau, pos + 1, chosen);
            chosen.pop();
        }
    }
    total
}

/// Occurrence position tuples (1-based), lexicographically sorted.
pub fn occurrences_perm_pattern(w: &Word, tau: &PermPattern) -> Vec<Vec<usize>> {
    fn go(letters: &[u32], tau: &[usize], from: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let (n, l, p) = (letters.len(), tau.len(), chosen.len());
        if p == l {
            out.push(chosen.iter().map(|i| i + 1).collect());
            return;
        }
        for pos in from..=n - (l - p) {
            if fits(letters, tau, chosen, pos) {
                chosen.push(pos);
                go(letters, tau, pos + 1, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut out = Vec::new();
    if tau.len() <= w.len() {
        go(w.letters(), tau.values(), 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Precomputed shape of an arc pattern for the arc-driven search.
struct ArcShape {
    l: usize,
    /// Pattern points touched by some arc, ascending.
    covered: Vec<usize>,
    /// `pred[p]`: start of the pattern arc ending at `p`, or 0.
    pred: Vec<usize>,
    /// `succ[p]`: end of the pattern arc starting at `p`, or 0.
    succ: Vec<usize>,
    /// Number of free points before `covered[t]` (index `s` = after the last).
    free_before: Vec<usize>,
}

impl ArcShape {
    fn new(pat: &ArcPattern) -> Self {
        let l = pat.len();
        let mut pred = vec![0; l + 1];
        let mut succ = vec![0; l + 1];
        for &(i, j) in pat.arcs() {
            pred[j] = i;
            succ[i] = j;
        }
        let covered: Vec<usize> = (1..=l).filter(|&p| pred[p] != 0 || succ[p] != 0).collect();
        let mut free_before = Vec::with_capacity(covered.len() + 1);
        let mut prev = 0;
        for &c in &covered {
            free_before.push(c - prev - 1);
            prev = c;
        }
        free_before.push(l - prev);
        ArcShape {
            l,
            covered,
            pred,
            succ,
            free_before,
        }
    }
}

/// `next[x]` is the end of the arc of the partition starting at `x`, or 0.
fn next_table(n: usize, arcs: &[(u32, u32)]) -> Vec<u32> {
    let mut next = vec![0u32; n + 2];
    for &(i, j) in arcs {
        next[i as usize] = j;
    }
    next
}

/// Walks all placements of the covered pattern points; `emit` gets the images.
fn search_covered(shape: &ArcShape, n: usize, next: &[u32], t: usize, x: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    let s = shape.covered.len();
    if t == s {
        emit(x);
        return;
    }
    let c = shape.covered[t];
    let prev_x = if t == 0 { 0 } else { x[t - 1] };
    let lo = prev_x + shape.free_before[t] + 1;
    // Keep room for the pattern points after c.
    let hi_room = n - (shape.l - c);
    if shape.pred[c] != 0 {
        let ti = shape.covered.binary_search(&shape.pred[c]).expect("arc start is covered");
        let xc = next[x[ti]] as usize;
        if xc >= lo && xc <= hi_room {
            x.push(xc);
            search_covered(shape, n, next, t + 1, x, emit);
            x.pop();
        }
        return;
    }
    // Images of arc ends already fixed by earlier starts bound this point from above.
    let mut hi = hi_room;
    for (tp, &cp) in shape.covered[..t].iter().enumerate() {
        let j = shape.succ[cp];
        if j > c {
            let xj = next[x[tp]] as usize;
            if xj == 0 {
                return;
            }
            hi = hi.min(xj.saturating_sub(j - c));
        }
    }
    for xc in lo..=hi.min(n) {
        if shape.succ[c] != 0 && next[xc] == 0 {
            continue;
        }
        x.push(xc);
        search_covered(shape, n, next, t + 1, x, emit);
        x.pop();
    }
}

fn count_arc_generic<C: Counter>(n: usize, arcs: &[(u32, u32)], pat: &ArcPattern) -> C {
    if pat.len() > n {
        return C::zero();
    }
    let shape = ArcShape::new(pat);
    let next = next_table(n, arcs);
    let mut total = C::zero();
    let mut emit = |x: &[usize]| {
        let mut prod = C::one();
        let mut prev = 0;
        for (t, &xt) in x.iter().enumerate() {
            prod = prod * C::binom((xt - prev - 1) as u64, shape.free_before[t] as u64);
            prev = xt;
        }
        prod = prod * C::binom((n - prev) as u64, shape.free_before[x.len()] as u64);
        total += prod;
    };
    search_covered(&shape, n, &next, 0, &mut Vec::with_capacity(shape.covered.len()), &mut emit);
    total
}

fn arcs_u32(p: &SetPartition) -> Vec<(u32, u32)> {
    p.arcs().into_iter().map(|(i, j)| (i as u32, j as u32)).collect()
}

pub fn count_arc_pattern(p: &SetPartition, pat: &ArcPattern) -> BigUint {
    count_arc_generic::<BigUint>(p.n(), &arcs_u32(p), pat)
}

/// Count from a raw arc list on `[n]`, in machine integers.
pub fn count_arc_pattern_u128(n: usize, arcs: &[(u32, u32)], pat: &ArcPattern) -> u128 {
    count_arc_generic::<u128>(n, arcs, pat)
}

/// Occurrence position tuples (1-based), lexicographically sorted.
pub fn occurrences_arc_pattern(p: &SetPartition, pat: &ArcPattern) -> Vec<Vec<usize>> {
    let n = p.n();
    if pat.len() > n {
        return Vec::new();
    }
    let shape = ArcShape::new(pat);
    let next = next_table(n, &arcs_u32(p));
    let mut out = Vec::new();
    let mut emit = |x: &[usize]| {
        // Fill each gap with every subset of the right size.
        let mut fills: Vec<Vec<usize>> = vec![Vec::new()];
        let mut prev = 0;
        for t in 0..=x.len() {
            let upper = if t < x.len() { x[t] } else { n + 1 };
            let need = shape.free_before[t];
            let gap: Vec<usize> = (prev + 1..upper).collect();
            let mut grown = Vec::new();
            for f in &fills {
                for sub in subsets(&gap, need) {
                    let mut g = f.clone();
                    g.extend(sub);
                    if t < x.len() {
                        g.push(x[t]);
                    }
                    grown.push(g);
                }
            }
            fills = grown;
            prev = upper;
        }
        out.extend(fills);
    };
    search_covered(&shape, n, &next, 0, &mut Vec::new(), &mut emit);
    out.sort();
    out
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k > items.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.iter().map(|&i| items[i]).collect());
        if k == 0 || !next_combination(&mut c, items.len()) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }
    fn t(s: &str) -> PermPattern {
        s.parse().unwrap()
    }
    fn sp(s: &str) -> SetPartition {
        s.parse().unwrap()
    }
    fn ap(s: &str) -> ArcPattern {
        s.parse().unwrap()
    }

    #[test]
    fn perm_examples() {
        assert_eq!(count_perm_pattern(&w("23112"), &t("21")), BigUint::from(5u8));
        assert_eq!(count_perm_pattern(&w("11111"), &t("21")), BigUint::zero());
        assert_eq!(count_perm_pattern(&w("123"), &t("12")), BigUint::from(3u8));
        assert_eq!(count_perm_pattern(&w("12"), &t("123")), BigUint::zero());
        assert_eq!(
            occurrences_perm_pattern(&w("23112"), &t("21")),
            vec![vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![2, 5]]
        );
        assert!(occurrences_perm_pattern(&w("12"), &t("21")).is_empty());
        assert_eq!(occurrences_perm_pattern(&w("231"), &t("231")), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn both_perm_strategies_agree() {
        let letters: Vec<u32> = vec![3, 1, 4, 1, 5, 2, 6, 5, 3, 5, 8, 9, 7, 9];
        for tau in ["21", "132", "2413", "3142", "12345"] {
            let tau = t(tau);
            let mut chosen = Vec::new();
            let by_pos: u128 = count_positions(&letters, tau.values(), 0, &mut chosen);
            let mut values = letters.clone();
            values.sort_unstable();
            values.dedup();
            let by_tuple: u128 = count_by_letter_tuples(&letters, tau.values(), &values);
            assert_eq!(by_pos, by_tuple, "{tau}");
        }
    }

    #[test]
    fn arc_examples() {
        let p = sp("{1,3,4}{2,5}");
        assert_eq!(count_arc_pattern(&p, &ap("1-3,2-4")), BigUint::one());
        assert_eq!(count_arc_pattern(&sp("{1}{2}{3}"), &ap("1-2")), BigUint::zero());
        assert_eq!(count_arc_pattern(&p, &ap("1-2")), BigUint::from(3u8));
        assert_eq!(occurrences_arc_pattern(&p, &ap("1-3,2-4")), vec![vec![1, 2, 3, 5]]);
        assert_eq!(occurrences_arc_pattern(&sp("{1,2}"), &ap("1-2")), vec![vec![1, 2]]);
        assert_eq!(
            occurrences_arc_pattern(&p, &ap(":1")),
            (1..=5).map(|i| vec![i]).collect::<Vec<_>>()
        );
        assert_eq!(count_arc_pattern(&p, &ap(":3")), BigUint::from(10u8));
        assert_eq!(count_arc_pattern(&p, &ap("1-2:6")), BigUint::zero());
    }
}
