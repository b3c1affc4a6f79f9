use num_bigint::BigUint;
use num_traits::One;

/// `B_0, ..., B_n` via the Bell triangle.
pub fn bell_numbers(n: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("row is nonempty").clone());
        for x in &row {
            let v = next.last().expect("next is nonempty") + x;
            next.push(v);
        }
        out.push(next[0].clone());
        row = next;
    }
    out
}

pub fn bell_number(n: usize) -> BigUint {
    bell_numbers(n).pop().expect("at least B_0")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let b: Vec<u64> = bell_numbers(12).iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(b, vec![1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597]);
        assert_eq!(bell_number(0), BigUint::one());
    }
}
