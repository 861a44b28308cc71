use std::collections::HashSet;

/// Number of invertible `n×n` matrices over GF(q) up to scalar multiples,
/// using brute-force cofactor determinants.
pub fn pgl_count_oracle(n: usize, q: u64) -> usize {
    fn det(m: &[Vec<i64>], q: i64) -> i64 {
        if m.len() == 1 {
            return m[0][0].rem_euclid(q);
        }
        let mut acc = 0;
        for (j, v) in m[0].iter().enumerate() {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, x)| *x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            acc += sign * v * det(&minor, q);
        }
        acc.rem_euclid(q)
    }
    let cells = n * n;
    let mut classes = HashSet::new();
    for code in 0..(q as usize).pow(cells as u32) {
        let entries: Vec<i64> = (0..cells)
            .map(|k| ((code / (q as usize).pow(k as u32)) % q as usize) as i64)
            .collect();
        let m: Vec<Vec<i64>> = entries.chunks(n).map(|r| r.to_vec()).collect();
        if det(&m, q as i64) == 0 {
            continue;
        }
        let class: Vec<Vec<i64>> = (1..q as i64)
            .map(|l| {
                entries
                    .iter()
                    .map(|x| (x * l).rem_euclid(q as i64))
                    .collect()
            })
            .collect();
        classes.insert(class.into_iter().min().unwrap());
    }
    classes.len()
}
