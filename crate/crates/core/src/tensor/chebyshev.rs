/// Chebyshev polynomial `T_k(alpha)` via `T_{k+1} = 2 alpha T_k - T_{k-1}`.
pub fn chebyshev(k: usize, alpha: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, alpha);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = 2.0 * alpha * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_k((x_1 + .. + x_n) / n)` for a sign vector `x`.
pub fn chebyshev_form_value(k: usize, x: &[f64]) -> f64 {
    if x.is_empty() {
        return chebyshev(k, 0.0);
    }
    let alpha = x.iter().sum::<f64>() / x.len() as f64;
    chebyshev(k, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(chebyshev_form_value(0, &[1.0, -1.0, 1.0]), 1.0);
        assert_eq!(chebyshev_form_value(1, &[1.0; 5]), 1.0);
        assert_eq!(chebyshev_form_value(3, &[1.0, 1.0, -1.0, -1.0]), 0.0);
    }

    #[test]
    fn agrees_with_cosine_form_and_stays_bounded() {
        for k in 0..12 {
            for step in 0..=40 {
                let alpha = -1.0 + step as f64 / 20.0;
                let v = chebyshev(k, alpha);
                assert!(v.abs() <= 1.0 + 1e-12);
                let expected = (k as f64 * alpha.acos()).cos();
                assert!((v - expected).abs() < 1e-9, "k={k} alpha={alpha}");
            }
        }
    }
}
