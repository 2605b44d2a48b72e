//! Finite-difference weights on arbitrary stencils.

/// Weights `w` with `f^(m)(0) ≈ Σ w[j]·f(offsets[j])` (Fornberg's recursion).
pub fn weights(offsets: &[f64], m: usize) -> Vec<f64> {
    let n = offsets.len();
    assert!(m < n, "stencil too small for derivative order {m}");
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Order of accuracy of a symmetric `(2p+1)`-point stencil for the m-th
/// derivative.
pub fn central_order(points: usize, m: usize) -> i32 {
    (2 * (points - m).div_ceil(2)) as i32
}

/// m-th derivative at `x` from a symmetric 9-point stencil with spacing
/// `step`, extrapolated once against the stencil at half the spacing.
pub fn derivative9<F: Fn(f64) -> f64>(f: &F, x: f64, m: usize, step: f64) -> f64 {
    let offsets: Vec<f64> = (-4..=4).map(|j| j as f64).collect();
    let w = weights(&offsets, m);
    let d = |s: f64| -> f64 {
        let sum: f64 = offsets.iter().zip(&w).map(|(o, wj)| wj * f(x + o * s)).sum();
        sum / s.powi(m as i32)
    };
    let p = central_order(9, m);
    let r = 2f64.powi(p);
    (r * d(0.5 * step) - d(step)) / (r - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_stencils() {
        let w = weights(&[-1.0, 0.0, 1.0], 2);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let w = weights(&[-2.0, -1.0, 0.0, 1.0, 2.0], 1);
        let want = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_of_exp() {
        for m in 2..=6 {
            let d = derivative9(&|x: f64| x.exp(), 0.0, m, 0.2);
            assert!((d - 1.0).abs() < 1e-6, "order {m}: {d}");
        }
    }

    #[test]
    fn orders() {
        assert_eq!(central_order(9, 2), 8);
        assert_eq!(central_order(9, 3), 6);
        assert_eq!(central_order(9, 6), 4);
    }
}
