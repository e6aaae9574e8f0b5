//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (orders 3, 5, 7, 9, 13), following Higham's 2005 algorithm.

use nalgebra::DMatrix;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(a)` for a square matrix.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let id = DMatrix::<f64>::identity(n, n);
    let norm = norm1(a);

    for &(m, theta) in &THETA {
        if norm <= theta {
            let (u, v) = match m {
                3 => odd_even(a, &id, &B3),
                5 => odd_even(a, &id, &B5),
                7 => odd_even(a, &id, &B7),
                _ => odd_even(a, &id, &B9),
            };
            return pade_solve(&u, &v);
        }
    }

    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil().max(0.0) as i32 } else { 0 };
    let scaled = a * 2f64.powi(-s);
    let (u, v) = pade13(&scaled, &id);
    let mut r = pade_solve(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Odd/even parts of a low-order Padé numerator built from even powers.
fn odd_even(a: &DMatrix<f64>, id: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let a2 = a * a;
    let mut power = id.clone();
    let mut odd = DMatrix::zeros(a.nrows(), a.ncols());
    let mut even = DMatrix::zeros(a.nrows(), a.ncols());
    for k in 0..b.len() / 2 {
        even += &power * b[2 * k];
        odd += &power * b[2 * k + 1];
        power = &power * &a2;
    }
    (a * odd, even)
}

fn pade13(a: &DMatrix<f64>, id: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + id * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + id * b[0];
    (u, v)
}

fn pade_solve(u: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let p = v + u;
    let q = v - u;
    q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled arguments")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor(a: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
        let n = a.nrows();
        let mut sum = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * a / k as f64;
            sum += &term;
        }
        sum
    }

    #[test]
    fn diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 0.5, 10.0]));
        let e = expm(&a);
        for (i, x) in [-3.0f64, 0.5, 10.0].iter().enumerate() {
            assert!((e[(i, i)] / x.exp() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn two_state_closed_form() {
        let (a, b, t) = (2.0, 0.5, 0.8);
        let q = DMatrix::from_row_slice(2, 2, &[-a, b, a, -b]) * t;
        let e = expm(&q);
        let decay = (-(a + b) * t).exp();
        let p00 = b / (a + b) + a / (a + b) * decay;
        assert!((e[(0, 0)] - p00).abs() < 1e-14);
        assert!((e[(1, 0)] - (1.0 - p00)).abs() < 1e-14);
    }

    #[test]
    fn small_norm_orders_match_taylor() {
        for scale in [1e-3, 1e-2, 0.2, 0.9, 2.0] {
            let a = DMatrix::from_row_slice(3, 3, &[0.1, -0.3, 0.2, 0.4, -0.5, 0.1, -0.2, 0.3, 0.05]) * scale;
            let e = expm(&a);
            let t = taylor(&a, 40);
            assert!((e - t).amax() < 1e-13, "scale {scale}");
        }
    }

    #[test]
    fn large_norm_diagonalizable() {
        let v = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0]);
        let vinv = v.clone().try_inverse().unwrap();
        let lambda: [f64; 3] = [-40.0, -3.0, 0.5];
        let a = &v * DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&lambda)) * &vinv;
        let expected =
            &v * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, lambda.iter().map(|l| l.exp()))) * &vinv;
        let e = expm(&a);
        assert!((e - &expected).amax() < 1e-12 * expected.amax());
    }

    #[test]
    fn generator_exponential_is_stochastic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(2..6);
            let mut q = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                for i in 0..n {
                    if i != j {
                        q[(i, j)] = rng.random_range(0.0..5.0);
                    }
                }
                let s: f64 = q.column(j).sum();
                q[(j, j)] = -s;
            }
            let s = rng.random_range(0.0..3.0);
            let e = expm(&(q * s));
            assert!(e.iter().all(|&x| x >= -1e-12));
            for j in 0..n {
                assert!((e.column(j).sum() - 1.0).abs() < 1e-10);
            }
        }
    }
}
