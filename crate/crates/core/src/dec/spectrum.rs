use crate::error::DecError;
use crate::sparse::{pcg, CsrMatrix};
use crate::Scalar;

/// Smallest nonzero eigenvalue of `K x = λ M x` (diagonal `M`) on a
/// connected mesh, by inverse iteration on the M-orthogonal complement of
/// the constants.
pub fn smallest_nonzero_eigenvalue<T: Scalar>(
    k: &CsrMatrix<T>,
    m: &[T],
    iterations: usize,
) -> Result<T, DecError> {
    let n = m.len();
    let total: T = m.iter().copied().sum();
    let project = |x: &mut Vec<T>| {
        let mean = x.iter().zip(m).map(|(x, m)| *x * *m).sum::<T>() / total;
        for v in x.iter_mut() {
            *v -= mean;
        }
    };
    let normalize = |x: &mut Vec<T>| {
        let nrm = x.iter().zip(m).map(|(x, m)| *x * *x * *m).sum::<T>().sqrt();
        for v in x.iter_mut() {
            *v /= nrm;
        }
    };
    let mut x: Vec<T> = (0..n)
        .map(|i| (T::from_usize_lossy(i) * T::lit(0.754_877_666)).sin() + T::lit(0.1))
        .collect();
    project(&mut x);
    normalize(&mut x);
    let rayleigh = |x: &[T]| {
        let kx = k.mul_vec(x);
        let num: T = kx.iter().zip(x).map(|(a, b)| *a * *b).sum();
        let den: T = x.iter().zip(m).map(|(x, m)| *x * *x * *m).sum();
        num / den
    };
    let mut lambda = rayleigh(&x);
    for _ in 0..iterations {
        let mut rhs: Vec<T> = x.iter().zip(m).map(|(x, m)| *x * *m).collect();
        // Keep the right-hand side in the range of K.
        let mean = rhs.iter().copied().sum::<T>() / T::from_usize_lossy(n);
        for r in &mut rhs {
            *r -= mean;
        }
        let (mut y, _) = pcg(k, &rhs, T::lit(1e-12), 20 * n)?;
        project(&mut y);
        normalize(&mut y);
        x = y;
        let next = rayleigh(&x);
        let done = (next - lambda).abs() <= T::lit(1e-13) * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    Ok(lambda)
}
