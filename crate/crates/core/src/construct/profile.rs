//! Convex profiles `G_A` joining the exponential end `A(eˢ − 1/e) − 1` to
//! the line `2s`.
//!
//! `G'` blends `A eˢ` into `2` with `χ`, the normalized integral of the
//! bump `(1 − y²)³` over `[m − w, m + w]`. The center `m` is chosen so that
//! `∫₋₁⁰ G' = 1`, i.e. `G(−1) = −1` and `G(0) = 0`.

use crate::error::ConstructError;
use crate::Scalar;

pub const DEFAULT_WIDTH: f64 = 0.33;
pub const SAMPLES: usize = 2001;
const MAX_WIDTH_HALVINGS: usize = 6;

// 10-point Gauss-Legendre rule on [-1, 1].
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Composite Gauss-Legendre quadrature with `panels` equal panels.
pub fn gauss_legendre<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, panels: usize) -> T {
    let h = (b - a) / T::from_usize_lossy(panels);
    let half = h / T::lit(2.0);
    let mut total = T::zero();
    for p in 0..panels {
        let mid = a + h * (T::from_usize_lossy(p) + T::lit(0.5));
        let mut acc = T::zero();
        for k in 0..5 {
            let dx = half * T::lit(GL_X[k]);
            acc += T::lit(GL_W[k]) * (f(mid - dx) + f(mid + dx));
        }
        total += acc * half;
    }
    total
}

/// Blend weight `χ` and its derivative in `y = (s − m)/w`.
fn chi<T: Scalar>(y: T) -> (T, T) {
    if y <= -T::one() {
        return (T::zero(), T::zero());
    }
    if y >= T::one() {
        return (T::one(), T::zero());
    }
    let y2 = y * y;
    let p = y * (T::one() - y2 + y2 * y2 * T::lit(0.6) - y2 * y2 * y2 / T::lit(7.0));
    let scale = T::lit(35.0 / 32.0);
    let b = T::one() - y2;
    (
        (p + T::lit(16.0 / 35.0)) * scale,
        b * b * b * scale,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexProfile<T> {
    a: T,
    center: T,
    width: T,
    left: T,
    s: Vec<T>,
    g: Vec<T>,
    dg: Vec<T>,
}

/// Measured properties of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileCertificate<T> {
    /// `|G(−1) + 1|` from the exponential closed form.
    pub left_endpoint: T,
    /// `|G(−1) + ∫₋₁⁰ G'|`, the integrated value at 0.
    pub right_endpoint: T,
    /// Jump of `G` where the blend meets the line.
    pub seam_gap: T,
    pub min_slope: T,
    pub min_curvature: T,
    /// Largest deviation of sampled values from the closed-form tails.
    pub tail_error: T,
}

impl<T: Scalar> ConvexProfile<T> {
    pub fn new(a: T) -> Result<Self, ConstructError> {
        Self::with_width(a, T::lit(DEFAULT_WIDTH))
    }

    /// Builds `G_A` with blend half-width `width`, halving the width (up to
    /// six times) when no admissible center exists.
    pub fn with_width(a: T, width: T) -> Result<Self, ConstructError> {
        let half = T::lit(0.5);
        if !(a > T::zero() && a < half) {
            return Err(ConstructError::SlopeOutOfRange(a.to_f64().unwrap_or(f64::NAN)));
        }
        if !(width > T::zero() && width < half) {
            return Err(ConstructError::Parameter(format!("profile width {width} outside (0, 1/2)")));
        }
        let mut w = width;
        for _ in 0..=MAX_WIDTH_HALVINGS {
            if let Some(m) = find_center(a, w) {
                return Ok(Self::sampled(a, m, w));
            }
            w = w * half;
        }
        Err(ConstructError::ProfileInfeasible {
            a: a.to_f64().unwrap_or(f64::NAN),
            width: w.to_f64().unwrap_or(f64::NAN),
        })
    }

    fn sampled(a: T, center: T, width: T) -> Self {
        let mut p = Self {
            a,
            center,
            width,
            left: exp_tail(a, center - width),
            s: Vec::new(),
            g: Vec::new(),
            dg: Vec::new(),
        };
        let n = SAMPLES - 1;
        for i in 0..=n {
            let s = -T::one() + T::lit(2.0) * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            p.s.push(s);
            p.g.push(p.value(s));
            p.dg.push(p.slope(s));
        }
        p
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn width(&self) -> T {
        self.width
    }

    /// Half-width of the neighbourhood of 0 where `G(s) = 2s`.
    pub fn linear_extent(&self) -> T {
        -(self.center + self.width)
    }

    pub fn samples(&self) -> (&[T], &[T], &[T]) {
        (&self.s, &self.g, &self.dg)
    }

    pub fn slope(&self, s: T) -> T {
        let (c, _) = chi((s - self.center) / self.width);
        let e = self.a * s.exp();
        e + c * (T::lit(2.0) - e)
    }

    pub fn curvature(&self, s: T) -> T {
        let (c, dc) = chi((s - self.center) / self.width);
        let e = self.a * s.exp();
        (T::one() - c) * e + dc / self.width * (T::lit(2.0) - e)
    }

    pub fn value(&self, s: T) -> T {
        let lo = self.center - self.width;
        let hi = self.center + self.width;
        if s <= lo {
            exp_tail(self.a, s)
        } else if s >= hi {
            T::lit(2.0) * s
        } else {
            let frac = ((s - lo) / (hi - lo)).to_f64().unwrap_or(1.0);
            let panels = ((frac * 32.0).ceil() as usize).max(1);
            self.left + gauss_legendre(|x| self.slope(x), lo, s, panels)
        }
    }

    pub fn certify(&self) -> ProfileCertificate<T> {
        let lo = self.center - self.width;
        let hi = self.center + self.width;
        let blend = gauss_legendre(|x| self.slope(x), lo, hi, 64);
        let integrated = exp_tail(self.a, lo) + blend + T::lit(2.0) * (T::zero() - hi);
        let mut tail_error = T::zero();
        for (s, g) in self.s.iter().zip(&self.g) {
            if *s <= lo {
                tail_error = tail_error.max((*g - exp_tail(self.a, *s)).abs());
            } else if *s >= hi {
                tail_error = tail_error.max((*g - T::lit(2.0) * *s).abs());
            }
        }
        ProfileCertificate {
            left_endpoint: (self.value(-T::one()) + T::one()).abs(),
            right_endpoint: integrated.abs(),
            seam_gap: (self.left + blend - T::lit(2.0) * hi).abs(),
            min_slope: self.dg.iter().copied().fold(T::infinity(), T::min),
            min_curvature: self.s.iter().map(|&s| self.curvature(s)).fold(T::infinity(), T::min),
            tail_error,
        }
    }
}

fn exp_tail<T: Scalar>(a: T, s: T) -> T {
    a * (s.exp() - (-T::one()).exp()) - T::one()
}

/// `∫₋₁⁰ G'` for blend center `m` and half-width `w`.
pub fn normalization_integral<T: Scalar>(a: T, m: T, w: T) -> T {
    let slope = |s: T| {
        let (c, _) = chi((s - m) / w);
        let e = a * s.exp();
        e + c * (T::lit(2.0) - e)
    };
    let lo = m - w;
    let hi = m + w;
    a * (lo.exp() - (-T::one()).exp()) + gauss_legendre(slope, lo, hi, 32) - T::lit(2.0) * hi
}

/// Bisection for `I(m) = 1` on `(−1 + w, −w)`; `I` decreases in `m`.
fn find_center<T: Scalar>(a: T, w: T) -> Option<T> {
    let mut lo = -T::one() + w;
    let mut hi = -w;
    let f = |m: T| normalization_integral(a, m, w) - T::one();
    if !(f(lo) > T::zero() && f(hi) < T::zero()) {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::lit(1e-13) {
            break;
        }
    }
    Some((lo + hi) / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_tails() {
        for a in [0.1, 0.25, 0.49] {
            let p = ConvexProfile::<f64>::new(a).unwrap();
            assert_eq!(p.value(-1.0), -1.0);
            assert_eq!(p.value(0.0), 0.0);
            let c = p.certify();
            assert!(c.right_endpoint < 1e-10, "{c:?}");
            assert!(c.seam_gap < 1e-10, "{c:?}");
            assert!(c.min_slope > 0.0 && c.min_curvature >= -1e-12);
            assert!(c.tail_error <= 1e-12);
        }
    }

    #[test]
    fn slope_out_of_range() {
        assert!(ConvexProfile::<f64>::new(0.5).is_err());
        assert!(ConvexProfile::<f64>::new(0.0).is_err());
    }

    #[test]
    fn bracket_for_narrow_blend() {
        let a = 0.25;
        assert!(normalization_integral(a, -0.9, 0.1) > 1.0);
        assert!(normalization_integral(a, -0.1, 0.1) < 1.0);
        let p = ConvexProfile::<f64>::with_width(a, 0.1).unwrap();
        assert!((normalization_integral(a, p.center(), 0.1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blend_is_continuous() {
        let p = ConvexProfile::<f64>::new(0.3).unwrap();
        let lo = p.center() - p.width();
        let hi = p.center() + p.width();
        for s in [lo, hi] {
            let d = 1e-9;
            assert!((p.value(s + d) - p.value(s - d)).abs() < 1e-8);
            assert!((p.slope(s + d) - p.slope(s - d)).abs() < 1e-7);
        }
    }

    #[test]
    fn single_precision_profile() {
        let p = ConvexProfile::<f32>::new(0.25).unwrap();
        assert!(p.certify().right_endpoint < 1e-5);
    }
}
