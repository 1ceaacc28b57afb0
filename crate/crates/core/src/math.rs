//! Scalar helpers: float intrinsics that work without `std`, deterministic
//! summation, and a tiny PRNG for shuffles and property sampling.

use alloc::vec::Vec;

pub use core::f64::consts::PI;

macro_rules! shim {
    ($name:ident, $libm:ident) => {
        #[inline]
        pub fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$name()
            }
            #[cfg(not(feature = "std"))]
            {
                libm::$libm(x)
            }
        }
    };
}

shim!(sqrt, sqrt);
shim!(sin, sin);
shim!(cos, cos);
shim!(tan, tan);
shim!(asin, asin);
shim!(acos, acos);
shim!(exp, exp);
shim!(ln, log);
shim!(sinh, sinh);
shim!(cosh, cosh);
shim!(acosh, acosh);
shim!(floor, floor);

#[inline]
pub fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}

#[inline]
pub fn powf(x: f64, p: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(p)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, p)
    }
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        y.atan2(x)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::atan2(y, x)
    }
}

/// Fixed-shape tree reduction. The result depends only on the slice
/// contents, never on how work was split upstream, so reports stay
/// byte-identical across worker counts.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// n >= 2 points, both endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
}

/// Gamma(half/2) for integer `half >= 1`, by the half-integer recurrence.
fn gamma_half(half: usize) -> f64 {
    debug_assert!(half >= 1);
    let mut val = if half % 2 == 1 { sqrt(PI) } else { 1.0 };
    let mut k = if half % 2 == 1 { 1 } else { 2 };
    while k + 2 <= half {
        val *= k as f64 / 2.0;
        k += 2;
    }
    val
}

/// Surface measure of the unit m-sphere in R^{m+1}.
pub fn unit_sphere_area(m: usize) -> f64 {
    2.0 * powf(PI, (m + 1) as f64 / 2.0) / gamma_half(m + 1)
}

/// C^2 monotone ramp on [0,1]; returns (value, derivative).
pub fn smooth_step(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0)
    } else {
        let v = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let d = 30.0 * s * s * (1.0 - s) * (1.0 - s);
        (v, d)
    }
}

/// xorshift64; deterministic, seed 0 is remapped.
#[derive(Clone, Debug)]
pub struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    pub fn new(seed: u64) -> Self {
        Self { state: if seed == 0 { 0x9e3779b97f4a7c15 } else { seed } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.next_f64()
    }

    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }
}
