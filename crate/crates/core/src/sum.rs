//! Compensated summation of quadrature contributions.

use crate::algebra::{BiQuat, C64};

/// Neumaier-compensated accumulator over `N` independent lanes.
#[derive(Debug, Clone, Copy)]
pub struct Compensated<const N: usize> {
    sum: [f64; N],
    comp: [f64; N],
}

impl<const N: usize> Default for Compensated<N> {
    fn default() -> Self {
        Self { sum: [0.0; N], comp: [0.0; N] }
    }
}

impl<const N: usize> Compensated<N> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: [f64; N]) {
        for i in 0..N {
            let s = self.sum[i];
            let t = s + v[i];
            if libm::fabs(s) >= libm::fabs(v[i]) {
                self.comp[i] += (s - t) + v[i];
            } else {
                self.comp[i] += (v[i] - t) + s;
            }
            self.sum[i] = t;
        }
    }

    /// Fold in another accumulator (used when reducing partial sums in a fixed order).
    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn total(&self) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = self.sum[i] + self.comp[i];
        }
        out
    }
}

/// Values that can be summed lane-wise with compensation.
pub trait Lanes: Copy {
    const N: usize;
    fn to_lanes(&self, out: &mut [f64]);
    fn from_lanes(lanes: &[f64]) -> Self;
}

impl Lanes for C64 {
    const N: usize = 2;
    fn to_lanes(&self, out: &mut [f64]) {
        out[0] = self.re;
        out[1] = self.im;
    }
    fn from_lanes(l: &[f64]) -> Self {
        C64::new(l[0], l[1])
    }
}

impl Lanes for BiQuat {
    const N: usize = 8;
    fn to_lanes(&self, out: &mut [f64]) {
        out.copy_from_slice(&self.components());
    }
    fn from_lanes(l: &[f64]) -> Self {
        let mut c = [0.0; 8];
        c.copy_from_slice(&l[..8]);
        BiQuat::from_components(c)
    }
}

/// Compensated accumulator for any [`Lanes`] value (at most eight lanes).
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    inner: Compensated<8>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add<V: Lanes>(&mut self, v: V) {
        let mut lanes = [0.0; 8];
        v.to_lanes(&mut lanes[..V::N]);
        self.inner.add(lanes);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.inner.merge(&other.inner);
    }

    pub fn total<V: Lanes>(&self) -> V {
        V::from_lanes(&self.inner.total()[..V::N])
    }
}
