use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::Scalar;

/// Unnormalized 2-D transform on an `m × m` row-major array.
///
/// Forward uses `e^{-ikx}`, inverse `e^{+ikx}`; neither scales.
pub struct Fft2<T: Scalar> {
    m: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scratch_len: usize,
}

impl<T: Scalar> Fft2<T> {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Fft2 {
            m,
            forward,
            inverse,
            scratch_len,
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &*self.forward);
    }

    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &*self.inverse);
    }

    fn run(&self, buf: &mut [Complex<T>], plan: &dyn Fft<T>) {
        assert_eq!(buf.len(), self.m * self.m, "buffer does not match grid");
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); self.scratch_len];
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, self.m);
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, self.m);
    }
}

/// In-place transpose in square tiles, which keeps both strides in cache.
fn transpose<C: Copy>(buf: &mut [C], m: usize) {
    const TILE: usize = 16;
    for ib in (0..m).step_by(TILE) {
        for jb in (ib..m).step_by(TILE) {
            for i in ib..(ib + TILE).min(m) {
                for j in jb.max(i + 1)..(jb + TILE).min(m) {
                    buf.swap(i * m + j, j * m + i);
                }
            }
        }
    }
}
