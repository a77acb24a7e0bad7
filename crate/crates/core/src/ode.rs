//! Classical fixed-step RK4 for complex linear systems.

use crate::scalar::{Cplx, Real};

/// Scratch space for [`Rk4::step`], sized once per state dimension.
pub(crate) struct Rk4<T> {
    k1: Vec<Cplx<T>>,
    k2: Vec<Cplx<T>>,
    k3: Vec<Cplx<T>>,
    k4: Vec<Cplx<T>>,
    tmp: Vec<Cplx<T>>,
}

impl<T: Real> Rk4<T> {
    pub(crate) fn new(dim: usize) -> Self {
        let z = vec![Cplx::new(T::zero(), T::zero()); dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// Advances `y` from `t` to `t + h` for `dy/dt = f(t, y)`.
    pub(crate) fn step<F>(&mut self, f: &mut F, t: T, h: T, y: &mut [Cplx<T>])
    where
        F: FnMut(T, &[Cplx<T>], &mut [Cplx<T>]),
    {
        let half = h * T::lit(0.5);
        f(t, y, &mut self.k1);
        for ((tmp, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *tmp = *y + *k * half;
        }
        f(t + half, &self.tmp, &mut self.k2);
        for ((tmp, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *tmp = *y + *k * half;
        }
        f(t + half, &self.tmp, &mut self.k3);
        for ((tmp, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *tmp = *y + *k * h;
        }
        f(t + h, &self.tmp, &mut self.k4);
        let sixth = h / T::lit(6.0);
        for (i, y) in y.iter_mut().enumerate() {
            let two = T::lit(2.0);
            *y = *y + (self.k1[i] + self.k2[i] * two + self.k3[i] * two + self.k4[i]) * sixth;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential_to_fourth_order() {
        // dy/dt = i y  →  y(1) = e^{i}
        let run = |steps: usize| {
            let mut rk = Rk4::<f64>::new(1);
            let mut y = [Cplx::new(1.0, 0.0)];
            let h = 1.0 / steps as f64;
            let mut f = |_t: f64, y: &[Cplx<f64>], dy: &mut [Cplx<f64>]| dy[0] = Cplx::new(0.0, 1.0) * y[0];
            for k in 0..steps {
                rk.step(&mut f, k as f64 * h, h, &mut y);
            }
            (y[0] - Cplx::new(1.0_f64.cos(), 1.0_f64.sin())).norm()
        };
        let ratio = run(20) / run(40);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }
}
