//! Seeded random parameter draws.
//!
//! Generator: ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`). Every
//! complex number is drawn with `Re ∈ [−1, 1]` then `Im ∈ [−0.8, 0.8]`;
//! draws failing a guard are discarded and redrawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SosError};
use crate::params::{c64, validate, ModelParams, Route, C64};

pub const RE_BOX: f64 = 1.0;
pub const IM_BOX: f64 = 0.8;
const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn complex(&mut self) -> C64 {
        let re = self.rng.gen_range(-RE_BOX..=RE_BOX);
        let im = self.rng.gen_range(-IM_BOX..=IM_BOX);
        c64(re, im)
    }

    pub fn complexes(&mut self, n: usize) -> Vec<C64> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// γ, θ and `size` inhomogeneities (not validated).
    pub fn raw_params(&mut self, size: usize) -> ModelParams {
        let gamma = self.complex();
        let theta = self.complex();
        let mu = self.complexes(size);
        ModelParams { gamma, theta, mu }
    }

    /// Repeats `f` until it succeeds or fails with a non-validation error.
    pub fn until<T, F>(&mut self, mut f: F) -> Result<T>
    where
        F: FnMut(&mut Sampler) -> Result<T>,
    {
        let mut last = None;
        for _ in 0..MAX_REJECTIONS {
            match f(self) {
                Ok(v) => return Ok(v),
                Err(e) if e.is_validation() => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| SosError::InvalidArgument("rejection sampling exhausted".into())))
    }

    /// Parameters and `n_lambda` spectral arguments passing the guards of
    /// `route` and the extra predicate.
    pub fn draw_with<P>(&mut self, size: usize, n_lambda: usize, route: Route, accept: P) -> Result<(ModelParams, Vec<C64>)>
    where
        P: Fn(&ModelParams, &[C64]) -> bool,
    {
        self.until(|s| {
            let p = s.raw_params(size);
            let l = s.complexes(n_lambda);
            validate(&p, &l, route)?;
            if !accept(&p, &l) {
                return Err(SosError::InvalidArgument("draw rejected".into()));
            }
            Ok((p, l))
        })
    }

    /// Parameters valid for every partition route, with `size` spectral
    /// arguments.
    pub fn draw(&mut self, size: usize) -> Result<(ModelParams, Vec<C64>)> {
        self.draw_with(size, size, Route::Permutation, |_, _| true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a = Sampler::new(42).draw(3).unwrap();
        let b = Sampler::new(42).draw(3).unwrap();
        assert_eq!(a, b);
        let c = Sampler::new(43).draw(3).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn draws_stay_in_box() {
        let mut s = Sampler::new(7);
        for z in s.complexes(1000) {
            assert!(z.re.abs() <= RE_BOX && z.im.abs() <= IM_BOX);
        }
    }

    #[test]
    fn draws_pass_validation() {
        let mut s = Sampler::new(1);
        for size in 1..=4 {
            let (p, l) = s.draw_with(size, size + 2, Route::Functional, |_, _| true).unwrap();
            assert!(validate(&p, &l, Route::Functional).is_ok());
        }
    }
}
