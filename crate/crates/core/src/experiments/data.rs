use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{FieldState, Grid};
use crate::scalar::{from_usize, lit, Real};

/// `Σ aₖⱼ cos(kπx/Lx)·cos(jπy/Ly)` over the lowest `modes` cosines per axis.
/// Each coefficient is uniform in `[−1, 1]` times the weight
/// `(1+k)⁻²(1+j)⁻²`, and the weights are normalized to sum to `amplitude`.
/// The result is smooth, satisfies the Neumann condition and is bounded by
/// `amplitude`.
pub fn random_smooth_field<T: Real>(grid: &Grid<T>, rng: &mut impl Rng, modes: usize, amplitude: T) -> Vec<T> {
    let pi = lit::<T>(std::f64::consts::PI);
    let ext = grid.extents();
    let two_d = grid.dim() == 2;
    let my = if two_d { modes } else { 1 };
    let weight = |k: usize| T::one() / from_usize::<T>((1 + k) * (1 + k));
    let total: T = (0..modes).flat_map(|kx| (0..my).map(move |ky| (kx, ky))).map(|(kx, ky)| weight(kx) * weight(ky)).sum();
    let mut terms = Vec::new();
    for kx in 0..modes {
        for ky in 0..my {
            let a = amplitude * weight(kx) * weight(ky) / total * lit::<T>(rng.gen_range(-1.0..=1.0));
            let fy = if two_d { from_usize::<T>(ky) * pi / ext[1] } else { T::zero() };
            terms.push((from_usize::<T>(kx) * pi / ext[0], fy, a));
        }
    }
    grid.sample(|x| terms.iter().map(|&(fx, fy, a)| a * (fx * x[0]).cos() * (fy * x[1]).cos()).sum())
}

/// Random smooth `(v, ∂ₜv, w)` from a seeded ChaCha8 stream.
pub fn random_smooth_state<T: Real>(grid: &Grid<T>, seed: u64, modes: usize, amplitude: T) -> FieldState<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = random_smooth_field(grid, &mut rng, modes, amplitude);
    let vt = random_smooth_field(grid, &mut rng, modes, amplitude);
    let w = random_smooth_field(grid, &mut rng, modes, amplitude);
    FieldState::new(T::zero(), v, vt, w)
}

/// `amplitude·tanh((x − center)/width)` along the first axis.
pub fn tanh_profile<T: Real>(grid: &Grid<T>, amplitude: T, center: T, width: T) -> Vec<T> {
    grid.sample(|x| amplitude * ((x[0] - center) / width).tanh())
}
