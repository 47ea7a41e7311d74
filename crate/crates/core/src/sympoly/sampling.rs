//! Seeded random spectra for property sweeps.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Spectrum;

/// Default half-width of the sampling box `[-5, 5]`.
pub const DEFAULT_HALF_WIDTH: f64 = 5.0;
/// Default minimum gap enforced by rejection.
pub const DEFAULT_MIN_GAP: f64 = 0.05;

/// A reproducible generator; sample `index` of seed `seed` is independent of
/// how many other samples are drawn, so sweeps can be split across workers.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumSampler {
    pub half_width: f64,
    pub min_gap: f64,
    pub seed: u64,
}

impl SpectrumSampler {
    pub fn new(seed: u64) -> Self {
        SpectrumSampler {
            half_width: DEFAULT_HALF_WIDTH,
            min_gap: DEFAULT_MIN_GAP,
            seed,
        }
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        stream_rng(self.seed, index)
    }

    /// `n` values uniform on `[-w, w]` with every gap above `min_gap`.
    pub fn distinct(&self, n: usize, index: u64) -> Spectrum {
        let mut rng = self.rng(index);
        let values = draw_separated(&mut rng, n, -self.half_width, self.half_width, self.min_gap);
        Spectrum::new(values).expect("sampler produced an invalid spectrum")
    }

    /// `n − 1` nonzero values of one random sign plus a trailing exact zero.
    /// The nonzero values stay at least `min_gap` away from zero.
    pub fn same_sign_with_zero(&self, n: usize, index: u64) -> Spectrum {
        let mut rng = self.rng(index);
        let positive: bool = rng.gen();
        let mut values = draw_separated(&mut rng, n - 1, self.min_gap, self.half_width, self.min_gap);
        if !positive {
            values.iter_mut().for_each(|v| *v = -*v);
        }
        Spectrum::with_trailing_zero(&values).expect("sampler produced an invalid spectrum")
    }
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_separated<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64, min_gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] > min_gap) {
            return v;
        }
    }
}
