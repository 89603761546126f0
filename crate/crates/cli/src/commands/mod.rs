use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use staeckel_core::critical::{in_image, BifurcationSet};
use staeckel_core::{IntegralValues, SystemSpec};

use crate::config::Settings;
use crate::output::Emitter;

pub mod actions;
pub mod bifurcate;
pub mod classify;
pub mod monodromy;
pub mod polytope;
pub mod simulate;
pub mod verify;

/// Everything a subcommand needs: validated settings, the system and the output sink.
pub struct Run {
    pub settings: Settings,
    pub spec: SystemSpec,
    pub out: Emitter,
}

impl Run {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.settings.seed())
    }

    pub fn pool(&self) -> anyhow::Result<ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.settings.threads {
            builder = builder.num_threads(n);
        }
        Ok(builder.build()?)
    }

    pub fn integral_names(&self) -> [&'static str; 2] {
        self.spec.family().integral_names()
    }
}

/// Bounding box [x0, x1, y0, y1] of the critical values; the image of the
/// momentum map is compact with boundary on these curves.
pub fn value_box(set: &BifurcationSet) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    let mut take = |p: [f64; 2]| {
        b[0] = b[0].min(p[0]);
        b[1] = b[1].max(p[0]);
        b[2] = b[2].min(p[1]);
        b[3] = b[3].max(p[1]);
    };
    for c in &set.curves {
        let (t0, t1) = c.range;
        for k in 0..=200 {
            take(c.point(t0 + (t1 - t0) * k as f64 / 200.0));
        }
    }
    for v in set.all_vertices() {
        take(v.value);
    }
    b
}

/// Row-major n x n grid over the value box, keeping points in the image.
pub fn image_grid(spec: &SystemSpec, set: &BifurcationSet, n: usize) -> Vec<IntegralValues> {
    let [x0, x1, y0, y1] = value_box(set);
    let at = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    (0..n * n)
        .map(|k| IntegralValues::at_level(at(x0, x1, k % n), at(y0, y1, k / n), spec.two_h()))
        .filter(|v| in_image(v, spec))
        .collect()
}

/// Maps `f` over `items` on the pool; the output keeps the input order.
pub fn par_map<T: Sync, U: Send>(pool: &ThreadPool, items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    pool.install(|| items.par_iter().map(f).collect())
}
