//! Benchmarks for the propagators and operators; see `benches/`.

use swlab_core::experiments::random_state;
use swlab_core::FiberState;

/// Seeded random state at `t = 0` supported on `|m| <= reach`.
pub fn bench_state(half_width: usize, reach: i64) -> FiberState {
    let mut s = random_state(half_width, reach, 0.3, 42).expect("reach inside window");
    s.t = 0.0;
    s
}
