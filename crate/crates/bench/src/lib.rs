//! Shared fixtures for the benchmark targets.

use optchoice::{engine_preset, generate, Dataset, GenConfig};

/// The engine-shaped dataset with the planted optimum left noiseless, so
/// searches have a recoverable target.
pub fn noiseless_engine_dataset() -> Dataset {
    let config = GenConfig {
        noise_sigma: 0.0,
        ..engine_preset()
    };
    generate(&config).expect("preset generates")
}

/// The standard noisy engine-shaped dataset.
pub fn engine_dataset() -> Dataset {
    generate(&engine_preset()).expect("preset generates")
}
