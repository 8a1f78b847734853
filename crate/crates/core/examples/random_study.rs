//! Identification study on random machines: generate, simulate, learn,
//! and forward-check against held-out scenarios.
//!
//! cargo run --release --example random_study

use eccsynth::eval::{run_study, GeneratorConfig, Method, StudyConfig};
use eccsynth::synthesis::SynthConfig;

fn main() {
    for training in [(5, 10), (20, 30)] {
        let config = StudyConfig {
            generator: GeneratorConfig::new(4, 4, 3),
            training,
            validation: (100, 50),
            seed: 7,
            repetitions: 8,
            method: Method::ExtendedMin { guard_nodes: 3 },
            synth: SynthConfig::default(),
        };
        let report = run_study(&config).expect("valid configuration");
        report.write_summary(std::io::stdout().lock(), true).expect("stdout");
    }
}
