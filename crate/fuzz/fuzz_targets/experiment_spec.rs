#![no_main]

use libfuzzer_sys::fuzz_target;
use nls_graphs::experiment::ExperimentSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // file sources would read arbitrary paths
        if let Ok(spec) = ExperimentSpec::from_json(text) {
            if spec.graph.file.is_none() {
                let _ = spec.graph.resolve(spec.grid.ell.first().copied());
            }
        }
    }
});
