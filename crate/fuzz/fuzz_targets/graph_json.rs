#![no_main]

use libfuzzer_sys::fuzz_target;
use nls_graphs::graph::{check_condition_h, MetricGraph};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(g) = MetricGraph::from_json(text) {
            if g.validate().is_valid() {
                let _ = check_condition_h(&g);
            }
        }
    }
});
