#![no_main]

use libfuzzer_sys::fuzz_target;
use nls_graphs::function::GraphFunction;
use nls_graphs::graph::builders;

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let g = match pick % 3 {
        0 => builders::pendant(1.0),
        1 => builders::tadpole(2.0),
        _ => builders::fig2(),
    };
    if let Ok((u, _)) = GraphFunction::read_csv(&g, text) {
        let _ = u.mass();
        let _ = u.energy(4.0);
    }
});
