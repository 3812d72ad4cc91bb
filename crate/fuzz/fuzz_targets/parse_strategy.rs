#![no_main]

use attain::catalog::example4;
use attain::strategies::{build_strategy, parse_strategy, Side};
use libfuzzer_sys::fuzz_target;

// Parsed expressions are also built against a small game, which exercises
// argument validation for every strategy family.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(e) = parse_strategy(text) {
        let g = example4();
        let _ = build_strategy(&e, &g, Side::P1);
        let _ = build_strategy(&e, &g, Side::P2);
    }
});
