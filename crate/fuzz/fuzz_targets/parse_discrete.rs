#![no_main]

use attain::catalog::example1;
use attain::discrete::{parse_discrete_player1, parse_discrete_player2};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let g = example1();
    let _ = parse_discrete_player1(text, &g);
    let _ = parse_discrete_player2(text, &g);
});
