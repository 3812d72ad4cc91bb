#![no_main]

use attain::format::{parse_game, print_game};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_game(text) {
        let again = parse_game(&print_game(&g)).expect("printed game reparses");
        assert_eq!(again, g);
    }
});
