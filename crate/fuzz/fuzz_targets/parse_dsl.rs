#![no_main]

use libfuzzer_sys::fuzz_target;
use regcalc_cli::parse_dsl;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    // `load` would read arbitrary paths
    if src.contains("load") {
        return;
    }
    if let Ok(ws) = parse_dsl(src) {
        let printed = ws.to_string();
        let again = parse_dsl(&printed).expect("printed workspace parses");
        assert_eq!(again.to_string(), printed);
    }
});
