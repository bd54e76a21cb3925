#![no_main]

use libfuzzer_sys::fuzz_target;
use regcalc::WiringDiagram;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(w) = src.parse::<WiringDiagram>() {
        let back: WiringDiagram = w.to_string().parse().expect("printed diagram parses");
        assert_eq!(back, w);
    }
});
