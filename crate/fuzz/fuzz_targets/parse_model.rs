#![no_main]

use libfuzzer_sys::fuzz_target;
use regcalc_cli::{parse_dsl, Workspace};

const SIGNATURE: &str = "type x, y, w;
pred R : (x, y);
pred P : (x);
pred Q : (y) supp {w};
";

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if src.contains("load") {
        return;
    }
    let mut ws: Workspace = parse_dsl(SIGNATURE).expect("fixed signature parses");
    if ws.load(src, None).is_ok() {
        if let Some(m) = ws.model() {
            for rel in m.relations().values() {
                m.check(rel).expect("loaded relations lie in the domains");
            }
        }
        let printed = ws.to_string();
        assert_eq!(parse_dsl(&printed).expect("reparses").to_string(), printed);
    }
});
