#![no_main]

use libfuzzer_sys::fuzz_target;
use regcalc_cli::ingest::ingest_reader;
use regcalc_cli::parse_dsl;

const SIGNATURE: &str = "type x, y, w;
pred R : (x, y);
pred P : (x);
pred Q : (y) supp {w};
domain x = {a, b, 1, \"c d\"};
domain y = {a, 2};
";

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rows)) = data.split_first() else { return };
    let pred = match selector {
        b'R' => "R",
        b'P' => "P",
        _ => "Q",
    };
    let mut ws = parse_dsl(SIGNATURE).expect("fixed signature parses");
    if ingest_reader(&mut ws, pred, rows).is_ok() {
        assert_eq!(ingest_reader(&mut ws, pred, rows).expect("second load succeeds"), 0);
        let printed = ws.to_string();
        assert_eq!(parse_dsl(&printed).expect("reparses").to_string(), printed);
    }
});
