//! Regenerates the pinned simplification-trace fixtures under tests/fixtures/.
//! Run after an intentional change to the row-move engine:
//!
//!     cargo run -p stable-hhh-core --example regen_fixtures

use std::path::Path;

use stable_hhh_core::groebner::GbConfig;
use stable_hhh_core::mf::simplify_mn;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    std::fs::create_dir_all(&dir).expect("fixture dir");
    for n in [2u8, 3] {
        let trace = simplify_mn(n, None, &GbConfig::default()).expect("simplify");
        let text = serde_json::to_string_pretty(&trace.to_json()).expect("serialize");
        let path = dir.join(format!("simplify_n{n}.json"));
        std::fs::write(&path, text + "\n").expect("write fixture");
        println!("wrote {}", path.display());
    }
}
