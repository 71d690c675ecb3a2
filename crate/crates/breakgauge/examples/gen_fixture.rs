//! Regenerates the committed synthetic fixture.
//!
//! ```text
//! cargo run -p breakgauge --example gen_fixture -- crates/breakgauge/tests/fixtures/synthetic
//! ```

#[path = "../tests/common/synth.rs"]
mod synth;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).expect("usage: gen_fixture OUT_DIR");
    let fixture = synth::generate(synth::SEED, synth::LEN, 3);
    synth::write_fixture(&fixture, dir.as_ref(), "out")
}
