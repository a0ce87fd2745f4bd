//! Load a scenario from TOML, tweak it, and print the resolved form and its
//! hash. Pass a path to use your own file.

use rislab::scenario::Scenario;

const INLINE: &str = r#"
[ris]
elements = 100

[radio]
p_dBm = 20.0

[optimizer]
algorithms = ["ce", "sa"]
T = 10
K = 50

[run]
seed = 42
trials = 50
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = match std::env::args_os().nth(1) {
        Some(path) => Scenario::load(path.as_ref())?,
        None => Scenario::from_toml_str(INLINE)?,
    };
    scenario.validate()?;
    let resolved = scenario.resolved();
    print!("{}", resolved.to_toml_string());
    println!("# sha256 {}", resolved.hash_hex());

    let model = resolved.channel_model()?;
    println!("# channel: M = {}, N = {}", model.m(), model.n());
    Ok(())
}
