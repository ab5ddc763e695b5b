//! Programmatic sweep over t_ib, the same grid the `sweep` verb produces.

use haptic_uplink::experiment::{parse_config, render, ExperimentSpec, Mode};

fn main() -> haptic_uplink::Result<()> {
    let config = parse_config(
        r#"
        [experiment]
        schemes = ["DS", "FA"]
        param = "t_ib"
        from = "1ms"
        to = "3ms"
        steps = 5
        "#,
    )?;
    let outcome = render(&ExperimentSpec {
        mode: Mode::Sweep,
        config,
        out: None,
    })?;
    print!("{}", outcome.text);
    Ok(())
}
