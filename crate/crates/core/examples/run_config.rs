// Drive the command-line front end from a config file, as a script would.

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("wisolab-run-config-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let cfg = dir.join("sweep.toml");
    std::fs::write(
        &cfg,
        r#"command = "sweep"
seed = 1
jobs = 2

[params]
N = 2
alpha = -0.5

[sweep]
family = "up-axis"
t_min = 10.0
t_max = 1000.0
points = 12
"#,
    )?;
    let out = dir.join("sweep.csv");
    let code = wisolab::cli::main_with_args([
        "wisolab",
        "--config",
        cfg.to_str().ok_or("path")?,
        "--output",
        out.to_str().ok_or("path")?,
    ]);
    println!("exit code {code}");
    print!("{}", std::fs::read_to_string(&out)?);
    print!(
        "{}",
        std::fs::read_to_string(dir.join("sweep.csv.summary.json"))?
    );
    std::fs::remove_dir_all(&dir)?;
    if code != 0 {
        return Err(format!("cli exited with {code}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
