use pitkit::cli::run;

pub fn run_example() -> pitkit::Result<()> {
    let dir = std::env::temp_dir().join(format!("pitkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| pitkit::Error::Unsupported(e.to_string()))?;
    let file = dir.join("zero.pc");
    let file = file.to_str().unwrap();
    let mut out = vec![];
    assert_eq!(run(["pitkit", "gen", "--class", "spsu", "--k", "2", "--seed", "3", "--zero", "--out", file], &mut out), 0);
    for algo in ["didi", "brute", "trivial"] {
        let mut out = vec![];
        let code = run(["pitkit", "test", file, "--algo", algo], &mut out);
        print!("{}", String::from_utf8_lossy(&out));
        assert_eq!(code, 0);
    }
    let mut out = vec![];
    assert_eq!(run(["pitkit", "bench", "--class", "spsu", "--algos", "didi,brute", "--seeds", "3"], &mut out), 0);
    print!("{}", String::from_utf8_lossy(&out));
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
