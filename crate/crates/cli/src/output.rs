use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// 17 significant digits, locale-free.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// JSON number, with non-finite values as strings.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(num(x))
    }
}

pub struct Csv {
    body: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { body: header.join(",") + "\n" }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.body, "{}", fields.join(","));
    }
}

pub struct Outputs {
    pub dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Outputs { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn csv(&mut self, name: &str, csv: &Csv) -> std::io::Result<()> {
        self.write(name, &csv.body)
    }

    pub fn json(&mut self, name: &str, v: &Value) -> std::io::Result<()> {
        self.write(name, &(serde_json::to_string_pretty(v).expect("json values serialize") + "\n"))
    }

    fn write(&mut self, name: &str, text: &str) -> std::io::Result<()> {
        std::fs::write(self.dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Manifest naming the config values, their hash, versions and wall time.
    pub fn manifest(&mut self, command: &str, cfg: &RunConfig, grid_n: usize, wall: Duration, exit_code: i32) -> std::io::Result<()> {
        let canon = cfg.canonical();
        let mut text = String::new();
        for (k, v) in &canon {
            let _ = writeln!(text, "{k}={v}");
        }
        let hash: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        let files = self.files.clone();
        let m = json!({
            "command": command,
            "config": canon,
            "config_hash": hash,
            "grid_N": grid_n,
            "jobs": cfg.jobs,
            "versions": { "lightcone": lightcone::VERSION, "cli": env!("CARGO_PKG_VERSION") },
            "wall_time_s": wall.as_secs_f64(),
            "files": files,
            "exit_code": exit_code,
        });
        self.json(&format!("{command}.manifest.json"), &m)
    }
}
