//! Flat `key=value` configuration files.
//!
//! Entries are turned into `--key value` arguments and placed directly after
//! the subcommand, so anything given on the command line (which comes later)
//! takes precedence.

use std::fs;
use std::path::Path;

const SUBCOMMANDS: [&str; 4] = ["jc", "dephasing", "scan", "verify"];

#[derive(Debug)]
pub enum ConfigError {
    Read(String, std::io::Error),
    Syntax { line: usize, text: String },
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Read(path, e) => write!(f, "cannot read config file {path}: {e}"),
            ConfigError::Syntax { line, text } => {
                write!(f, "config line {line}: expected key=value, found '{text}'")
            }
        }
    }
}

/// Parses `key=value` lines. Blank lines and lines starting with `#` are
/// skipped; keys may use `-` or `_`.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            });
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            });
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_position(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&args[i].as_str()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Returns `args` with the entries of the `--config` file (if any) spliced
/// in after the subcommand. Boolean entries become bare flags when `true`
/// and are dropped when `false`.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(Path::new(&path)).map_err(|e| ConfigError::Read(path.clone(), e))?;
    let mut extra = Vec::new();
    for (k, v) in parse(&text)? {
        match v.as_str() {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => {
                extra.push(format!("--{k}"));
                extra.push(v);
            }
        }
    }
    let Some(pos) = subcommand_position(&args) else {
        return Ok(args);
    };
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let got = parse("# bath\nlambda = 15\n\ngamma0=40\nrel_tol=1e-9\n").unwrap();
        assert_eq!(
            got,
            vec![
                ("lambda".to_string(), "15".to_string()),
                ("gamma0".to_string(), "40".to_string()),
                ("rel-tol".to_string(), "1e-9".to_string()),
            ]
        );
        assert!(parse("lambda 15").is_err());
        assert!(parse("=3").is_err());
    }

    #[test]
    fn finds_config_path() {
        let args: Vec<String> = ["qslkit", "jc", "--config", "a.cfg"].map(String::from).to_vec();
        assert_eq!(config_path(&args).as_deref(), Some("a.cfg"));
        let args: Vec<String> = ["qslkit", "--config=b.cfg", "jc"].map(String::from).to_vec();
        assert_eq!(config_path(&args).as_deref(), Some("b.cfg"));
        let args: Vec<String> = ["qslkit", "--config", "jc", "scan"].map(String::from).to_vec();
        assert_eq!(subcommand_position(&args), Some(3));
    }
}
