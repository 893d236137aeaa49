//! `key = value` config files. Keys are the long flag names of the chosen
//! subcommand (`arm-len` or `arm_len`); the values are spliced into the
//! argument list ahead of the user's own flags, so flags given on the command
//! line win.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Command};

/// Keys that only make sense on the command line.
const RESERVED: &[&str] = &["config", "out", "help", "version"];

/// Converts config lines into `--key value` arguments for `sub`.
pub fn config_args(text: &str, path: &Path, sub: &Command) -> Result<Vec<OsString>> {
    let mut args = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{}:{line_no}", path.display());
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}: expected `key = value`, got {line:?}", at());
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        let Some(arg) = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && !RESERVED.contains(&key.as_str()))
        else {
            bail!("{}: unknown key {key:?} for `{}`", at(), sub.get_name());
        };
        if !seen.insert(key.clone()) {
            bail!("{}: duplicate key {key:?}", at());
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value {
                "true" | "yes" | "1" => args.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                _ => bail!("{}: {key} expects true or false, got {value:?}", at()),
            },
            _ => {
                if value.is_empty() {
                    bail!("{}: empty value for {key:?}", at());
                }
                args.push(format!("--{key}={value}").into());
            }
        }
    }
    Ok(args)
}

/// Finds `--config FILE` (or `--config=FILE`) and splices the file's
/// arguments in right after the subcommand name.
pub fn expand(args: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>> {
    let Some(sub_pos) = args
        .iter()
        .skip(1)
        .position(|a| a.to_str().is_some_and(|s| cmd.find_subcommand(s).is_some()))
        .map(|p| p + 1)
    else {
        return Ok(args);
    };
    let sub = cmd
        .find_subcommand(args[sub_pos].to_str().unwrap_or_default())
        .expect("position found by name");
    let mut path = None;
    let mut iter = args[sub_pos + 1..].iter();
    while let Some(a) = iter.next() {
        let Some(s) = a.to_str() else { continue };
        if s == "--" {
            break;
        } else if s == "--config" {
            path = iter.next().cloned();
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let injected = config_args(&text, path, sub)?;
    let mut out = args[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub_pos + 1..]);
    Ok(out)
}
