//! `key = value` files whose keys are the long flag names.

use clap::{ArgAction, Command};

use crate::CliError;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        pairs.push((key, value));
    }
    Ok(pairs)
}

/// Path given by `--config`, if any.
pub fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

/// Appends the config pairs as flags unless the command line already sets them.
///
/// Keys are checked against the flags of the selected subcommand and the
/// global flags; anything else is rejected.
pub fn merge(cmd: &Command, argv: &[String], pairs: &[(String, String)]) -> Result<Vec<String>, CliError> {
    let mut scopes = vec![cmd];
    let mut current = cmd;
    for tok in argv.iter().skip(1).filter(|a| !a.starts_with('-')) {
        match current.find_subcommand(tok) {
            Some(sub) => {
                scopes.push(sub);
                current = sub;
            }
            None => continue,
        }
    }
    let mut out = argv.to_vec();
    for (key, value) in pairs {
        let arg = scopes
            .iter()
            .flat_map(|c| c.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| CliError::Usage(format!("unknown config key `{key}`")))?;
        let flag = format!("--{key}");
        let given = argv
            .iter()
            .any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => out.push(flag),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key `{key}` expects true or false"))),
            },
            _ => out.push(format!("{flag}={value}")),
        }
    }
    Ok(out)
}
