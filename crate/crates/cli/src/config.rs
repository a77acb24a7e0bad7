//! Angle literals and merging of `--config` files with command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use serde::de::{self, DeserializeOwned, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Angle in radians. Accepts plain numbers and multiples of π such as
/// `pi/2`, `-3pi/4` or `2*pi/3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_angle(s).map(Angle)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(Angle(x)),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let bad = || format!("`{s}` is not an angle (radians, or forms like pi/2 and -3pi/4)");
    let t = s.trim().to_lowercase().replace('π', "pi").replace(' ', "");
    let value = match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| bad())?,
        Some(pos) => {
            let head = &t[..pos];
            let head = head.strip_suffix('*').unwrap_or(head);
            let coef = match head {
                "" | "+" => 1.0,
                "-" => -1.0,
                h => h.parse::<f64>().map_err(|_| bad())?,
            };
            let den = match &t[pos + 2..] {
                "" => 1.0,
                tail => tail.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
            };
            if den == 0.0 {
                return Err(bad());
            }
            coef * PI / den
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Flag names accepted by an argument group, which are also its config keys.
pub fn known_keys<A: Args>() -> Vec<String> {
    A::augment_args(clap::Command::new("keys")).get_arguments().map(|a| a.get_id().to_string()).collect()
}

/// Overlays the flags given on the command line onto a flat JSON config.
/// Keys the command does not understand are rejected.
pub fn resolve<A>(cli: A, config: Option<&Path>) -> CliResult<A>
where
    A: Args + Serialize + DeserializeOwned,
{
    let Some(path) = config else {
        return Ok(cli);
    };
    let shown = path.display();
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {shown}: {e}")))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {shown} is not valid JSON: {e}")))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Usage(format!("config {shown} must be a JSON object of key/value pairs")));
    };
    let known = known_keys::<A>();
    if let Some(key) = map.keys().find(|k| !known.contains(k)) {
        return Err(CliError::Usage(format!(
            "unknown key `{key}` in config {shown}; this command accepts: {}",
            known.join(", ")
        )));
    }
    if let Value::Object(flags) = serde_json::to_value(&cli)? {
        map.extend(flags.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Usage(format!("config {shown}: {e}")))
}
