//! Per-command option schemas. Each struct doubles as the clap argument set
//! and as the serde schema for options read from `--input`.

use std::str::FromStr;

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A JSON value given on the command line. Text that is not valid JSON is
/// taken as a plain string, so `--z 1/2` and `--z '"1/2"'` agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Json(pub Value);

impl FromStr for Json {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Json(serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))))
    }
}

/// Scalars are strings such as `"3/4-1/2 i"`; a bare JSON number is accepted
/// and read back as its decimal text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Number(serde_json::Number),
}

impl FromStr for ScalarText {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(ScalarText::Text(s.to_string()))
    }
}

impl ScalarText {
    pub fn text(&self) -> String {
        match self {
            ScalarText::Text(s) => s.clone(),
            ScalarText::Number(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Middle polynomials Q1..Q4 and the entries of Φ_N.
    Expand(ExpandOpts),
    /// Rank of the sl2 frame of Φ_N at a point.
    Jacobian(JacobianOpts),
    /// Random check that the frame has rank 3 exactly off S_N.
    LemmaCheck(LemmaOpts),
    /// Completes a sampled interior point to a point of the fiber over a target.
    FiberSolve(FiberOpts),
    /// Factors a constant SL2 matrix into at most four elementary factors.
    FactorConst(FactorOpts),
    /// Lengthens a word by two so that it avoids the singular set.
    Pad(PadOpts),
    /// Factorizations of the Cohn matrix.
    Cohn(CohnOpts),
    /// Degree of a candidate h3 on a fiber {zw = D}.
    Winding(WindingOpts),
    /// Winding-number certificate against holomorphic four-factor words.
    Certificate(CertificateOpts),
    /// Factor-count bound from per-index K values.
    Bound(BoundOpts),
    /// Runs every acceptance property.
    VerifySuite(SuiteOpts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand(_) => "expand",
            Command::Jacobian(_) => "jacobian",
            Command::LemmaCheck(_) => "lemma-check",
            Command::FiberSolve(_) => "fiber-solve",
            Command::FactorConst(_) => "factor-const",
            Command::Pad(_) => "pad",
            Command::Cohn(_) => "cohn",
            Command::Winding(_) => "winding",
            Command::Certificate(_) => "certificate",
            Command::Bound(_) => "bound",
            Command::VerifySuite(_) => "verify-suite",
        }
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExpandOpts {
    #[arg(long)]
    pub n: Option<usize>,
    /// Side of the first factor, L or U.
    #[arg(long)]
    pub first: Option<String>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct JacobianOpts {
    #[arg(long)]
    pub n: Option<usize>,
    /// JSON array of scalars.
    #[arg(long)]
    pub point: Option<Json>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct LemmaOpts {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FiberOpts {
    #[arg(long)]
    pub n: Option<usize>,
    /// `{"a": .., "b": .., "c": .., "d": ..}`.
    #[arg(long)]
    pub target: Option<Json>,
    /// generic or nongeneric; chosen from the target when absent.
    #[arg(long)]
    pub branch: Option<String>,
    /// Free first coordinate on the non-generic branch.
    #[arg(long, allow_hyphen_values = true)]
    pub z1: Option<ScalarText>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FactorOpts {
    #[arg(long)]
    pub target: Option<Json>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct PadOpts {
    /// JSON array of `{"side": "L"|"U", "entry": ..}`.
    #[arg(long)]
    pub word: Option<Json>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CohnOpts {
    /// holo or family.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<ScalarText>,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<ScalarText>,
    #[arg(long, allow_hyphen_values = true)]
    pub h3: Option<ScalarText>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct WindingOpts {
    /// One of 1, z, w, zw, z^2, exp(zw), section.
    #[arg(long)]
    pub h3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<ScalarText>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// w or z: which coordinate runs over the circle.
    #[arg(long)]
    pub param: Option<String>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CertificateOpts {
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<ScalarText>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BoundOpts {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated `i=K(i)` pairs.
    #[arg(long)]
    pub k: Option<String>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SuiteOpts {
    /// quick or full.
    #[arg(long)]
    pub scale: Option<String>,
    /// Inject a known fault, e.g. wrong-h2-sign.
    #[arg(long)]
    pub tamper: Option<String>,
}

/// Overlays options given on the command line onto those read from a file;
/// the command line wins. The merged map is validated against the schema of
/// the command.
pub fn merge<T>(cli: &T, file: Option<&serde_json::Map<String, Value>>) -> Result<T, String>
where
    T: Serialize + for<'de> Deserialize<'de>,
{
    let mut merged = file.cloned().unwrap_or_default();
    if let Value::Object(given) = serde_json::to_value(cli).map_err(|e| e.to_string())? {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| e.to_string())
}

/// Options with `None` fields dropped, for echoing the command.
pub fn echo<T: Serialize>(opts: &T) -> Value {
    match serde_json::to_value(opts) {
        Ok(Value::Object(m)) => Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).collect()),
        Ok(v) => v,
        Err(_) => Value::Null,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_prefers_command_line() {
        let file: serde_json::Map<String, Value> = serde_json::from_str(r#"{"n": 3, "k": "2=1,3=1"}"#).unwrap();
        let cli = BoundOpts { n: Some(2), k: None };
        let m = merge(&cli, Some(&file)).unwrap();
        assert_eq!(m.n, Some(2));
        assert_eq!(m.k.as_deref(), Some("2=1,3=1"));
        let bad: serde_json::Map<String, Value> = serde_json::from_str(r#"{"bogus": 1}"#).unwrap();
        assert!(merge(&BoundOpts::default(), Some(&bad)).is_err());
    }

    #[test]
    fn json_args() {
        assert_eq!("[1, 2]".parse::<Json>().unwrap().0, serde_json::json!([1, 2]));
        assert_eq!("1/2".parse::<Json>().unwrap().0, serde_json::json!("1/2"));
        let s: ScalarText = serde_json::from_str("2.5").unwrap();
        assert_eq!(s.text(), "2.5");
    }
}
