use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::CodegenError;

/// A target framework described as data: type names, gate spellings and
/// statement templates. Templates use `{placeholder}` substitution.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub name: String,
    /// Values of the `language` setting that select this profile.
    #[serde(default)]
    pub languages: Vec<String>,
    #[serde(default)]
    pub autoimport: String,
    pub indent: String,
    pub files: Files,
    pub types: Types,
    pub gates: BTreeMap<String, String>,
    pub syntax: Syntax,
    pub expressions: Expressions,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Files {
    pub source: String,
    pub header: Option<String>,
    #[serde(default)]
    pub source_prelude: String,
    #[serde(default)]
    pub header_prelude: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Types {
    pub qubit: String,
    pub qvec: String,
    pub cbit: String,
    pub cvec: String,
    pub int: String,
    pub double: String,
    pub bool: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Syntax {
    pub param: String,
    pub prototype: String,
    pub function_open: String,
    pub function_close: String,
    pub program_new: String,
    pub program_return: String,
    pub insert: String,
    pub call: String,
    pub classical_assign: String,
    pub qif: String,
    pub qif_else: String,
    pub qwhile: String,
    pub constant: String,
    #[serde(rename = "let")]
    pub let_: String,
    pub decl: String,
    pub assign: String,
    pub expr_stmt: String,
    pub if_open: String,
    pub else_if: String,
    #[serde(rename = "else")]
    pub else_: String,
    pub while_open: String,
    pub for_open: String,
    pub block_open: String,
    pub block_close: String,
    pub empty_block: String,
    /// Whether `{}` blocks open a new scope in the target language.
    pub scoped_blocks: bool,
    /// Whether a name may be declared twice in one scope.
    pub redeclare_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expressions {
    #[serde(rename = "true")]
    pub true_: String,
    #[serde(rename = "false")]
    pub false_: String,
    pub and: String,
    pub or: String,
    pub not: String,
    pub len: String,
    pub index: String,
    pub slice_qvec: String,
    pub slice_cvec: String,
    pub int_div: String,
    /// Logical not binds looser than comparisons (Python).
    pub loose_not: bool,
    /// `a < b < c` chains instead of nesting (Python).
    pub chained_comparisons: bool,
}

const GATE_NAMES: &[&str] = &["H", "X", "Y", "NOT", "CNOT", "RX", "Measure", "MeasureAll"];

impl Profile {
    pub fn from_toml(text: &str) -> Result<Profile, CodegenError> {
        let profile: Profile = toml::from_str(text).map_err(|e| CodegenError::Profile(e.to_string()))?;
        for g in GATE_NAMES {
            if !profile.gates.contains_key(*g) {
                return Err(CodegenError::Profile(format!(
                    "profile '{}' has no spelling for {g}",
                    profile.name
                )));
            }
        }
        Ok(profile)
    }

    pub fn from_file(path: &Path) -> Result<Profile, CodegenError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CodegenError::Profile(format!("{}: {e}", path.display())))?;
        Profile::from_toml(&text).map_err(|e| match e {
            CodegenError::Profile(m) => CodegenError::Profile(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn builtin() -> Vec<Profile> {
        [include_str!("../../profiles/cpp.toml"), include_str!("../../profiles/python.toml")]
            .into_iter()
            .map(|t| Profile::from_toml(t).expect("built-in profile"))
            .collect()
    }
}

/// Replaces each `{key}` in `template`. Unknown keys are left alone.
pub fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}');
        match close.and_then(|c| vars.iter().find(|(k, _)| *k == &after[..c]).map(|(_, v)| (c, v))) {
            Some((c, v)) => {
                out.push_str(v);
                rest = &after[c + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}
