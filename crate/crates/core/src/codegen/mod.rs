//! Host-language code generation through a registry of named targets.
//!
//! Built-in targets are `cpp` and `python` (both [`ProfileEmitter`]s over
//! TOML profile tables) and `qir` (canonical IR text; needs entry
//! arguments). Extra profile tables are loaded from the directory named by
//! `QRUNES_PROFILE_DIR`; a profile with the name of a built-in replaces it.

mod emit;
mod profile;

use std::path::Path;

use indexmap::IndexMap;
use thiserror::Error;

pub use emit::ProfileEmitter;
pub use profile::{fill, Profile};

use crate::diagnostics::Diagnostic;
use crate::frontend::Ast;
use crate::qir::{elaborate, ir_to_text, ElabLimits, Value};
use crate::semantics::TypedAst;
use crate::span::SourceSpan;

pub const PROFILE_DIR_ENV: &str = "QRUNES_PROFILE_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    /// Relative file name.
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TargetSourceText {
    pub files: Vec<OutputFile>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodegenError {
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("unknown target '{0}'")]
    UnknownTarget(String),
    #[error("no target handles language '{0}'")]
    UnknownLanguage(String),
    #[error("no target given and the program has no 'language' setting")]
    NoTarget,
    #[error("target '{0}' needs an entry function and arguments (a run config)")]
    MissingRunConfig(String),
    #[error("target '{target}' has no idiom for {construct}")]
    Unsupported {
        target: String,
        construct: String,
        span: SourceSpan,
    },
    #[error("{}", .0.message)]
    Elaboration(Diagnostic),
}

/// Entry point and arguments, for targets that elaborate.
#[derive(Debug, Clone, Copy)]
pub struct EntryBinding<'a> {
    pub entry: &'a str,
    pub args: &'a IndexMap<String, Value>,
}

#[derive(Debug, Clone, Copy)]
pub struct EmitRequest<'a> {
    pub program: &'a TypedAst,
    /// Base name for output files.
    pub stem: &'a str,
    pub autoimport: bool,
    pub entry: Option<EntryBinding<'a>>,
    pub limits: ElabLimits,
}

impl<'a> EmitRequest<'a> {
    /// A request honoring the program's `autoimport` setting.
    pub fn new(program: &'a TypedAst, stem: &'a str) -> EmitRequest<'a> {
        EmitRequest {
            program,
            stem,
            autoimport: autoimport_setting(&program.ast),
            entry: None,
            limits: ElabLimits::default(),
        }
    }
}

pub fn autoimport_setting(ast: &Ast) -> bool {
    ast.setting("autoimport")
        .is_some_and(|s| matches!(s.trim().to_ascii_lowercase().as_str(), "true" | "1" | "yes"))
}

pub fn language_setting(ast: &Ast) -> Option<&str> {
    ast.setting("language").map(|s| s.trim())
}

pub trait Target: Send + Sync {
    fn name(&self) -> &str;

    /// Values of the `language` setting this target answers to.
    fn languages(&self) -> &[String] {
        &[]
    }

    fn emit(&self, req: &EmitRequest) -> Result<TargetSourceText, CodegenError>;
}

/// Canonical IR text of the elaborated entry function.
#[derive(Debug, Clone, Copy, Default)]
pub struct QirTarget;

impl Target for QirTarget {
    fn name(&self) -> &str {
        "qir"
    }

    fn emit(&self, req: &EmitRequest) -> Result<TargetSourceText, CodegenError> {
        let binding = req.entry.ok_or_else(|| CodegenError::MissingRunConfig(self.name().to_owned()))?;
        let el = elaborate(req.program, binding.entry, binding.args, &req.limits)
            .map_err(CodegenError::Elaboration)?;
        let mut text = ir_to_text(&el.ir);
        if !text.is_empty() {
            text.push('\n');
        }
        Ok(TargetSourceText {
            files: vec![OutputFile {
                name: format!("{}.qir", req.stem),
                text,
            }],
        })
    }
}

#[derive(Default)]
pub struct TargetRegistry {
    targets: Vec<Box<dyn Target>>,
}

impl TargetRegistry {
    pub fn new() -> TargetRegistry {
        TargetRegistry::default()
    }

    pub fn with_builtins() -> TargetRegistry {
        let mut r = TargetRegistry::new();
        for p in Profile::builtin() {
            r.register(Box::new(ProfileEmitter::new(p)));
        }
        r.register(Box::new(QirTarget));
        r
    }

    /// Built-ins plus any profiles in `$QRUNES_PROFILE_DIR`.
    pub fn from_env() -> Result<TargetRegistry, CodegenError> {
        let mut r = TargetRegistry::with_builtins();
        if let Some(dir) = std::env::var_os(PROFILE_DIR_ENV) {
            r.load_profile_dir(Path::new(&dir))?;
        }
        Ok(r)
    }

    /// Loads every `*.toml` in `dir`, in file-name order.
    pub fn load_profile_dir(&mut self, dir: &Path) -> Result<usize, CodegenError> {
        let entries = std::fs::read_dir(dir)
            .map_err(|e| CodegenError::Profile(format!("{}: {e}", dir.display())))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        for path in &paths {
            self.register(Box::new(ProfileEmitter::new(Profile::from_file(path)?)));
        }
        Ok(paths.len())
    }

    /// Adds a target, replacing any target with the same name.
    pub fn register(&mut self, target: Box<dyn Target>) {
        match self.targets.iter().position(|t| t.name() == target.name()) {
            Some(i) => self.targets[i] = target,
            None => self.targets.push(target),
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Target> {
        self.targets.iter().find(|t| t.name() == name).map(|t| t.as_ref())
    }

    pub fn for_language(&self, language: &str) -> Option<&dyn Target> {
        self.targets
            .iter()
            .find(|t| {
                t.name().eq_ignore_ascii_case(language)
                    || t.languages().iter().any(|l| l.eq_ignore_ascii_case(language))
            })
            .map(|t| t.as_ref())
    }

    pub fn names(&self) -> Vec<&str> {
        self.targets.iter().map(|t| t.name()).collect()
    }

    /// Picks the target named on the command line, else the one matching the
    /// `language` setting. The second value is a warning when both are given
    /// and disagree.
    pub fn select(&self, requested: Option<&str>, ast: &Ast) -> Result<(&dyn Target, Option<String>), CodegenError> {
        let language = language_setting(ast);
        match requested {
            Some(name) => {
                let target = self.get(name).ok_or_else(|| CodegenError::UnknownTarget(name.to_owned()))?;
                let warning = language
                    .filter(|lang| self.for_language(lang).is_none_or(|t| t.name() != target.name()))
                    .map(|lang| format!("language setting '{lang}' ignored; using target '{name}'"));
                Ok((target, warning))
            }
            None => {
                let lang = language.ok_or(CodegenError::NoTarget)?;
                let target = self
                    .for_language(lang)
                    .ok_or_else(|| CodegenError::UnknownLanguage(lang.to_owned()))?;
                Ok((target, None))
            }
        }
    }
}

#[cfg(test)]
mod tests;
