use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use evolutes::envelope::RuledPatch;
use evolutes::export::{csv_string, json_string, obj_string, svg_string, write_atomic, Polyline};
use nalgebra::Vector2;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Obj,
    Svg,
    Json,
}

impl Format {
    fn from_extension(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "obj" => Some(Format::Obj),
            "svg" => Some(Format::Svg),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Obj => "obj",
            Format::Svg => "svg",
            Format::Json => "json",
        }
    }
}

/// Destination of a subcommand: a file (written atomically) or stdout.
pub struct Output {
    path: Option<PathBuf>,
    pub format: Format,
}

impl Output {
    /// An explicit `--format` wins over the file extension, which wins over
    /// the subcommand default.
    pub fn new(path: Option<PathBuf>, explicit: Option<Format>, default: Format, allowed: &[Format]) -> Result<Output, String> {
        let format = explicit
            .or_else(|| path.as_deref().and_then(Format::from_extension))
            .unwrap_or(default);
        if !allowed.contains(&format) {
            let names: Vec<_> = allowed.iter().map(|f| f.name()).collect();
            return Err(format!("format {} not supported here (use {})", format.name(), names.join(", ")));
        }
        Ok(Output { path, format })
    }

    fn emit(&self, contents: &str) -> io::Result<()> {
        match &self.path {
            Some(p) => write_atomic(p, contents),
            None => io::stdout().lock().write_all(contents.as_bytes()),
        }
    }

    pub fn csv(&self, poly: &Polyline) -> io::Result<()> {
        self.emit(&csv_string(poly))
    }

    pub fn obj(&self, patch: &RuledPatch) -> io::Result<()> {
        self.emit(&obj_string(patch))
    }

    pub fn svg(&self, branches: &[Vec<Vector2<f64>>], scale: f64) -> io::Result<()> {
        self.emit(&svg_string(branches, scale))
    }

    pub fn json<T: Serialize + ?Sized>(&self, value: &T) -> io::Result<()> {
        self.emit(&json_string(value))
    }
}
