//! The single load path shared by every command: read files in order, parse,
//! and register their definitions so later files see earlier ones.

use crate::diagnostics::{tally, Diagnostic};
use crate::model::Registry;
use crate::syntax::{parse_source, FileId, ParseOutput};

#[derive(Debug, Clone)]
pub struct LoadedFile {
    pub name: String,
    pub text: String,
    pub parsed: ParseOutput,
    /// Parse diagnostics followed by model diagnostics, in definition order.
    pub diagnostics: Vec<Diagnostic>,
}

impl LoadedFile {
    pub fn errors(&self) -> usize {
        tally(&self.diagnostics).0
    }
}

#[derive(Debug, Clone, Default)]
pub struct Session {
    pub strict: bool,
    pub registry: Registry,
    pub files: Vec<LoadedFile>,
}

impl Session {
    pub fn new(strict: bool) -> Session {
        Session {
            strict,
            ..Session::default()
        }
    }

    /// Parses `text` and registers its definitions.
    pub fn load(&mut self, name: &str, text: &str) -> &LoadedFile {
        let id = FileId(self.files.len() as u32);
        let parsed = parse_source(text, id, self.strict);
        let mut diagnostics = parsed.diagnostics.clone();
        for def in &parsed.defs {
            diagnostics.extend(self.registry.register(def));
        }
        self.files.push(LoadedFile {
            name: name.to_string(),
            text: text.to_string(),
            parsed,
            diagnostics,
        });
        self.files.last().expect("just pushed")
    }

    pub fn load_path(&mut self, path: &std::path::Path) -> std::io::Result<&LoadedFile> {
        let text = std::fs::read_to_string(path)?;
        Ok(self.load(&path.display().to_string(), &text))
    }

    pub fn errors(&self) -> usize {
        self.files.iter().map(LoadedFile::errors).sum()
    }
}
