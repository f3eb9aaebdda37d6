use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// A failure that maps to exit status 1.
#[derive(Debug)]
pub struct DomainError {
    pub kind: String,
    pub message: String,
}

impl DomainError {
    pub fn new(kind: impl Into<String>, message: impl fmt::Display) -> Self {
        DomainError {
            kind: kind.into(),
            message: message.to_string(),
        }
    }
}

macro_rules! from_core_error {
    ($($t:ty),*) => {$(
        impl From<$t> for DomainError {
            fn from(e: $t) -> Self {
                DomainError::new(e.kind(), &e)
            }
        }
    )*};
}

from_core_error!(
    stegkit_core::mesh::MeshError,
    stegkit_core::stego::StegoError,
    stegkit_core::gcode::GcodeError,
    stegkit_core::vrml::VrmlError,
    stegkit_core::qr3d::Qr3dError,
    stegkit_core::recon::ReconError
);

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool_version: &'static str,
    subcommand: &'a str,
    input_digests: &'a BTreeMap<String, String>,
    result: Option<Value>,
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorBody<'a>>,
}

/// Tracks inputs, outputs and warnings for one invocation.
pub struct Session {
    subcommand: &'static str,
    digests: BTreeMap<String, String>,
    inputs: Vec<PathBuf>,
    warnings: Vec<String>,
}

impl Session {
    pub fn new(subcommand: &'static str) -> Self {
        Session {
            subcommand,
            digests: BTreeMap::new(),
            inputs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, DomainError> {
        let bytes = fs::read(path)
            .map_err(|e| DomainError::new("Io", format!("{}: {e}", path.display())))?;
        self.digests.insert(
            path.display().to_string(),
            format!("{:08x}", crc32fast::hash(&bytes)),
        );
        self.inputs.push(path.to_path_buf());
        Ok(bytes)
    }

    pub fn read_text(&mut self, path: &Path) -> Result<String, DomainError> {
        let bytes = self.read(path)?;
        String::from_utf8(bytes).map_err(|_| {
            DomainError::new("InvalidUtf8", format!("{} is not UTF-8", path.display()))
        })
    }

    /// Writes an output file, refusing to overwrite any input.
    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), DomainError> {
        let target = fs::canonicalize(path).ok();
        let clobbers = target.is_some()
            && self
                .inputs
                .iter()
                .any(|i| fs::canonicalize(i).ok() == target);
        if clobbers {
            return Err(DomainError::new(
                "OutputIsInput",
                format!("refusing to overwrite input {}", path.display()),
            ));
        }
        fs::write(path, bytes)
            .map_err(|e| DomainError::new("Io", format!("{}: {e}", path.display())))
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    /// Renders the envelope and picks the exit status.
    pub fn finish(self, outcome: Result<Value, DomainError>, pretty: bool) -> (String, u8) {
        let (result, error, code) = match &outcome {
            Ok(v) => (Some(v.clone()), None, 0),
            Err(e) => (
                None,
                Some(ErrorBody {
                    kind: &e.kind,
                    message: &e.message,
                }),
                1,
            ),
        };
        let env = Envelope {
            tool_version: env!("CARGO_PKG_VERSION"),
            subcommand: self.subcommand,
            input_digests: &self.digests,
            result,
            warnings: &self.warnings,
            error,
        };
        let json = if pretty {
            serde_json::to_string_pretty(&env)
        } else {
            serde_json::to_string(&env)
        }
        .expect("report serializes");
        (json, code)
    }
}
