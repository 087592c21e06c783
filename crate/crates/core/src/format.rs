use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Conjecture formats known to the framework.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Fof,
    Gcl,
    Jgex,
    Geogebra,
    Coqam,
}

impl Format {
    pub const ALL: [Format; 5] = [Format::Fof, Format::Gcl, Format::Jgex, Format::Geogebra, Format::Coqam];

    pub fn name(self) -> &'static str {
        match self {
            Format::Fof => "fof",
            Format::Gcl => "gcl",
            Format::Jgex => "jgex",
            Format::Geogebra => "geogebra",
            Format::Coqam => "coqam",
        }
    }

    /// File extension including the leading dot.
    pub fn extension(self) -> &'static str {
        match self {
            Format::Fof => ".fof",
            Format::Gcl => ".gcl",
            Format::Jgex => ".jgex",
            Format::Geogebra => ".ggb.xml",
            Format::Coqam => ".coqam",
        }
    }

    /// Recognises a file by its (possibly two-part) extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        let name = path.file_name()?.to_str()?;
        Format::ALL.into_iter().find(|f| name.len() > f.extension().len() && name.ends_with(f.extension()))
    }

    /// Formats that have a `filter<X>toFOF` converter.
    pub fn has_fof_filter(self) -> bool {
        matches!(self, Format::Gcl | Format::Jgex | Format::Geogebra)
    }
}

/// The extension of `path` as used for registry defaults (`.ggb.xml` is one
/// extension).
pub fn extension_of(path: &Path) -> Option<String> {
    if let Some(f) = Format::from_path(path) {
        return Some(f.extension().to_string());
    }
    path.extension().and_then(|e| e.to_str()).map(|e| format!(".{e}"))
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Format::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown format `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extensions() {
        assert_eq!(Format::from_path(Path::new("dir/varignon.ggb.xml")), Some(Format::Geogebra));
        assert_eq!(Format::from_path(Path::new("ceva.gcl")), Some(Format::Gcl));
        assert_eq!(Format::from_path(Path::new("x.xyz")), None);
        assert_eq!(Format::from_path(Path::new(".fof")), None);
        assert_eq!(extension_of(Path::new("a/b.ggb.xml")).as_deref(), Some(".ggb.xml"));
        assert_eq!(extension_of(Path::new("b.xyz")).as_deref(), Some(".xyz"));
        assert_eq!(extension_of(Path::new("noext")), None);
    }
}
