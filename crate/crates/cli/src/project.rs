//! A project directory: `blocks/*.st|*.il` and `constraints/*.xml`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use blocksynth::lang::{parse, LangError};
use blocksynth::spec::{load_constraints, ConstraintList, Mode, SpecError};
use blocksynth::{Block, Identifier, Lang};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Block { path: PathBuf, source: LangError },
    #[error("{path}: {source}")]
    Constraints { path: PathBuf, source: SpecError },
    #[error("block `{name}` defined in both {first} and {second}")]
    DuplicateBlock { name: Identifier, first: PathBuf, second: PathBuf },
    #[error("{path}: constraint list refers to unknown block `{name}`")]
    UnknownBlock { path: PathBuf, name: Identifier },
}

/// Language of a block file from its extension.
pub fn lang_of(path: &Path) -> Option<Lang> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    ext.parse().ok()
}

#[derive(Debug, Clone)]
pub struct ProjectLayout {
    pub root: PathBuf,
    pub blocks: BTreeMap<Identifier, (PathBuf, Block)>,
    pub constraints: Vec<(PathBuf, ConstraintList)>,
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, ProjectError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let io = |source| ProjectError::Io { path: dir.to_path_buf(), source };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        paths.push(entry.map_err(io)?.path());
    }
    paths.sort();
    Ok(paths)
}

impl ProjectLayout {
    /// Loads every block and constraint list. Lists in generate mode may
    /// name a block that does not exist yet; all others must resolve.
    pub fn load(root: impl AsRef<Path>) -> Result<ProjectLayout, ProjectError> {
        let root = root.as_ref().to_path_buf();
        let mut blocks: BTreeMap<Identifier, (PathBuf, Block)> = BTreeMap::new();
        for path in sorted_entries(&root.join("blocks"))? {
            let Some(lang) = lang_of(&path) else { continue };
            let text = fs::read_to_string(&path).map_err(|source| ProjectError::Io { path: path.clone(), source })?;
            let block = parse(&text, lang).map_err(|source| ProjectError::Block { path: path.clone(), source })?;
            if let Some((first, _)) = blocks.get(block.name()) {
                return Err(ProjectError::DuplicateBlock {
                    name: block.name().clone(),
                    first: first.clone(),
                    second: path,
                });
            }
            blocks.insert(block.name().clone(), (path, block));
        }
        let mut constraints = Vec::new();
        for path in sorted_entries(&root.join("constraints"))? {
            if path.extension().and_then(|e| e.to_str()) != Some("xml") {
                continue;
            }
            let list =
                load_constraints(&path).map_err(|source| ProjectError::Constraints { path: path.clone(), source })?;
            if list.mode() != Mode::Generate && !blocks.contains_key(list.block_name()) {
                return Err(ProjectError::UnknownBlock { path, name: list.block_name().clone() });
            }
            constraints.push((path, list));
        }
        Ok(ProjectLayout { root, blocks, constraints })
    }

    pub fn block(&self, name: &Identifier) -> Option<&Block> {
        self.blocks.get(name).map(|(_, b)| b)
    }
}
