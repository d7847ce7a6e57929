use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chainforge::chain::SupplyChainGraph;
use chainforge::export::import_graph_json;
use chainforge::registry::DependencyDb;
use tempfile::NamedTempFile;

fn parent_dir(path: &Path) -> &Path {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
}

/// Output files written to temporaries and renamed into place together, so a
/// failure leaves no partial output behind.
#[derive(Default)]
pub struct Staged {
    files: Vec<(NamedTempFile, PathBuf)>,
}

impl Staged {
    pub fn add(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        self.add_with(path, |w| w.write_all(bytes).map_err(Into::into))
    }

    pub fn add_with(
        &mut self,
        path: &Path,
        fill: impl FnOnce(&mut dyn Write) -> Result<()>,
    ) -> Result<()> {
        let dir = parent_dir(path);
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let tmp =
            NamedTempFile::new_in(dir).with_context(|| format!("staging {}", path.display()))?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            fill(&mut w).with_context(|| format!("writing {}", path.display()))?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        self.files.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn commit(self) -> Result<()> {
        for (tmp, path) in self.files {
            tmp.persist(&path)
                .with_context(|| format!("renaming into {}", path.display()))?;
        }
        Ok(())
    }
}

pub fn write_one(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut s = Staged::default();
    s.add(path, bytes)?;
    s.commit()
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn load_db(path: &Path) -> Result<DependencyDb> {
    DependencyDb::read_from(open(path)?)
        .with_context(|| format!("reading database {}", path.display()))
}

pub fn load_graph(path: &Path) -> Result<SupplyChainGraph> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    import_graph_json(&bytes).with_context(|| format!("malformed graph file {}", path.display()))
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}
