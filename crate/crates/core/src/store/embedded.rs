use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::{Mutex, RwLock};

use super::{Backend, StoreError, StoreResult};
use crate::rdf::{parse_ntriples, Triple};

#[derive(Default)]
struct Index {
    triples: Vec<Triple>,
    set: HashSet<Triple>,
}

/// In-memory index with an optional append-only N-Triples journal.
pub struct EmbeddedBackend {
    index: RwLock<Index>,
    journal: Option<Mutex<File>>,
}

impl EmbeddedBackend {
    pub fn in_memory() -> EmbeddedBackend {
        EmbeddedBackend {
            index: RwLock::new(Index::default()),
            journal: None,
        }
    }

    /// Replays `path` (creating it if needed) and appends to it afterwards.
    /// A trailing line without its newline is a torn write and is dropped.
    pub fn open(path: &Path) -> StoreResult<EmbeddedBackend> {
        let storage = |e: std::io::Error| StoreError::StorageFailure(format!("{}: {e}", path.display()));
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(storage)?;
        }
        let mut index = Index::default();
        let text = match fs::read(path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(storage(e)),
        };
        let complete = text.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let body = std::str::from_utf8(&text[..complete])
            .map_err(|e| StoreError::StorageFailure(format!("{}: {e}", path.display())))?;
        for t in parse_ntriples(body)
            .map_err(|e| StoreError::StorageFailure(format!("{}: {e}", path.display())))?
        {
            if index.set.insert(t.clone()) {
                index.triples.push(t);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(storage)?;
        if complete < text.len() {
            file.set_len(complete as u64).map_err(storage)?;
        }
        Ok(EmbeddedBackend {
            index: RwLock::new(index),
            journal: Some(Mutex::new(file)),
        })
    }
}

impl Backend for EmbeddedBackend {
    fn add(&self, triple: &Triple) -> StoreResult<bool> {
        let mut index = self.index.write().expect("index lock poisoned");
        if index.set.contains(triple) {
            return Ok(false);
        }
        if let Some(journal) = &self.journal {
            let mut file = journal.lock().expect("journal lock poisoned");
            // one write per triple, so a crash leaves at most one torn line
            let line = format!("{triple}\n");
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|e| StoreError::StorageFailure(e.to_string()))?;
        }
        index.set.insert(triple.clone());
        index.triples.push(triple.clone());
        Ok(true)
    }

    fn by_subject(&self, subject: &str) -> StoreResult<Vec<Triple>> {
        let index = self.index.read().expect("index lock poisoned");
        Ok(index
            .triples
            .iter()
            .filter(|t| t.subject_iri() == Some(subject))
            .cloned()
            .collect())
    }

    fn literal_matches(&self, needle_lower: &str) -> StoreResult<Vec<Triple>> {
        let index = self.index.read().expect("index lock poisoned");
        Ok(index
            .triples
            .iter()
            .filter(|t| {
                t.object
                    .lexical()
                    .is_some_and(|l| l.to_lowercase().contains(needle_lower))
            })
            .cloned()
            .collect())
    }

    fn subjects_with(&self, predicate: &str, object_iri: &str) -> StoreResult<Vec<String>> {
        let index = self.index.read().expect("index lock poisoned");
        Ok(index
            .triples
            .iter()
            .filter(|t| t.predicate == predicate && t.object.as_iri() == Some(object_iri))
            .filter_map(|t| t.subject_iri().map(str::to_string))
            .collect())
    }

    fn all(&self) -> StoreResult<Vec<Triple>> {
        Ok(self.index.read().expect("index lock poisoned").triples.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Term, RDFS_COMMENT};
    use proptest::prelude::*;

    fn t(i: u8, text: &str) -> Triple {
        Triple::new(
            Term::iri(format!("http://h/filesystem/f{i}")),
            RDFS_COMMENT,
            Term::literal(text),
        )
    }

    #[test]
    fn journal_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state/journal.nt");
        {
            let b = EmbeddedBackend::open(&path).unwrap();
            assert!(b.add(&t(1, "a\nb")).unwrap());
            assert!(!b.add(&t(1, "a\nb")).unwrap());
            assert!(b.add(&t(2, "c")).unwrap());
        }
        let b = EmbeddedBackend::open(&path).unwrap();
        assert_eq!(b.all().unwrap(), [t(1, "a\nb"), t(2, "c")]);
    }

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.nt");
        fs::write(&path, format!("# comment\n{}\n<http://h/x> <http://h/p> \"tor", t(1, "ok"))).unwrap();
        let b = EmbeddedBackend::open(&path).unwrap();
        assert_eq!(b.all().unwrap(), [t(1, "ok")]);
        b.add(&t(2, "next")).unwrap();
        drop(b);
        let b = EmbeddedBackend::open(&path).unwrap();
        assert_eq!(b.all().unwrap(), [t(1, "ok"), t(2, "next")]);
    }

    #[test]
    fn corrupt_journal_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.nt");
        fs::write(&path, "garbage line\n").unwrap();
        assert!(matches!(
            EmbeddedBackend::open(&path),
            Err(StoreError::StorageFailure(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn replay_equals_state(adds in proptest::collection::vec((0u8..4, "[a-z\"\\\\ é]{0,6}"), 0..20)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("j.nt");
            let before = {
                let b = EmbeddedBackend::open(&path).unwrap();
                for (i, text) in &adds {
                    b.add(&t(*i, text)).unwrap();
                }
                b.all().unwrap()
            };
            let distinct: HashSet<_> = adds.iter().map(|(i, s)| t(*i, s)).collect();
            prop_assert_eq!(before.len(), distinct.len());
            let after = EmbeddedBackend::open(&path).unwrap().all().unwrap();
            prop_assert_eq!(before, after);
        }
    }
}
