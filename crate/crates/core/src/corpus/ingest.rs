use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{ArticleRecord, CommentRecord, Corpus, MediumRecord};
use crate::{Error, Result};

/// Lines parsed per parallel batch.
const CHUNK_LINES: usize = 16_384;

/// Locations of the three record files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPaths {
    pub media: PathBuf,
    pub articles: PathBuf,
    pub comments: PathBuf,
}

impl CorpusPaths {
    /// Conventional file names inside a directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        CorpusPaths {
            media: dir.join("media.jsonl"),
            articles: dir.join("articles.jsonl"),
            comments: dir.join("comments.jsonl"),
        }
    }
}

/// Streams newline-delimited JSON records from `path`.
///
/// Blank lines are skipped, unknown keys ignored, and the first malformed line
/// (in file order) is reported with its 1-based line number. Lines are parsed
/// in bounded batches on the current rayon pool, so memory stays proportional
/// to the number of records rather than the file size.
pub fn read_records<T>(path: &Path) -> Result<Vec<T>>
where
    T: DeserializeOwned + Send,
{
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let mut out = Vec::new();
    let mut batch: Vec<(usize, String)> = Vec::with_capacity(CHUNK_LINES);
    let mut line_no = 0usize;
    loop {
        let mut line = String::new();
        let n = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if line.trim().is_empty() {
            continue;
        }
        batch.push((line_no, line));
        if batch.len() == CHUNK_LINES {
            parse_batch(path, &mut batch, &mut out)?;
        }
    }
    parse_batch(path, &mut batch, &mut out)?;
    Ok(out)
}

fn parse_batch<T>(path: &Path, batch: &mut Vec<(usize, String)>, out: &mut Vec<T>) -> Result<()>
where
    T: DeserializeOwned + Send,
{
    let parsed: Vec<std::result::Result<T, (usize, String)>> = batch
        .par_iter()
        .map(|(line, text)| serde_json::from_str::<T>(text).map_err(|e| (*line, e.to_string())))
        .collect();
    batch.clear();
    for item in parsed {
        match item {
            Ok(v) => out.push(v),
            Err((line, message)) => {
                return Err(Error::MalformedRecord {
                    path: path.to_path_buf(),
                    line,
                    message,
                })
            }
        }
    }
    Ok(())
}

/// Writes records one JSON object per line.
pub fn write_records<'a, T, I>(path: &Path, records: I) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads and validates a corpus from its three record files.
pub fn load_corpus(paths: &CorpusPaths) -> Result<Corpus> {
    let media: Vec<MediumRecord> = read_records(&paths.media)?;
    let articles: Vec<ArticleRecord> = read_records(&paths.articles)?;
    let comments: Vec<CommentRecord> = read_records(&paths.comments)?;
    Corpus::from_records(media, articles, comments)
}

/// Serializes a corpus to its three record files.
pub fn write_corpus(corpus: &Corpus, paths: &CorpusPaths) -> Result<()> {
    let (media, articles, comments) = corpus.to_records();
    write_records(&paths.media, &media)?;
    write_records(&paths.articles, &articles)?;
    write_records(&paths.comments, &comments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn fixture(dir: &Path, comments: &str) -> CorpusPaths {
        CorpusPaths {
            media: write(
                dir,
                "m.jsonl",
                "{\"medium_id\":\"m1\",\"name\":\"One\",\"extra\":5}\n",
            ),
            articles: write(
                dir,
                "a.jsonl",
                "{\"article_id\":\"a1\",\"medium_id\":\"m1\",\"published_at\":\"2021-09-01T00:00:00Z\"}\n\
                 {\"article_id\":\"a2\",\"medium_id\":\"m1\",\"published_at\":\"2021-09-02T00:00:00Z\"}\n",
            ),
            comments: write(dir, "c.jsonl", comments),
        }
    }

    fn comment(id: &str, article: &str) -> String {
        format!(
            "{{\"comment_id\":\"{id}\",\"article_id\":\"{article}\",\"user_id\":\"u1\",\
             \"created_at\":\"2021-09-03T10:00:00Z\",\"replies\":1,\"sympathies\":2,\"antipathies\":3}}\n"
        )
    }

    #[test]
    fn loads_well_formed_files() {
        let dir = tempfile::tempdir().unwrap();
        let body = [comment("c1", "a1"), comment("c2", "a2"), comment("c3", "a2")].concat();
        let corpus = load_corpus(&fixture(dir.path(), &body)).unwrap();
        assert_eq!(
            (
                corpus.media().len(),
                corpus.articles().len(),
                corpus.comments().len()
            ),
            (1, 2, 3)
        );
    }

    #[test]
    fn unknown_article_is_dangling() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_corpus(&fixture(dir.path(), &comment("c1", "nope"))).unwrap_err();
        match err {
            Error::DanglingReference { kind, id, .. } => {
                assert_eq!(kind, "article");
                assert_eq!(id, "nope");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_comment_id_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = [comment("c1", "a1"), comment("c1", "a2")].concat();
        let err = load_corpus(&fixture(dir.path(), &body)).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { kind: "comment", .. }));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{}\n{}", comment("c1", "a1"), "{\"comment_id\":\"c2\"}\n");
        let err = load_corpus(&fixture(dir.path(), &body)).unwrap_err();
        match err {
            Error::MalformedRecord { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("missing field"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_counts_are_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let body = comment("c1", "a1").replace("\"replies\":1", "\"replies\":-1");
        let err = load_corpus(&fixture(dir.path(), &body)).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 1, .. }));
    }
}
