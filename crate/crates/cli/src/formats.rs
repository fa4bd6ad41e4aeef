//! On-disk formats: JSONL corpora and label CSVs.
//!
//! A corpus is UTF-8 JSONL, one document per line with keys `id`, `text`,
//! optional `relevant` (boolean), and optional `topics` (list of strings).
//! A label matrix is CSV with header `doc_id,topic_id`, one row per
//! (document, topic) pair; documents keep their first-appearance order.

use anyhow::{bail, Context, Result};
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use topicrisk::coverage::LabelMatrix;
use topicrisk::text::Document;

pub fn read_corpus(path: &Path) -> Result<Vec<Document>> {
    let file = File::open(path).with_context(|| format!("open corpus {}", path.display()))?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("read {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: invalid document", path.display(), line_no + 1))?;
        if let Some(previous) = seen.insert(doc.id.clone(), line_no + 1) {
            bail!(
                "{}:{}: duplicate document id {:?} (first seen on line {previous})",
                path.display(),
                line_no + 1,
                doc.id
            );
        }
        docs.push(doc);
    }
    if docs.is_empty() {
        bail!("corpus {} contains no documents", path.display());
    }
    Ok(docs)
}

pub fn write_corpus(path: &Path, docs: &[Document]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("create {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    for doc in docs {
        serde_json::to_writer(&mut writer, doc)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_label_csv(path: &Path) -> Result<LabelMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("open labels {}", path.display()))?;
    {
        let headers = reader.headers()?;
        if headers.len() != 2 || &headers[0] != "doc_id" || &headers[1] != "topic_id" {
            bail!(
                "label CSV {} must have header doc_id,topic_id",
                path.display()
            );
        }
    }
    let mut order: Vec<String> = Vec::new();
    let mut docs: HashMap<String, Vec<String>> = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let doc_id = record
            .get(0)
            .filter(|s| !s.is_empty())
            .with_context(|| format!("{}: missing doc_id", path.display()))?;
        let topic_id = record
            .get(1)
            .filter(|s| !s.is_empty())
            .with_context(|| format!("{}: missing topic_id", path.display()))?;
        let entry = docs.entry(doc_id.to_string()).or_insert_with(|| {
            order.push(doc_id.to_string());
            Vec::new()
        });
        entry.push(topic_id.to_string());
    }
    if order.is_empty() {
        bail!("label CSV {} contains no rows", path.display());
    }
    let rows: Vec<Vec<String>> = order.iter().map(|id| docs.remove(id).unwrap()).collect();
    Ok(LabelMatrix::new(rows)?)
}

pub fn write_label_csv(path: &Path, matrix: &LabelMatrix, doc_ids: &[String]) -> Result<()> {
    if doc_ids.len() != matrix.n_docs() {
        bail!(
            "doc id list ({}) does not match matrix ({})",
            doc_ids.len(),
            matrix.n_docs()
        );
    }
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("create {}", path.display()))?;
    writer.write_record(["doc_id", "topic_id"])?;
    for (doc, id) in doc_ids.iter().enumerate() {
        for &topic in matrix.doc_labels(doc) {
            writer.write_record([id.as_str(), matrix.topic_id(topic)])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Sequential zero-padded document ids for a generated matrix.
pub fn sequential_doc_ids(n_docs: usize) -> Vec<String> {
    let width = n_docs.max(1).to_string().len();
    (0..n_docs).map(|i| format!("d{i:0width$}")).collect()
}
