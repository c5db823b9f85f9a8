//! Tab-separated edge lists.
//!
//! Every file is UTF-8 with one record per line; lines starting with `#` are
//! skipped. Edge files carry two ids and an optional positive weight that
//! defaults to 1. The vocabulary file maps each attribute value to its type.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{AttributeVocabulary, NetworkBuilder, SbaNetwork};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub line: usize,
    pub source: String,
    pub target: String,
    pub weight: f64,
}

fn records(path: &Path, min_fields: usize, max_fields: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let file = File::open(path).map_err(|e| Error::Parse { path: path.to_owned(), line: 0, message: e.to_string() })?;
    let mut out = Vec::new();
    for (i, text) in BufReader::new(file).lines().enumerate() {
        let line = i + 1;
        let text = text.map_err(|e| Error::Parse { path: path.to_owned(), line, message: e.to_string() })?;
        let text = text.trim_end_matches('\r');
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = text.split('\t').map(str::to_owned).collect();
        if fields.len() < min_fields || fields.len() > max_fields {
            let expected =
                if min_fields == max_fields { min_fields.to_string() } else { format!("{min_fields} or {max_fields}") };
            return Err(Error::Parse {
                path: path.to_owned(),
                line,
                message: format!("expected {expected} tab-separated fields, found {}", fields.len()),
            });
        }
        out.push((line, fields));
    }
    Ok(out)
}

pub fn read_edges(path: &Path) -> Result<Vec<EdgeRecord>> {
    records(path, 2, 3)?
        .into_iter()
        .map(|(line, mut fields)| {
            let weight = match fields.get(2) {
                Some(w) => w.trim().parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_owned(),
                    line,
                    message: format!("weight `{w}` is not a number"),
                })?,
                None => 1.0,
            };
            fields.truncate(2);
            let target = fields.pop().unwrap_or_default();
            let source = fields.pop().unwrap_or_default();
            Ok(EdgeRecord { line, source, target, weight })
        })
        .collect()
}

pub fn read_vocab(path: &Path) -> Result<Vec<(String, String)>> {
    Ok(records(path, 2, 2)?.into_iter().map(|(_, f)| (f[0].clone(), f[1].clone())).collect())
}

/// Locations of the four input files.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkPaths {
    pub social: PathBuf,
    pub behavior: PathBuf,
    pub attribute: PathBuf,
    pub vocab: PathBuf,
}

impl NetworkPaths {
    /// `social.tsv`, `behavior.tsv`, `attribute.tsv` and `vocab.tsv` in `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        NetworkPaths {
            social: dir.join("social.tsv"),
            behavior: dir.join("behavior.tsv"),
            attribute: dir.join("attribute.tsv"),
            vocab: dir.join("vocab.tsv"),
        }
    }
}

fn at(path: &Path, line: usize) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::Parse { path: path.to_owned(), line, message: e.to_string() }
}

/// Parsed network plus warnings about empty inputs.
pub fn load_network(paths: &NetworkPaths) -> Result<(SbaNetwork, Vec<String>)> {
    let mut vocab = AttributeVocabulary::default();
    for (line, fields) in records(&paths.vocab, 2, 2)? {
        vocab.insert(&fields[0], &fields[1]).map_err(at(&paths.vocab, line))?;
    }
    let mut b = NetworkBuilder::new(vocab);
    let mut warnings = Vec::new();
    type Add = fn(&mut NetworkBuilder, &str, &str, f64) -> Result<()>;
    let files: [(&Path, &str, Add); 3] = [
        (&paths.social, "social", NetworkBuilder::add_social),
        (&paths.behavior, "behavior", NetworkBuilder::add_behavior),
        (&paths.attribute, "attribute", NetworkBuilder::add_attribute),
    ];
    for (path, what, add) in files {
        let edges = read_edges(path)?;
        if edges.is_empty() {
            warnings.push(format!("{} has no {what} links", path.display()));
        }
        for e in edges {
            add(&mut b, &e.source, &e.target, e.weight).map_err(at(path, e.line))?;
        }
    }
    Ok((b.build(), warnings))
}

/// Writes an edge list, omitting weights equal to 1.
pub fn write_edges<'a>(path: &Path, edges: impl IntoIterator<Item = (&'a str, &'a str, f64)>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (a, b, weight) in edges {
        if weight == 1.0 {
            writeln!(w, "{a}\t{b}")?;
        } else {
            writeln!(w, "{a}\t{b}\t{weight}")?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the network back out in the four-file layout.
pub fn write_network(network: &SbaNetwork, paths: &NetworkPaths) -> Result<()> {
    let users = network.users();
    let social = (0..network.n_social()).flat_map(|u| {
        network.social_adj().row(u).filter(move |&(v, _)| u < v).map(move |(v, w)| (users.name(u), users.name(v), w))
    });
    write_edges(&paths.social, social)?;
    let behavior = (0..network.n_social())
        .flat_map(|u| network.behavior_adj().row(u).map(move |(y, w)| (users.name(u), network.items().name(y), w)));
    write_edges(&paths.behavior, behavior)?;
    let vocab = network.vocab();
    let attribute = (0..network.n_social())
        .flat_map(|u| network.attribute_adj().row(u).map(move |(a, w)| (users.name(u), vocab.value_name(a), w)));
    write_edges(&paths.attribute, attribute)?;
    let pairs = (0..vocab.n_values()).map(|a| (vocab.value_name(a), vocab.type_name(vocab.type_of(a)), 1.0));
    write_edges(&paths.vocab, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn parses_comments_and_weights() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.tsv", "# header\nu1\tu2\n\nu2\tu3\t2.5\n");
        let e = read_edges(&p).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[1].source.as_str(), e[1].target.as_str(), e[1].weight, e[1].line), ("u2", "u3", 2.5, 4));
    }

    #[test]
    fn malformed_line_names_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.tsv", "u1\tu2\nu3\n");
        let err = read_edges(&p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("s.tsv:2:"));
        let p = write(dir.path(), "w.tsv", "u1\tu2\tabc\n");
        assert!(matches!(read_edges(&p), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn builder_errors_carry_location() {
        let dir = tempfile::tempdir().unwrap();
        let paths = NetworkPaths::in_dir(dir.path());
        write(dir.path(), "vocab.tsv", "a1\tcity\n");
        write(dir.path(), "social.tsv", "u1\tu2\n");
        write(dir.path(), "behavior.tsv", "");
        write(dir.path(), "attribute.tsv", "u1\ta1\nu2\tzz\n");
        let err = load_network(&paths).unwrap_err();
        assert!(err.to_string().contains("attribute.tsv:2:"), "{err}");
        write(dir.path(), "attribute.tsv", "u1\ta1\n");
        let (net, warnings) = load_network(&paths).unwrap();
        assert_eq!(net.n_behavior(), 0);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let paths = NetworkPaths::in_dir(dir.path());
        let net = fixtures::sab();
        write_network(&net, &paths).unwrap();
        let (back, _) = load_network(&paths).unwrap();
        assert_eq!(back, net);
    }
}
