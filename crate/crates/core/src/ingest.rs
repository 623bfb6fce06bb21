//! Element-structure ingestion of XML documents and the corpus statistics
//! report.

use std::fmt::Write as _;
use std::fs;
use std::io::BufRead;
use std::path::Path;

use num_rational::Ratio;
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::hybrid::bounds::Sizes;
use crate::label::Label;
use crate::slt::{build_compressed_dag, eliminate_helpers, to_one_slt};
use crate::tree::{TreeBuilder, UnrankedTree};

fn xml_error(offset: u64, message: impl Into<String>) -> Error {
    Error::Xml {
        offset,
        message: message.into(),
    }
}

/// Reads the tree of element nodes; text, attributes, comments and
/// processing instructions are skipped. Document type declarations are
/// rejected, so no entity is ever expanded.
pub fn ingest_reader<R: BufRead>(input: R) -> Result<UnrankedTree> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().check_end_names = true;
    let mut builder = TreeBuilder::new();
    let mut buf = Vec::new();
    let mut closed_root = false;
    loop {
        let at = reader.buffer_position();
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_error(reader.error_position(), e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                if closed_root {
                    return Err(xml_error(at, "more than one root element"));
                }
                let name = e.name().into_inner().to_string();
                let label = Label::new(&name).map_err(|_| xml_error(at, format!("unusable element name {name:?}")))?;
                builder.open(label);
                if matches!(event, Event::Empty(_)) {
                    builder.close();
                    closed_root = builder.depth() == 0;
                }
            }
            Event::End(_) => {
                if !builder.close() {
                    return Err(xml_error(at, "unmatched end tag"));
                }
                closed_root = builder.depth() == 0;
            }
            Event::DocType(_) => return Err(xml_error(at, "document type declarations are not supported")),
            Event::Text(ref t) if builder.depth() == 0 => {
                if !t.trim().is_empty() {
                    return Err(xml_error(at, "text outside the root element"));
                }
            }
            Event::CData(_) | Event::GeneralRef(_) if builder.depth() == 0 => {
                return Err(xml_error(at, "content outside the root element"));
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if builder.depth() > 0 {
        return Err(xml_error(reader.buffer_position(), "unclosed element"));
    }
    if builder.roots() == 0 {
        return Err(Error::EmptyInput);
    }
    builder.finish()
}

pub fn ingest_xml(bytes: &[u8]) -> Result<UnrankedTree> {
    ingest_reader(bytes)
}

pub fn ingest_file(path: &Path) -> Result<UnrankedTree> {
    let file = fs::File::open(path)?;
    ingest_reader(std::io::BufReader::new(file))
}

/// Characteristics and compressed sizes (in edges) of one document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocumentStats {
    pub edges: usize,
    pub max_depth: usize,
    /// Nodes with at least one child.
    pub internal: usize,
    pub max_children: usize,
    pub dag: usize,
    pub bdag: usize,
    pub rbdag: usize,
    pub hdag: usize,
    pub rhdag: usize,
    pub ds: usize,
    pub slt8: usize,
    pub notices: Vec<String>,
}

impl DocumentStats {
    /// Average number of children of a node with children.
    pub fn avg_children(&self) -> Ratio<usize> {
        if self.internal == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.edges, self.internal)
        }
    }

    /// Relations the sizes must satisfy; an empty list means all hold.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |ok: bool, what: &str| {
            if !ok {
                out.push(what.to_string());
            }
        };
        check(self.hdag <= self.dag.min(self.bdag), "hdag <= min(dag, bdag)");
        check(self.rhdag <= self.dag.min(self.rbdag), "rhdag <= min(dag, rbdag)");
        check(self.bdag <= 2 * self.hdag || self.edges == 0, "bdag <= 2 hdag");
        check(self.ds <= self.dag, "ds <= dag");
        out
    }
}

/// Rounds half up to one fractional digit.
pub fn one_decimal(r: Ratio<usize>) -> String {
    let tenths = (20 * r.numer() + r.denom()) / (2 * r.denom());
    format!("{}.{}", tenths / 10, tenths % 10)
}

pub fn stats(t: &UnrankedTree) -> DocumentStats {
    let sizes = Sizes::of(t);
    let ds = build_compressed_dag(t);
    let slt8 = eliminate_helpers(&to_one_slt(&ds)).size();
    let mut notices = Vec::new();
    if t.edges() == 0 {
        notices.push("single-node document: hybrid dags are empty".to_string());
    }
    DocumentStats {
        edges: t.edges(),
        max_depth: t.height(),
        internal: (0..t.len() as u32).filter(|&v| t.arity(v) > 0).count(),
        max_children: t.max_children(),
        dag: sizes.dag,
        bdag: sizes.bdag,
        rbdag: sizes.rbdag,
        hdag: sizes.hdag,
        rhdag: sizes.rhdag,
        ds: ds.size(),
        slt8,
        notices,
    }
}

pub const REPORT_HEADER: &str = "file\tedges\tmD\taC\tmC\tdag\tbdag\trbdag\thdag\trhdag\tds\tslt8";

fn row(name: &str, s: &DocumentStats) -> String {
    format!(
        "{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        s.edges,
        s.max_depth,
        one_decimal(s.avg_children()),
        s.max_children,
        s.dag,
        s.bdag,
        s.rbdag,
        s.hdag,
        s.rhdag,
        s.ds,
        s.slt8
    )
}

/// Documents must have more than `min_edges` edges and depth at least
/// `min_depth` to be reported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CorpusFilter {
    pub min_edges: usize,
    pub min_depth: usize,
}

impl CorpusFilter {
    fn accepts(&self, s: &DocumentStats) -> bool {
        (self.min_edges == 0 || s.edges > self.min_edges) && s.max_depth >= self.min_depth
    }
}

/// One row per accepted `.xml` file, in file name order, followed by an
/// `accumulated` row: sums of edges and sizes, maxima of mD and mC, and the
/// overall children average. Unreadable or ill-formed files become
/// comment lines.
pub fn run_corpus(dir: &Path, filter: CorpusFilter) -> Result<String> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("xml")))
        .collect();
    files.sort();
    let mut out = String::new();
    let mut notes = String::new();
    writeln!(out, "{REPORT_HEADER}").unwrap();
    let mut total = DocumentStats {
        edges: 0,
        max_depth: 0,
        internal: 0,
        max_children: 0,
        dag: 0,
        bdag: 0,
        rbdag: 0,
        hdag: 0,
        rhdag: 0,
        ds: 0,
        slt8: 0,
        notices: Vec::new(),
    };
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let tree = match ingest_file(&path) {
            Ok(t) => t,
            Err(e) => {
                writeln!(notes, "# failed\t{name}\t{e}").unwrap();
                continue;
            }
        };
        let s = stats(&tree);
        let bad = s.violations();
        if !bad.is_empty() {
            return Err(Error::Invariant(format!("{name}: {}", bad.join(", "))));
        }
        if !filter.accepts(&s) {
            continue;
        }
        writeln!(out, "{}", row(&name, &s)).unwrap();
        total.edges += s.edges;
        total.max_depth = total.max_depth.max(s.max_depth);
        total.internal += s.internal;
        total.max_children = total.max_children.max(s.max_children);
        total.dag += s.dag;
        total.bdag += s.bdag;
        total.rbdag += s.rbdag;
        total.hdag += s.hdag;
        total.rhdag += s.rhdag;
        total.ds += s.ds;
        total.slt8 += s.slt8;
    }
    writeln!(out, "{}", row("accumulated", &total)).unwrap();
    out.push_str(&notes);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::minimize_binary;
    use crate::encode::fcns;
    use crate::tree::parse_term;

    #[test]
    fn elements_only() {
        let t = ingest_xml(b"<a><b/><b/></a>").unwrap();
        assert_eq!(t.to_string(), "a(b,b)");
        let t = ingest_xml(b"<?xml version=\"1.0\"?>\n<!-- c --><a x=\"1\">hi<b/>&amp;</a>\n").unwrap();
        assert_eq!(t.to_string(), "a(b)");
        let t = ingest_xml(b"<ns:a><ns:b></ns:b></ns:a>").unwrap();
        assert_eq!(t.to_string(), "ns:a(ns:b)");
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            &b"<a><b></a>"[..],
            b"<a>",
            b"<a/><b/>",
            b"</a>",
            b"text",
            b"<!DOCTYPE a [<!ENTITY x \"y\">]><a>&x;</a>",
        ] {
            assert!(matches!(ingest_xml(bad), Err(Error::Xml { .. })), "{}", String::from_utf8_lossy(bad));
        }
        assert_eq!(ingest_xml(b"  "), Err(Error::EmptyInput));
        assert_eq!(ingest_xml(b""), Err(Error::EmptyInput));
    }

    #[test]
    fn sample_stats() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        let s = stats(&t);
        assert_eq!((s.edges, s.dag, s.bdag, s.hdag), (9, 6, 6, 5));
        // the inner f's child chain ends in □ while the root's continues, so
        // the lcps chains cannot be shared: rbdag(t) = bdag(mirror(t)) = 9
        let mirrored = minimize_binary(&fcns(&[t.mirror()])).edges();
        assert_eq!((s.rbdag, mirrored), (9, 9));
        assert_eq!((s.max_depth, s.max_children, s.internal), (3, 3, 6));
        assert_eq!(one_decimal(s.avg_children()), "1.5");
        assert!(s.violations().is_empty());
    }

    #[test]
    fn shared_prefix_stats() {
        let s = stats(&parse_term("f(f(a,a,b),f(a,a,c))").unwrap());
        assert_eq!((s.dag, s.bdag, s.hdag, s.rbdag), (8, 8, 8, 7));
    }

    #[test]
    fn single_element() {
        let s = stats(&ingest_xml(b"<a/>").unwrap());
        assert_eq!((s.edges, s.dag, s.bdag, s.hdag, s.ds, s.slt8), (0, 0, 0, 0, 0, 0));
        assert_eq!(s.notices.len(), 1);
        assert_eq!(one_decimal(s.avg_children()), "0.0");
    }

    #[test]
    fn decimals() {
        assert_eq!(one_decimal(Ratio::new(1, 4)), "0.3");
        assert_eq!(one_decimal(Ratio::new(224, 10)), "22.4");
        assert_eq!(one_decimal(Ratio::new(3, 1)), "3.0");
    }
}
