//! Line-oriented text archives for spaces and eigensystems.
//!
//! ```text
//! QSEM 1 space
//! vocab <n>
//! <n words, one per line, in index order>
//! provenance global | provenance centered <word> <radius>
//! entries <count>
//! <row> <col> <weight>      (row <= col, strictly increasing row-major)
//! ```
//!
//! Eigensystems (`QSEM 1 eigen`) share the vocabulary and provenance blocks
//! and continue with `dim <n>`, `support <m>` followed by `m` ambient
//! indices, and `pairs <k>` followed by one line per pair: the eigenvalue
//! and the `m` support components, each as the 16 hex digits of its IEEE-754
//! bit pattern. Lines end in LF; integers are base 10.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::space::{Provenance, SemanticSpace, SparseMatrix, Vocabulary};
use crate::spectral::EigenSystem;
use crate::{Error, Result};

const MAGIC: &str = "QSEM";
const VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchiveKind {
    Space,
    Eigen,
}

impl ArchiveKind {
    fn tag(self) -> &'static str {
        match self {
            ArchiveKind::Space => "space",
            ArchiveKind::Eigen => "eigen",
        }
    }
}

/// Header-level summary of an archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveInfo {
    pub kind: ArchiveKind,
    pub vocabulary_size: usize,
    pub provenance: Provenance,
    /// Stored triples for spaces, eigenpairs for eigensystems.
    pub records: usize,
}

fn write_header(out: &mut String, kind: ArchiveKind, vocab: Option<&Vocabulary>, provenance: &Provenance) {
    writeln!(out, "{MAGIC} {VERSION} {}", kind.tag()).unwrap();
    let words = vocab.map_or(&[][..], |v| v.words());
    writeln!(out, "vocab {}", words.len()).unwrap();
    for w in words {
        writeln!(out, "{w}").unwrap();
    }
    writeln!(out, "provenance {provenance}").unwrap();
}

/// Canonical archive text of a space. Equal spaces give equal bytes.
pub fn encode_space(space: &SemanticSpace) -> String {
    let mut out = String::new();
    write_header(
        &mut out,
        ArchiveKind::Space,
        Some(space.vocabulary()),
        space.provenance(),
    );
    let upper: Vec<(usize, usize, u64)> = space.matrix().iter().filter(|&(r, c, _)| r <= c).collect();
    writeln!(out, "entries {}", upper.len()).unwrap();
    for (r, c, w) in upper {
        writeln!(out, "{r} {c} {w}").unwrap();
    }
    out
}

pub fn encode_eigen(es: &EigenSystem) -> String {
    let mut out = String::new();
    write_header(
        &mut out,
        ArchiveKind::Eigen,
        es.vocabulary().map(Arc::as_ref),
        es.provenance(),
    );
    writeln!(out, "dim {}", es.dim()).unwrap();
    writeln!(out, "support {}", es.support().len()).unwrap();
    for a in es.support() {
        writeln!(out, "{a}").unwrap();
    }
    writeln!(out, "pairs {}", es.len()).unwrap();
    for i in 0..es.len() {
        write!(out, "{:016x}", es.eigenvalues()[i].to_bits()).unwrap();
        for x in es.support_vectors().column(i).iter() {
            write!(out, " {:016x}", x.to_bits()).unwrap();
        }
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn save_space(space: &SemanticSpace, path: &Path) -> Result<()> {
    write_file(path, &encode_space(space))
}

pub fn load_space(path: &Path) -> Result<SemanticSpace> {
    decode_space(&read_file(path)?)
}

pub fn save_eigen(es: &EigenSystem, path: &Path) -> Result<()> {
    write_file(path, &encode_eigen(es))
}

pub fn load_eigen(path: &Path) -> Result<EigenSystem> {
    decode_eigen(&read_file(path)?)
}

pub fn archive_info(path: &Path) -> Result<ArchiveInfo> {
    let text = read_file(path)?;
    let mut reader = Reader::new(&text)?;
    let kind = reader.magic()?;
    let vocab = reader.vocabulary()?;
    let provenance = reader.provenance()?;
    let records = match kind {
        ArchiveKind::Space => {
            let space = decode_space(&text)?;
            space.matrix().iter().filter(|&(r, c, _)| r <= c).count()
        }
        ArchiveKind::Eigen => decode_eigen(&text)?.len(),
    };
    Ok(ArchiveInfo {
        kind,
        vocabulary_size: vocab.len(),
        provenance,
        records,
    })
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    next: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Result<Self> {
        let mut lines: Vec<&str> = text.split('\n').collect();
        // A complete archive ends with LF, leaving one empty trailing piece.
        if lines.pop() != Some("") {
            return Err(Error::Corruption {
                line: lines.len() + 1,
                message: "archive is truncated (missing final newline)".into(),
            });
        }
        Ok(Self { lines, next: 0 })
    }

    /// 1-based number of the line most recently returned.
    fn line_no(&self) -> usize {
        self.next
    }

    fn line(&mut self) -> Result<&'a str> {
        let line = self.lines.get(self.next).copied().ok_or_else(|| Error::Corruption {
            line: self.next + 1,
            message: "unexpected end of archive".into(),
        })?;
        self.next += 1;
        Ok(line)
    }

    fn corrupt(&self, message: impl Into<String>) -> Error {
        Error::Corruption {
            line: self.line_no(),
            message: message.into(),
        }
    }

    fn magic(&mut self) -> Result<ArchiveKind> {
        let line = self.line()?;
        let parts: Vec<&str> = line.split(' ').collect();
        let format = |message: String| Error::Format { line: 1, message };
        if parts.len() != 3 || parts[0] != MAGIC {
            return Err(format(format!("bad magic {line:?}")));
        }
        if parts[1] != VERSION {
            return Err(format(format!("unsupported version {:?}", parts[1])));
        }
        match parts[2] {
            "space" => Ok(ArchiveKind::Space),
            "eigen" => Ok(ArchiveKind::Eigen),
            other => Err(format(format!("unknown archive kind {other:?}"))),
        }
    }

    fn keyword_count(&mut self, keyword: &str) -> Result<usize> {
        let line = self.line()?;
        let value = line
            .strip_prefix(keyword)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.corrupt(format!("expected `{keyword} <count>`, found {line:?}")))?;
        self.uint(value).map(|v| v as usize)
    }

    fn uint(&self, s: &str) -> Result<u64> {
        let canonical = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
        if !canonical {
            return Err(self.corrupt(format!("{s:?} is not a canonical base-10 integer")));
        }
        s.parse().map_err(|_| self.corrupt(format!("{s:?} is out of range")))
    }

    fn hex(&self, s: &str) -> Result<f64> {
        if s.len() != 16 || !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(self.corrupt(format!("{s:?} is not a 16-digit hex float")));
        }
        Ok(f64::from_bits(u64::from_str_radix(s, 16).expect("validated hex")))
    }

    fn vocabulary(&mut self) -> Result<Vocabulary> {
        let n = self.keyword_count("vocab")?;
        let mut words = Vec::with_capacity(n);
        for _ in 0..n {
            words.push(self.line()?);
        }
        Vocabulary::from_words(words.iter().map(|w| w.to_string())).map_err(|e| self.corrupt(e.to_string()))
    }

    fn provenance(&mut self) -> Result<Provenance> {
        let line = self.line()?;
        let parts: Vec<&str> = line.split(' ').collect();
        match parts.as_slice() {
            ["provenance", "global"] => Ok(Provenance::Global),
            ["provenance", "centered", word, radius] if !word.is_empty() => Ok(Provenance::Centered {
                word: word.to_string(),
                radius: self.uint(radius)? as usize,
            }),
            _ => Err(self.corrupt(format!("bad provenance line {line:?}"))),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.next < self.lines.len() {
            self.next += 1;
            return Err(self.corrupt("trailing content after the last record"));
        }
        Ok(())
    }
}

pub fn decode_space(text: &str) -> Result<SemanticSpace> {
    let mut r = Reader::new(text)?;
    if r.magic()? != ArchiveKind::Space {
        return Err(Error::Format {
            line: 1,
            message: "expected a space archive".into(),
        });
    }
    let vocab = r.vocabulary()?;
    let provenance = r.provenance()?;
    let count = r.keyword_count("entries")?;
    let n = vocab.len();
    let mut triplets = Vec::with_capacity(2 * count);
    let mut previous: Option<(u64, u64)> = None;
    for _ in 0..count {
        let line = r.line()?;
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != 3 {
            return Err(r.corrupt(format!("expected `<row> <col> <weight>`, found {line:?}")));
        }
        let (row, col, weight) = (r.uint(fields[0])?, r.uint(fields[1])?, r.uint(fields[2])?);
        if row > col {
            return Err(r.corrupt("entry below the diagonal"));
        }
        if col as usize >= n {
            return Err(r.corrupt(format!("index {col} outside vocabulary of {n}")));
        }
        if weight == 0 {
            return Err(r.corrupt("zero weight stored"));
        }
        if previous.is_some_and(|p| p >= (row, col)) {
            return Err(r.corrupt("entries out of canonical order"));
        }
        previous = Some((row, col));
        triplets.push((row as u32, col as u32, weight));
        if row != col {
            triplets.push((col as u32, row as u32, weight));
        }
    }
    r.finish()?;
    let matrix = SparseMatrix::from_triplets(n, triplets)?;
    SemanticSpace::new(Arc::new(vocab), matrix, provenance)
}

pub fn decode_eigen(text: &str) -> Result<EigenSystem> {
    let mut r = Reader::new(text)?;
    if r.magic()? != ArchiveKind::Eigen {
        return Err(Error::Format {
            line: 1,
            message: "expected an eigen archive".into(),
        });
    }
    let vocab = r.vocabulary()?;
    let provenance = r.provenance()?;
    let dim = r.keyword_count("dim")?;
    if !vocab.is_empty() && vocab.len() != dim {
        return Err(r.corrupt(format!("dimension {dim} does not match vocabulary of {}", vocab.len())));
    }
    let m = r.keyword_count("support")?;
    let mut support = Vec::with_capacity(m);
    for _ in 0..m {
        let line = r.line()?;
        let a = r.uint(line)? as usize;
        if a >= dim || support.last().is_some_and(|&p| p >= a) {
            return Err(r.corrupt(format!("support index {a} out of order or range")));
        }
        support.push(a);
    }
    let k = r.keyword_count("pairs")?;
    let mut values = Vec::with_capacity(k);
    let mut vectors = DMatrix::<f64>::zeros(m, k);
    for i in 0..k {
        let line = r.line()?;
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != m + 1 {
            return Err(r.corrupt(format!("expected {} values, found {}", m + 1, fields.len())));
        }
        values.push(r.hex(fields[0])?);
        for (s, f) in fields[1..].iter().enumerate() {
            vectors[(s, i)] = r.hex(f)?;
        }
    }
    r.finish()?;
    if values.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Corruption {
            line: r.line_no(),
            message: "eigenvalues are not in descending order".into(),
        });
    }
    let vocab = (!vocab.is_empty()).then(|| Arc::new(vocab));
    Ok(EigenSystem {
        dim,
        support,
        values,
        vectors,
        vocab,
        provenance,
    })
}
