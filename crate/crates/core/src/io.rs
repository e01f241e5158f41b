//! Reading and writing streams as plain-text edge lists.
//!
//! One record per line, `i j weight timestamp`. Lines starting with `%` or
//! `#` are comments. Paths ending in `.gz` are gzip-compressed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::stream::{Sgr, StreamLog, VertexId, MAX_WEIGHT, MIN_WEIGHT};

/// How vertex tokens in a file become vertex ids.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum IdMode {
    /// Any token; numbered densely per partition by first appearance.
    #[default]
    Remap,
    /// Tokens must be `u32` and are used as-is.
    Verbatim,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Round fractional ratings and lift 0 to 1 instead of rejecting them.
    pub rescale: bool,
    pub ids: IdMode,
}

/// A parsed stream plus the external token of every vertex id, indexed by id.
/// The token lists are empty under [`IdMode::Verbatim`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub stream: StreamLog,
    pub i_tokens: Vec<String>,
    pub j_tokens: Vec<String>,
}

#[derive(Default)]
struct Interner {
    ids: FxHashMap<String, VertexId>,
    tokens: Vec<String>,
}

impl Interner {
    fn intern(&mut self, tok: &str) -> VertexId {
        if let Some(&id) = self.ids.get(tok) {
            return id;
        }
        let id = self.tokens.len() as VertexId;
        self.ids.insert(tok.to_owned(), id);
        self.tokens.push(tok.to_owned());
        id
    }
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

fn parse_weight(tok: &str, line: usize, rescale: bool) -> Result<u8> {
    let bad_range = |shown: &str| Error::Validation {
        line,
        msg: format!(
            "weight {shown} outside {MIN_WEIGHT}..={MAX_WEIGHT} (use rescaling for fractional or zero ratings)"
        ),
    };
    if !rescale {
        let w: i64 = tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("weight {tok:?} is not an integer"),
        })?;
        return u8::try_from(w)
            .ok()
            .filter(|w| (MIN_WEIGHT..=MAX_WEIGHT).contains(w))
            .ok_or_else(|| bad_range(tok));
    }
    let raw: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("weight {tok:?} is not a number"),
    })?;
    if !raw.is_finite() {
        return Err(bad_range(tok));
    }
    let rounded = raw.round().max(f64::from(MIN_WEIGHT));
    if rounded > f64::from(MAX_WEIGHT) || raw < 0.0 {
        return Err(bad_range(tok));
    }
    Ok(rounded as u8)
}

/// Parses a stream from any reader. Line numbers in errors are 1-based.
pub fn parse_stream<R: BufRead>(reader: R, opts: ReadOptions) -> Result<Dataset> {
    parse_from(reader, opts, Path::new("<input>"))
}

fn parse_from<R: BufRead>(reader: R, opts: ReadOptions, path: &Path) -> Result<Dataset> {
    let mut stream = StreamLog::new();
    let (mut is, mut js) = (Interner::default(), Interner::default());
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('%') || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 fields `i j weight timestamp`, found {}", fields.len()),
            });
        }
        let (i, j) = match opts.ids {
            IdMode::Remap => (is.intern(fields[0]), js.intern(fields[1])),
            IdMode::Verbatim => {
                let id = |tok: &str| {
                    tok.parse::<VertexId>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("vertex id {tok:?} is not a u32"),
                    })
                };
                (id(fields[0])?, id(fields[1])?)
            }
        };
        let weight = parse_weight(fields[2], line_no, opts.rescale)?;
        let timestamp: u64 = fields[3].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("timestamp {:?} is not a non-negative integer", fields[3]),
        })?;
        stream.push(Sgr::new(i, j, weight, timestamp));
    }
    Ok(Dataset {
        stream,
        i_tokens: is.tokens,
        j_tokens: js.tokens,
    })
}

pub fn read_dataset(path: impl AsRef<Path>, opts: ReadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn Read> = if is_gz(path) {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    parse_from(BufReader::new(reader), opts, path)
}

/// Reads a stream with remapped ids and strict weights.
pub fn read_stream(path: impl AsRef<Path>) -> Result<StreamLog> {
    Ok(read_dataset(path, ReadOptions::default())?.stream)
}

pub fn write_records<W: Write>(stream: &StreamLog, mut w: W) -> std::io::Result<()> {
    for r in stream {
        writeln!(w, "{} {} {} {}", r.i, r.j, r.weight, r.timestamp)?;
    }
    w.flush()
}

pub fn write_stream(stream: &StreamLog, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let res = if is_gz(path) {
        let mut enc = GzEncoder::new(BufWriter::new(file), Compression::default());
        write_records(stream, &mut enc).and_then(|_| enc.finish().and_then(|mut w| w.flush()))
    } else {
        write_records(stream, BufWriter::new(file))
    };
    res.map_err(|e| Error::io(path, e))
}
