//! Reading and writing CoNLL-U treebanks.
//!
//! Word lines become [`Token`]s. Multiword range lines (`1-2`) and empty
//! nodes (`3.1`) are kept verbatim so that emitting a parsed file gives
//! back the same bytes, but they never take part in lemmatization.

use std::fmt::{self, Write as _};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Placeholder for absent fields.
pub const ABSENT: &str = "_";

/// Morphological features as `(category, value)` pairs, strictly sorted by
/// category.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Features(Vec<(String, String)>);

impl Features {
    pub fn new() -> Self {
        Features(Vec::new())
    }

    /// Build from pairs in any order. Fails on a repeated category.
    pub fn from_pairs<I, C, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (C, V)>,
        C: Into<String>,
        V: Into<String>,
    {
        let mut pairs: Vec<(String, String)> = pairs
            .into_iter()
            .map(|(c, v)| (c.into(), v.into()))
            .collect();
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid(format!(
                    "duplicate feature category {:?}",
                    w[0].0
                )));
            }
        }
        Ok(Features(pairs))
    }

    /// Parse a FEATS column (`A=x|B=y` or `_`).
    pub fn parse(column: &str) -> Result<Self> {
        if column == ABSENT || column.is_empty() {
            return Ok(Features::new());
        }
        let mut pairs = Vec::new();
        for item in column.split('|') {
            let (cat, val) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("feature {item:?} has no '='")))?;
            pairs.push((cat, val));
        }
        Features::from_pairs(pairs)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(c, v)| (c.as_str(), v.as_str()))
    }

    pub fn get(&self, category: &str) -> Option<&str> {
        self.0
            .binary_search_by(|(c, _)| c.as_str().cmp(category))
            .ok()
            .map(|i| self.0[i].1.as_str())
    }

    /// The FEATS column text: pairs joined with `|`, or `_` when empty.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(ABSENT);
        }
        for (i, (c, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char('|')?;
            }
            write!(f, "{c}={v}")?;
        }
        Ok(())
    }
}

/// One syntactic word row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: Option<String>,
    pub upos: Option<String>,
    pub xpos: Option<String>,
    pub feats: Features,
    /// HEAD, DEPREL, DEPS and MISC, kept verbatim.
    pub rest: [String; 4],
}

impl Token {
    pub fn new(id: usize, form: impl Into<String>) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: None,
            upos: None,
            xpos: None,
            feats: Features::new(),
            rest: std::array::from_fn(|_| ABSENT.to_owned()),
        }
    }

    pub fn with_lemma(mut self, lemma: impl Into<String>) -> Self {
        self.lemma = Some(lemma.into());
        self
    }

    pub fn with_upos(mut self, upos: impl Into<String>) -> Self {
        self.upos = Some(upos.into());
        self
    }

    pub fn with_xpos(mut self, xpos: impl Into<String>) -> Self {
        self.xpos = Some(xpos.into());
        self
    }

    pub fn with_feats(mut self, feats: Features) -> Self {
        self.feats = feats;
        self
    }

    /// The tag triple as one string, `UPOS XPOS FEATS` with `_` for absent
    /// columns.
    pub fn tag_string(&self) -> String {
        format!(
            "{} {} {}",
            self.upos.as_deref().unwrap_or(ABSENT),
            self.xpos.as_deref().unwrap_or(ABSENT),
            self.feats
        )
    }

    fn write_row(&self, out: &mut String) {
        let opt = |s: &Option<String>| s.clone().unwrap_or_else(|| ABSENT.to_owned());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            self.form,
            opt(&self.lemma),
            opt(&self.upos),
            opt(&self.xpos),
            self.feats,
            self.rest[0],
            self.rest[1],
            self.rest[2],
            self.rest[3]
        );
    }
}

/// A multiword token range line such as `1-2\tdel\t_...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiwordToken {
    pub start: usize,
    pub end: usize,
    pub form: String,
    /// The full original line, emitted as is.
    pub line: String,
}

/// An empty node line (`3.1`), emitted after word `after`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptyNode {
    pub after: usize,
    pub line: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
    pub multiwords: Vec<MultiwordToken>,
    pub empty_nodes: Vec<EmptyNode>,
}

impl Sentence {
    /// A sentence from tokens; ids are renumbered 1..n.
    pub fn from_tokens(tokens: Vec<Token>) -> Self {
        let tokens = tokens
            .into_iter()
            .enumerate()
            .map(|(i, mut t)| {
                t.id = i + 1;
                t
            })
            .collect();
        Sentence {
            tokens,
            ..Default::default()
        }
    }

    fn write(&self, out: &mut String) {
        for c in &self.comments {
            out.push_str(c);
            out.push('\n');
        }
        let mut multi = self.multiwords.iter().peekable();
        let mut empty = self.empty_nodes.iter().peekable();
        while let Some(e) = empty.next_if(|e| e.after == 0) {
            out.push_str(&e.line);
            out.push('\n');
        }
        for token in &self.tokens {
            while let Some(m) = multi.next_if(|m| m.start <= token.id) {
                out.push_str(&m.line);
                out.push('\n');
            }
            token.write_row(out);
            while let Some(e) = empty.next_if(|e| e.after <= token.id) {
                out.push_str(&e.line);
                out.push('\n');
            }
        }
        for m in multi {
            out.push_str(&m.line);
            out.push('\n');
        }
        for e in empty {
            out.push_str(&e.line);
            out.push('\n');
        }
        out.push('\n');
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Treebank {
    pub name: String,
    pub sentences: Vec<Sentence>,
}

impl Treebank {
    pub fn new(name: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        Treebank {
            name: name.into(),
            sentences,
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn tokens_mut(&mut self) -> impl Iterator<Item = &mut Token> {
        self.sentences.iter_mut().flat_map(|s| s.tokens.iter_mut())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Every token's lemma, failing on the first absent one.
    pub fn require_lemmas(&self) -> Result<()> {
        for (si, s) in self.sentences.iter().enumerate() {
            for t in &s.tokens {
                if t.lemma.is_none() {
                    return Err(Error::MissingLemma {
                        sentence: si + 1,
                        token: t.id,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parse CoNLL-U text.
pub fn parse_conllu(text: &str, source_name: &str) -> Result<Treebank> {
    let mut sentences = Vec::new();
    let mut current = Sentence::default();
    let mut open = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            if open {
                sentences.push(std::mem::take(&mut current));
                open = false;
            }
            continue;
        }
        open = true;
        if line.starts_with('#') {
            current.comments.push(line.to_owned());
            continue;
        }
        parse_line(line, &mut current).map_err(|e| match e {
            Error::Invalid(message) => Error::parse(source_name, lineno, message),
            other => other,
        })?;
    }
    if open {
        sentences.push(current);
    }
    Ok(Treebank::new(source_name, sentences))
}

/// Parse CoNLL-U from a reader.
pub fn read_conllu<R: BufRead>(mut reader: R, source_name: &str) -> Result<Treebank> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_conllu(&text, source_name)
}

pub fn read_conllu_file(path: impl AsRef<std::path::Path>) -> Result<Treebank> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_conllu(&text, &path.display().to_string())
}

fn parse_line(line: &str, sentence: &mut Sentence) -> Result<()> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(Error::invalid(format!(
            "expected 10 tab-separated columns, found {}",
            cols.len()
        )));
    }
    let id = cols[0];
    if let Some((start, end)) = id.split_once('-') {
        let start = parse_id(start)?;
        let end = parse_id(end)?;
        sentence.multiwords.push(MultiwordToken {
            start,
            end,
            form: cols[1].to_owned(),
            line: line.to_owned(),
        });
        return Ok(());
    }
    if let Some((major, _)) = id.split_once('.') {
        let after = major
            .parse()
            .map_err(|_| Error::invalid(format!("bad empty node id {id:?}")))?;
        sentence.empty_nodes.push(EmptyNode {
            after,
            line: line.to_owned(),
        });
        return Ok(());
    }

    let id = parse_id(id)?;
    let expected = sentence.tokens.len() + 1;
    if id != expected {
        return Err(Error::invalid(format!(
            "token id {id} out of sequence, expected {expected}"
        )));
    }
    if cols[1].is_empty() {
        return Err(Error::invalid("empty FORM"));
    }
    let opt = |s: &str| (s != ABSENT).then(|| s.to_owned());
    let feats = Features::parse(cols[5])?;
    sentence.tokens.push(Token {
        id,
        form: cols[1].to_owned(),
        // A lone underscore form is a real word whose lemma is also `_`.
        lemma: if cols[1] == ABSENT {
            Some(cols[2].to_owned())
        } else {
            opt(cols[2])
        },
        upos: opt(cols[3]),
        xpos: opt(cols[4]),
        feats,
        rest: [
            cols[6].to_owned(),
            cols[7].to_owned(),
            cols[8].to_owned(),
            cols[9].to_owned(),
        ],
    });
    Ok(())
}

fn parse_id(s: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::invalid(format!("bad token id {s:?}"))),
    }
}

/// Emit canonical CoNLL-U: one blank line after every sentence.
pub fn emit_conllu(tb: &Treebank) -> String {
    let mut out = String::new();
    for s in &tb.sentences {
        s.write(&mut out);
    }
    out
}

pub fn write_conllu<W: Write>(tb: &Treebank, mut writer: W) -> Result<()> {
    writer.write_all(emit_conllu(tb).as_bytes())?;
    Ok(())
}
