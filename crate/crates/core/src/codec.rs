//! Symbol sequences and vocabularies.
//!
//! A token becomes `chars(form) ++ [UPOS=.., XPOS=.., Cat=Val..]` on the input
//! side and `chars(lemma) ++ [EOS]` on the output side.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::conllu::Token;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Special {
    Bos,
    Eos,
    Unk,
    /// Stand-in for tag symbols never seen in training.
    UnkTag,
    /// The whole tag block of an autoencoder example.
    Autoenc,
}

impl Special {
    pub fn name(self) -> &'static str {
        match self {
            Special::Bos => "BOS",
            Special::Eos => "EOS",
            Special::Unk => "UNK",
            Special::UnkTag => "UNK_TAG",
            Special::Autoenc => "AUTOENC",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "BOS" => Special::Bos,
            "EOS" => Special::Eos,
            "UNK" => Special::Unk,
            "UNK_TAG" => Special::UnkTag,
            "AUTOENC" => Special::Autoenc,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Char(char),
    Tag(String),
    Special(Special),
}

impl Symbol {
    pub fn tag(text: impl Into<String>) -> Self {
        Symbol::Tag(text.into())
    }

    pub fn is_char(&self) -> bool {
        matches!(self, Symbol::Char(_))
    }

    /// Tags and the autoencoder marker occupy tag positions.
    pub fn is_tag_like(&self) -> bool {
        matches!(self, Symbol::Tag(_) | Symbol::Special(Special::Autoenc))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Symbol::Char(_) => "char",
            Symbol::Tag(_) => "tag",
            Symbol::Special(_) => "special",
        }
    }

    fn from_parts(kind: &str, text: &str) -> Option<Self> {
        match kind {
            "char" => {
                let mut chars = text.chars();
                let c = chars.next()?;
                chars.next().is_none().then_some(Symbol::Char(c))
            }
            "tag" => Some(Symbol::Tag(text.to_owned())),
            "special" => Special::from_name(text).map(Symbol::Special),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Char(c) => write!(f, "{c}"),
            Symbol::Tag(t) => f.write_str(t),
            Symbol::Special(s) => f.write_str(s.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightGroup {
    Gold,
    Autoencoder,
    Transducer,
}

impl WeightGroup {
    pub fn name(self) -> &'static str {
        match self {
            WeightGroup::Gold => "gold",
            WeightGroup::Autoencoder => "autoencoder",
            WeightGroup::Transducer => "transducer",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrainingExample {
    pub input: Vec<Symbol>,
    /// Lemma characters followed by EOS; empty for inference inputs.
    pub output: Vec<Symbol>,
    pub group: WeightGroup,
}

impl TrainingExample {
    /// The lemma spelled by the output characters.
    pub fn target(&self) -> String {
        self.output
            .iter()
            .filter_map(|s| match s {
                Symbol::Char(c) => Some(*c),
                _ => None,
            })
            .collect()
    }

    /// One TSV line: space-joined input symbols, output characters, group.
    pub fn tsv_line(&self) -> String {
        let input: Vec<String> = self.input.iter().map(Symbol::to_string).collect();
        format!("{}\t{}\t{}", input.join(" "), self.target(), self.group.name())
    }
}

/// The tag block of a token: UPOS, XPOS, then one symbol per feature pair.
pub fn tag_symbols(upos: Option<&str>, xpos: Option<&str>, feats: &crate::conllu::Features) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(2 + feats.len());
    if let Some(u) = upos {
        out.push(Symbol::Tag(format!("UPOS={u}")));
    }
    if let Some(x) = xpos {
        out.push(Symbol::Tag(format!("XPOS={x}")));
    }
    out.extend(feats.iter().map(|(c, v)| Symbol::Tag(format!("{c}={v}"))));
    out
}

pub fn chars_of(s: &str) -> impl Iterator<Item = Symbol> + '_ {
    s.chars().map(Symbol::Char)
}

/// Encode a token. Without a lemma the output is empty.
pub fn encode_example(t: &Token) -> Result<TrainingExample> {
    encode_parts(
        &t.form,
        t.lemma.as_deref(),
        tag_symbols(t.upos.as_deref(), t.xpos.as_deref(), &t.feats),
        WeightGroup::Gold,
    )
}

pub(crate) fn encode_parts(
    form: &str,
    lemma: Option<&str>,
    tags: Vec<Symbol>,
    group: WeightGroup,
) -> Result<TrainingExample> {
    if form.is_empty() {
        return Err(Error::invalid("cannot encode an empty form"));
    }
    let mut input: Vec<Symbol> = chars_of(form).collect();
    input.extend(tags);
    let output = match lemma {
        Some(l) => chars_of(l)
            .chain(std::iter::once(Symbol::Special(Special::Eos)))
            .collect(),
        None => Vec::new(),
    };
    Ok(TrainingExample {
        input,
        output,
        group,
    })
}

/// Dense symbol ids with training frequencies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, u32>,
    frequency: Vec<u64>,
    min_frequency: u64,
}

impl Vocabulary {
    pub const BOS: u32 = 0;
    pub const EOS: u32 = 1;
    pub const UNK: u32 = 2;

    fn with_specials(specials: &[Special], min_frequency: u64) -> Self {
        let mut v = Vocabulary {
            symbols: Vec::new(),
            index: HashMap::new(),
            frequency: Vec::new(),
            min_frequency,
        };
        for s in specials {
            v.push(Symbol::Special(*s), 0);
        }
        v
    }

    fn push(&mut self, sym: Symbol, freq: u64) {
        let id = self.symbols.len() as u32;
        self.index.insert(sym.clone(), id);
        self.symbols.push(sym);
        self.frequency.push(freq);
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn min_frequency(&self) -> u64 {
        self.min_frequency
    }

    pub fn id(&self, sym: &Symbol) -> Option<u32> {
        self.index.get(sym).copied()
    }

    pub fn symbol(&self, id: u32) -> &Symbol {
        &self.symbols[id as usize]
    }

    pub fn frequency(&self, id: u32) -> u64 {
        self.frequency[id as usize]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Id used for an unknown tag, if this vocabulary has one.
    pub fn unk_tag(&self) -> Option<u32> {
        self.id(&Symbol::Special(Special::UnkTag))
    }

    /// One line per symbol: `kind<TAB>text<TAB>id<TAB>frequency`.
    pub fn to_lines(&self) -> String {
        let mut out = format!("min_frequency\t{}\n", self.min_frequency);
        for (id, sym) in self.symbols.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                sym.kind(),
                sym,
                id,
                self.frequency[id]
            ));
        }
        out
    }

    pub fn from_lines(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let min_frequency = lines
            .next()
            .and_then(|l| l.strip_prefix("min_frequency\t"))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::ModelFormat("vocabulary header missing".into()))?;
        let mut v = Vocabulary::with_specials(&[], min_frequency);
        for (n, line) in lines.enumerate() {
            let bad = || Error::ModelFormat(format!("vocabulary line {}: {line:?}", n + 2));
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(bad());
            }
            let sym = Symbol::from_parts(cols[0], cols[1]).ok_or_else(bad)?;
            let id: usize = cols[2].parse().map_err(|_| bad())?;
            let freq: u64 = cols[3].parse().map_err(|_| bad())?;
            if id != v.len() || v.index.contains_key(&sym) {
                return Err(bad());
            }
            v.push(sym, freq);
        }
        for required in [Special::Bos, Special::Eos, Special::Unk] {
            if v.id(&Symbol::Special(required)) != Some(required as u32) {
                return Err(Error::ModelFormat(format!(
                    "vocabulary lacks {} at its fixed id",
                    required.name()
                )));
            }
        }
        Ok(v)
    }
}

/// Build input and output vocabularies from training examples.
///
/// Characters seen fewer than `min_frequency` times are left out and will map
/// to UNK. Tags and specials are always kept.
pub fn build_vocabularies(
    examples: &[TrainingExample],
    min_frequency: u64,
) -> (Vocabulary, Vocabulary) {
    let mut input_counts: HashMap<&Symbol, u64> = HashMap::new();
    let mut output_counts: HashMap<&Symbol, u64> = HashMap::new();
    for ex in examples {
        for s in &ex.input {
            *input_counts.entry(s).or_default() += 1;
        }
        for s in &ex.output {
            *output_counts.entry(s).or_default() += 1;
        }
    }

    let mut input = Vocabulary::with_specials(
        &[Special::Bos, Special::Eos, Special::Unk, Special::UnkTag],
        min_frequency,
    );
    let mut output =
        Vocabulary::with_specials(&[Special::Bos, Special::Eos, Special::Unk], min_frequency);

    fill(&mut input, &input_counts, min_frequency);
    fill(&mut output, &output_counts, min_frequency);
    (input, output)
}

fn fill(v: &mut Vocabulary, counts: &HashMap<&Symbol, u64>, min_frequency: u64) {
    let ordered: BTreeSet<&Symbol> = counts.keys().copied().collect();
    for sym in ordered {
        let freq = counts[sym];
        if let Some(id) = v.id(sym) {
            v.frequency[id as usize] = freq;
            continue;
        }
        let keep = match sym {
            Symbol::Char(_) => freq >= min_frequency,
            _ => true,
        };
        if keep {
            v.push(sym.clone(), freq);
        }
    }
}

/// Map symbols to ids; unknown characters become UNK, unknown tags UNK_TAG.
pub fn ids_of(seq: &[Symbol], v: &Vocabulary) -> Vec<u32> {
    let unk_tag = v.unk_tag().unwrap_or(Vocabulary::UNK);
    seq.iter()
        .map(|s| match v.id(s) {
            Some(id) => id,
            None if s.is_tag_like() => unk_tag,
            None => Vocabulary::UNK,
        })
        .collect()
}

pub fn decode(ids: &[u32], v: &Vocabulary) -> Vec<Symbol> {
    ids.iter().map(|&id| v.symbol(id).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Features;

    fn syms(s: &str) -> Vec<Symbol> {
        s.split(' ')
            .map(|p| {
                let mut cs = p.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Symbol::Char(c),
                    _ if p == "EOS" => Symbol::Special(Special::Eos),
                    _ => Symbol::tag(p),
                }
            })
            .collect()
    }

    #[test]
    fn encodes_lives() {
        let t = Token::new(1, "lives")
            .with_lemma("life")
            .with_upos("NOUN")
            .with_xpos("NNS")
            .with_feats(Features::parse("Number=Plur").unwrap());
        let ex = encode_example(&t).unwrap();
        assert_eq!(ex.input, syms("l i v e s UPOS=NOUN XPOS=NNS Number=Plur"));
        assert_eq!(ex.output, syms("l i f e EOS"));
    }

    #[test]
    fn minimal_token() {
        let t = Token::new(1, "a").with_lemma("a").with_upos("DET");
        let ex = encode_example(&t).unwrap();
        assert_eq!(ex.input, syms("a UPOS=DET"));
        assert_eq!(ex.output, syms("a EOS"));
    }

    #[test]
    fn encodes_czech_name_in_finnish() {
        let t = Token::new(1, "Růžičkalla")
            .with_upos("PROPN")
            .with_xpos("N")
            .with_feats(Features::parse("Number=Sing|Case=Ade").unwrap());
        let ex = encode_example(&t).unwrap();
        assert_eq!(
            ex.input,
            syms("R ů ž i č k a l l a UPOS=PROPN XPOS=N Case=Ade Number=Sing")
        );
        assert!(ex.output.is_empty());
    }

    #[test]
    fn empty_form_rejected() {
        assert!(encode_example(&Token::new(1, "")).is_err());
    }

    fn examples(words: &[&str]) -> Vec<TrainingExample> {
        words
            .iter()
            .map(|w| encode_parts(w, Some(w), vec![Symbol::tag("UPOS=X")], WeightGroup::Gold).unwrap())
            .collect()
    }

    #[test]
    fn min_frequency_one_keeps_everything() {
        let (input, output) = build_vocabularies(&examples(&["ab", "cx"]), 1);
        for c in "abcx".chars() {
            assert!(input.id(&Symbol::Char(c)).is_some());
            assert!(output.id(&Symbol::Char(c)).is_some());
        }
    }

    #[test]
    fn rare_character_maps_to_unk() {
        let exs = examples(&["ab", "ab", "ax"]);
        let (input, output) = build_vocabularies(&exs, 2);
        let ids = ids_of(&exs[2].input, &input);
        assert_eq!(ids[1], Vocabulary::UNK);
        assert_ne!(ids[0], Vocabulary::UNK);
        assert_eq!(ids_of(&exs[2].output, &output)[1], Vocabulary::UNK);
    }

    #[test]
    fn tags_never_unk_and_unseen_tags_get_unk_tag() {
        let exs = examples(&["ab"]);
        let (input, _) = build_vocabularies(&exs, 100);
        assert!(input.id(&Symbol::tag("UPOS=X")).is_some());
        let ids = ids_of(&[Symbol::tag("UPOS=NEVER"), Symbol::Char('q')], &input);
        assert_eq!(ids, vec![input.unk_tag().unwrap(), Vocabulary::UNK]);
    }

    #[test]
    fn ids_are_a_bijection() {
        let (input, _) = build_vocabularies(&examples(&["hello", "world", "ärrä"]), 1);
        for id in 0..input.len() as u32 {
            assert_eq!(input.id(input.symbol(id)), Some(id));
        }
        assert_eq!(ids_of(&[], &input), Vec::<u32>::new());
    }

    #[test]
    fn vocabulary_lines_round_trip() {
        let (input, output) = build_vocabularies(&examples(&["hello", "wörld"]), 2);
        assert_eq!(Vocabulary::from_lines(&input.to_lines()).unwrap(), input);
        assert_eq!(Vocabulary::from_lines(&output.to_lines()).unwrap(), output);
    }

    #[test]
    fn tsv_line_layout() {
        let ex = encode_parts("ab", Some("a"), vec![Symbol::tag("UPOS=X")], WeightGroup::Transducer).unwrap();
        assert_eq!(ex.tsv_line(), "a b UPOS=X\ta\ttransducer");
    }
}
