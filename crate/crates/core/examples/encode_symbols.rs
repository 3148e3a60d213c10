//! Turn tokens into symbol sequences and build the two vocabularies.

use ulem::codec::{build_vocabularies, encode_example, ids_of};
use ulem::conllu::{Features, Token};

fn main() -> ulem::Result<()> {
    let tokens = [
        Token::new(1, "walked")
            .with_lemma("walk")
            .with_upos("VERB")
            .with_feats(Features::parse("Tense=Past|VerbForm=Fin")?),
        Token::new(2, "dogs")
            .with_lemma("dog")
            .with_upos("NOUN")
            .with_feats(Features::parse("Number=Plur")?),
        Token::new(3, "talks").with_lemma("talk").with_upos("VERB"),
    ];
    let examples: Vec<_> = tokens.iter().map(encode_example).collect::<ulem::Result<_>>()?;
    for ex in &examples {
        println!("{}", ex.tsv_line());
    }

    // Characters seen once fall back to UNK at min frequency 2.
    let (input_vocab, output_vocab) = build_vocabularies(&examples, 2);
    println!("input vocabulary: {} symbols", input_vocab.len());
    println!("output vocabulary: {} symbols", output_vocab.len());
    for ex in &examples {
        println!("{:?} -> {:?}", ids_of(&ex.input, &input_vocab), ids_of(&ex.output, &output_vocab));
    }
    Ok(())
}
