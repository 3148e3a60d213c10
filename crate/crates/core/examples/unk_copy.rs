//! Replace generated UNK symbols with the input character the decoder was
//! attending to at that step.

use ulem::codec::{build_vocabularies, encode_example, Symbol, Vocabulary};
use ulem::conllu::Token;
use ulem::inference::{replace_unks, Hypothesis};

fn main() -> ulem::Result<()> {
    let form = "Růžičkalla";
    let mut input: Vec<Symbol> = form.chars().map(Symbol::Char).collect();
    for tag in ["UPOS=PROPN", "XPOS=N", "Case=Ade", "Number=Sing"] {
        input.push(Symbol::tag(tag));
    }

    // The output vocabulary never saw ů, ž or č.
    let seen = encode_example(&Token::new(1, "Rika").with_lemma("Rika"))?;
    let (_, output_vocab) = build_vocabularies(&[seen], 1);
    let id = |c: char| output_vocab.id(&Symbol::Char(c)).unwrap();
    let output = vec![id('R'), Vocabulary::UNK, Vocabulary::UNK, id('i'), Vocabulary::UNK, id('k'), id('a')];

    // Step t attends mostly to input position t.
    let attention = (0..output.len())
        .map(|t| {
            let mut w = vec![0.01; input.len()];
            w[t] = 0.87;
            w
        })
        .collect();
    let h = Hypothesis { output, log_prob: -0.3, attention, state: (), ended: true };

    let raw: String = h.output.iter().map(|&i| output_vocab.symbol(i).to_string()).collect::<Vec<_>>().join(" ");
    let p = replace_unks(&h, &input, &output_vocab);
    println!("decoded   {raw}");
    println!("lemma     {}", p.lemma);
    println!("copied    {}", p.used_copy);
    Ok(())
}
