//! Parse a CoNLL-U fragment, inspect it, and write it back unchanged.

use ulem::conllu::{emit_conllu, parse_conllu};

const SAMPLE: &str = "\
# sent_id = 1
# text = Koirat juoksivat.
1\tKoirat\tkoira\tNOUN\tN\tCase=Nom|Number=Plur\t2\tnsubj\t_\t_
2\tjuoksivat\tjuosta\tVERB\tV\tMood=Ind|Number=Plur|Person=3|Tense=Past\t0\troot\t_\tSpaceAfter=No
3\t.\t.\tPUNCT\tPunct\t_\t2\tpunct\t_\t_

# sent_id = 2
1-2\tettei\t_\t_\t_\t_\t_\t_\t_\t_
1\tett\tettä\tSCONJ\tC\t_\t0\troot\t_\t_
2\tei\tei\tAUX\tV\tNumber=Sing|Person=3\t1\taux\t_\t_

";

fn main() -> ulem::Result<()> {
    let tb = parse_conllu(SAMPLE, "sample")?;
    println!("{} sentences, {} tokens", tb.sentences.len(), tb.token_count());
    for t in tb.tokens() {
        println!(
            "{:<10} {:<8} {:<6} {}",
            t.form,
            t.lemma.as_deref().unwrap_or("_"),
            t.upos.as_deref().unwrap_or("_"),
            t.feats
        );
    }
    let out = emit_conllu(&tb);
    assert_eq!(out, SAMPLE);
    println!("round trip is byte-identical");
    Ok(())
}
