//! Lemma ambiguity rates and the most skewed ambiguous keys of a corpus.

use ulem::ambiguity::{compute_ambiguity, format_rate, top_ambiguous_skew, write_skew_csv};
use ulem::conllu::parse_conllu;

const SAMPLE: &str = "\
1\tsaw\tsee\tVERB\t_\tTense=Past\t0\troot\t_\t_
2\tthe\tthe\tDET\t_\t_\t3\tdet\t_\t_
3\tsaw\tsaw\tNOUN\t_\tNumber=Sing\t1\tobj\t_\t_

1\tI\tI\tPRON\t_\t_\t2\tnsubj\t_\t_
2\tleft\tleave\tVERB\t_\tTense=Past\t0\troot\t_\t_
3\tleft\tleft\tADV\t_\t_\t2\tadvmod\t_\t_

1\tleft\tleave\tVERB\t_\tTense=Past\t0\troot\t_\t_
2\tleft\tleft\tVERB\t_\tTense=Past\t1\txcomp\t_\t_
3\tleft\tleave\tVERB\t_\tTense=Past\t1\txcomp\t_\t_

";

fn main() -> ulem::Result<()> {
    let tb = parse_conllu(SAMPLE, "toy")?;
    let r = compute_ambiguity(&tb)?;
    println!("tokens          {}", r.total_tokens);
    println!("token rate      {}", format_rate(r.token_rate()));
    println!("token-tag rate  {}", format_rate(r.tokentag_rate()));

    let skew = top_ambiguous_skew(&tb, 5)?;
    write_skew_csv(&skew, std::io::stdout())?;
    Ok(())
}
