//! Text renderings of a corpus report.

use tcclab_core::report::round_sig;
use tcclab_core::tcc::CorpusReport;

const HEADER: [&str; 7] = ["pair", "scheme", "grammatical", "gram_value", "ungrammatical", "ungram_value", "correct"];

fn rows(rep: &CorpusReport) -> Vec<[String; 7]> {
    rep.pairs
        .iter()
        .map(|p| {
            let (g, u) = (p.grammatical(), p.ungrammatical());
            [
                p.pair.clone(),
                p.scheme.clone(),
                g.id.clone(),
                format!("{:.2}", g.value),
                u.id.clone(),
                format!("{:.2}", u.value),
                if p.correct { "yes" } else { "NO" }.to_string(),
            ]
        })
        .collect()
}

pub fn aligned(rep: &CorpusReport) -> String {
    let body = rows(rep);
    let mut width = HEADER.map(|h| h.chars().count());
    for r in &body {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> =
            cells.iter().zip(width).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&HEADER.map(String::from));
    for r in &body {
        out.push_str(&line(r));
    }
    out.push_str(&format!("{}/{} orderings correct\n", rep.correct, rep.total));
    out
}

pub fn csv(rep: &CorpusReport) -> String {
    let mut out = HEADER.join(",") + "\n";
    for p in &rep.pairs {
        let (g, u) = (p.grammatical(), p.ungrammatical());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.pair, p.scheme, g.id, round_sig(g.value), u.id, round_sig(u.value), p.correct
        ));
    }
    out
}
