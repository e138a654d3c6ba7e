//! The bundled reference corpus of closed terms.

use crate::surface::{parse, SourceFile};
use crate::syntax::{Decl, Ty};

/// Source text of the bundled corpus.
pub const SOURCE: &str = include_str!("../corpus/terms.gst");

/// The parsed corpus.
pub fn corpus() -> SourceFile {
    parse(SOURCE).expect("bundled corpus parses")
}

/// Corpus entries of type `(N -> N) -> N`.
pub fn functionals() -> Vec<Decl> {
    corpus()
        .decls
        .into_iter()
        .filter(|d| d.ty == Ty::functional())
        .collect()
}

/// A corpus entry by name.
pub fn get(name: &str) -> Decl {
    corpus()
        .get(name)
        .cloned()
        .unwrap_or_else(|| panic!("no corpus entry `{name}`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{typecheck, Ctx};

    #[test]
    fn corpus_is_large_and_well_typed() {
        let c = corpus();
        assert!(c.decls.len() >= 15);
        for d in &c.decls {
            assert_eq!(typecheck(&Ctx::new(), &d.body).unwrap(), d.ty, "{}", d.name);
        }
        assert!(functionals().len() >= 10);
        assert!(c.decls.iter().any(|d| d.body.mentions_sum()));
    }
}
