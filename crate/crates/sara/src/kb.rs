//! The statute knowledge base shipped with the crate.

use taxlog_core::{KbError, KnowledgeBase};

/// Every clause file, in load order: (name, text).
pub const FILES: &[(&str, &str)] = &[
    ("axioms/vocabulary.pl", include_str!("../kb/axioms/vocabulary.pl")),
    ("axioms/instantaneous.pl", include_str!("../kb/axioms/instantaneous.pl")),
    ("axioms/common_sense.pl", include_str!("../kb/axioms/common_sense.pl")),
    ("statutes/constants.pl", include_str!("../kb/statutes/constants.pl")),
    ("statutes/section1.pl", include_str!("../kb/statutes/section1.pl")),
    ("statutes/section2.pl", include_str!("../kb/statutes/section2.pl")),
    ("statutes/section63.pl", include_str!("../kb/statutes/section63.pl")),
    ("statutes/section68.pl", include_str!("../kb/statutes/section68.pl")),
    ("statutes/section151.pl", include_str!("../kb/statutes/section151.pl")),
    ("statutes/section152.pl", include_str!("../kb/statutes/section152.pl")),
    ("statutes/section3301.pl", include_str!("../kb/statutes/section3301.pl")),
    ("statutes/section3306.pl", include_str!("../kb/statutes/section3306.pl")),
    ("statutes/section7703.pl", include_str!("../kb/statutes/section7703.pl")),
    ("statutes/tax.pl", include_str!("../kb/statutes/tax.pl")),
];

/// Load the statutes and axioms.
pub fn statute_kb() -> Result<KnowledgeBase, KbError> {
    let mut kb = KnowledgeBase::new();
    for (name, text) in FILES {
        kb.consult_str(text, name)?;
    }
    Ok(kb)
}

/// Text of one shipped file.
pub fn file_text(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Predicates that encode one statute subsection, e.g. `s7703_b_3`.
pub fn is_subsection_name(name: &str) -> bool {
    let Some(rest) = name.strip_prefix('s') else { return false };
    let mut parts = rest.split('_');
    let section_ok = parts.next().is_some_and(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()));
    section_ok && parts.all(is_label)
}

/// One paragraph label: `a`, `1`, `A`, `ii`, `IV`.
fn is_label(p: &str) -> bool {
    let all = |f: fn(&u8) -> bool| !p.is_empty() && p.bytes().all(|b| f(&b));
    all(u8::is_ascii_digit)
        || (p.len() == 1 && p.bytes().all(|b| b.is_ascii_alphabetic()))
        || all(|b| b"ivxl".contains(b))
        || all(|b| b"IVXL".contains(b))
}
