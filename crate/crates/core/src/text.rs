//! Text normalization shared by every comparison in the crate.

use unicode_normalization::UnicodeNormalization;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || c.general_category_group() == GeneralCategoryGroup::Punctuation
}

fn normalize_once(raw: &str) -> String {
    let folded: String = raw.nfkc().flat_map(char::to_lowercase).nfkc().collect();
    let mut out = String::with_capacity(folded.len());
    for word in folded.split_whitespace() {
        let word = word.trim_matches(is_punctuation);
        if word.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Canonical comparison form of a string.
///
/// NFKC-normalized, lowercased, each whitespace-separated word stripped of
/// leading and trailing punctuation (words that were only punctuation
/// vanish), joined with single spaces. Punctuation inside a word is kept, so
/// `"Date : 12/03/2018"` becomes `"date 12/03/2018"`.
///
/// The function is idempotent.
pub fn normalize_text(raw: &str) -> String {
    let mut current = normalize_once(raw);
    // Case folding can expose new compositions or punctuation in rare
    // scripts; iterate to the fixed point (one or two rounds in practice).
    for _ in 0..4 {
        let next = normalize_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_examples() {
        assert_eq!(normalize_text("NAME OF  ACCOUNT:"), "name of account");
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("Date : 12/03/2018"), "date 12/03/2018");
    }

    #[test]
    fn compatibility_forms_fold() {
        assert_eq!(normalize_text("ＮＡＭＥ："), "name");
        assert_eq!(normalize_text("\u{201c}Quoted\u{201d}"), "quoted");
        assert_eq!(normalize_text("  \t\n "), "");
        assert_eq!(normalize_text("(a.b.)"), "a.b");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC*") {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once);
        }

        #[test]
        fn idempotent_any_chars(s in proptest::collection::vec(any::<char>(), 0..40)) {
            let s: String = s.into_iter().collect();
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            prop_assert!(!once.contains("  "));
        }
    }
}
