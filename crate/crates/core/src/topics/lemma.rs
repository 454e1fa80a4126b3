//! Rule-based lemmatizer for topic preprocessing. Handles regular plural
//! suffixes, -ing/-ed verb forms with stem restoration, and a small table
//! of irregulars. The rules iterate until the word stops changing, which
//! makes the function idempotent by construction.

use std::collections::HashMap;
use std::sync::OnceLock;

fn exceptions() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| {
        HashMap::from([
            ("cookies", "cookie"),
            ("children", "child"),
            ("men", "man"),
            ("women", "woman"),
            ("feet", "foot"),
            ("teeth", "tooth"),
            ("geese", "goose"),
            ("mice", "mouse"),
            ("people", "person"),
            ("has", "have"),
            ("does", "do"),
        ])
    })
}

fn is_vowel_y(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn has_vowel(word: &str) -> bool {
    word.chars().any(is_vowel_y)
}

/// Consonant-vowel-consonant shape on the last three characters, with the
/// final consonant not in {w, x}. Matching stems likely lost a silent e
/// when the suffix was attached (bak-ing, shar-ed).
fn ends_cvc(word: &str) -> bool {
    let mut rev = word.chars().rev();
    let (Some(c3), Some(c2), Some(c1)) = (rev.next(), rev.next(), rev.next()) else {
        return false;
    };
    !is_vowel_y(c1) && is_vowel_y(c2) && !is_vowel_y(c3) && c3 != 'w' && c3 != 'x'
}

const DOUBLES: [&str; 9] = ["bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"];

/// Restores a verb stem after -ing/-ed removal. A doubled final consonant
/// loses one letter (running -> run); short consonant-vowel-consonant
/// stems get their silent e back (bak -> bake, us -> use).
fn restore_stem(stem: &str) -> String {
    for d in DOUBLES {
        if stem.ends_with(d) {
            return stem[..stem.len() - 1].to_string();
        }
    }
    let len = stem.chars().count();
    let short_cvc = len <= 4 && ends_cvc(stem);
    let vowel_consonant = len == 2 && {
        let mut it = stem.chars();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        is_vowel_y(a) && !is_vowel_y(b)
    };
    if short_cvc || vowel_consonant {
        let mut out = stem.to_string();
        out.push('e');
        return out;
    }
    stem.to_string()
}

/// One rewrite pass: the first matching rule fires, or the word is
/// returned unchanged.
fn step(word: &str) -> String {
    let len = word.chars().count();

    if len >= 5 {
        if let Some(stem) = word.strip_suffix("ies") {
            return format!("{stem}y");
        }
    }
    if len >= 4 {
        if let Some(stem) = word.strip_suffix("es") {
            if stem.ends_with("ss") || stem.ends_with(['x', 'z']) || stem.ends_with("ch") || stem.ends_with("sh") {
                return stem.to_string();
            }
        }
    }
    if len >= 3 && word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is") {
        return word[..word.len() - 1].to_string();
    }
    if len >= 5 {
        if let Some(stem) = word.strip_suffix("ing") {
            if has_vowel(stem) && !stem.ends_with('e') {
                return restore_stem(stem);
            }
        }
    }
    if len >= 4 {
        if let Some(stem) = word.strip_suffix("ed") {
            if has_vowel(stem) && !stem.ends_with('e') {
                return restore_stem(stem);
            }
        }
    }
    word.to_string()
}

/// Maps a lowercase token to its lemma.
pub fn lemmatize(word: &str) -> String {
    let mut current = word.to_string();
    loop {
        if let Some(mapped) = exceptions().get(current.as_str()) {
            return (*mapped).to_string();
        }
        let next = step(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}
