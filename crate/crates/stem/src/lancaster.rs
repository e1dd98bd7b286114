//! Paice/Husk (Lancaster) iterative stemmer driven by a rule table.
//!
//! A rule is written reversed-ending first, e.g. `sei3y>`: on a word ending
//! in `ies`, drop 3 characters, append `y`, and continue (`>`) or stop
//! (`.`). A `*` after the ending restricts the rule to words no rule has
//! touched yet.

use std::collections::HashMap;

use crate::RuleError;

pub const DEFAULT_RULES: &[&str] = &[
    "ai*2.", "a*1.", "bb1.", "city3s.", "ci2>", "cn1t>", "dd1.", "dei3y>", "deec2ss.", "dee1.",
    "de2>", "dooh4>", "e1>", "feil1v.", "fi2>", "gni3>", "gai3y.", "ga2>", "gg1.", "ht*2.",
    "hsiug5ct.", "hsi3>", "i*1.", "i1y>", "ji1d.", "juf1s.", "ju1d.", "jo1d.", "jeh1r.",
    "jrev1t.", "jsim2t.", "jn1d.", "j1s.", "lbaifi6.", "lbai4y.", "lba3>", "lbi3.", "lib2l>",
    "lc1.", "lufi4y.", "luf3>", "lu2.", "lai3>", "lau3>", "la2>", "ll1.", "mui3.", "mu*2.",
    "msi3>", "mm1.", "nois4j>", "noix4ct.", "noi3>", "nai3>", "na2>", "nee0.", "ne2>", "nn1.",
    "pihs4>", "pp1.", "re2>", "rae0.", "ra2.", "ro2>", "ru2>", "rr1.", "rt1>", "rei3y>",
    "sei3y>", "sis2.", "si2>", "ssen4>", "ss0.", "suo3>", "su*2.", "s*1>", "s0.", "tacilp4y.",
    "ta2>", "tnem4>", "tne3>", "tna3>", "tpir2b.", "tpro2b.", "tcud1.", "tpmus2.", "tpec2iv.",
    "tulo2v.", "tsis0.", "tsi3>", "tt1.", "uqi3.", "ugo1.", "vis3j>", "vie0.", "vi2>", "ylb1>",
    "yli3y>", "ylp0.", "yl2>", "ygo1.", "yhp1.", "ymo1.", "ypo1.", "yti3>", "yte3>", "ytl2.",
    "yrtsi5.", "yra3>", "yro3>", "yfi3.", "ycn2t>", "yca3>", "zi2>", "zy1s.",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// The ending in normal (not reversed) order.
    pub ending: String,
    pub intact_only: bool,
    pub remove: usize,
    pub append: String,
    pub stop: bool,
}

impl Rule {
    /// Parses `<reversed ending>[*]<digit>[append][>|.]`.
    pub fn parse(text: &str) -> Result<Rule, RuleError> {
        let bad = || RuleError::Lancaster(text.to_string());
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() && bytes[i].is_ascii_lowercase() {
            i += 1;
        }
        if i == 0 {
            return Err(bad());
        }
        let ending: String = text[..i].chars().rev().collect();
        let intact_only = bytes.get(i) == Some(&b'*');
        if intact_only {
            i += 1;
        }
        let remove = match bytes.get(i) {
            Some(d) if d.is_ascii_digit() => (d - b'0') as usize,
            _ => return Err(bad()),
        };
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_lowercase() {
            i += 1;
        }
        let append = text[start..i].to_string();
        let stop = match &text[i..] {
            "." => true,
            ">" | "" => false,
            _ => return Err(bad()),
        };
        Ok(Rule {
            ending,
            intact_only,
            remove,
            append,
            stop,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Lancaster {
    /// Rules keyed by the final letter of their ending, in table order.
    rules: HashMap<char, Vec<Rule>>,
}

impl Default for Lancaster {
    fn default() -> Self {
        Lancaster::from_rules(DEFAULT_RULES).expect("default rule table parses")
    }
}

fn acceptable(word: &[char], remove: usize) -> bool {
    let vowel = |c: char| "aeiouy".contains(c);
    let left = word.len().saturating_sub(remove);
    if vowel(word[0]) {
        left >= 2
    } else {
        left >= 3 && (vowel(word[1]) || vowel(word[2]))
    }
}

impl Lancaster {
    pub fn from_rules<S: AsRef<str>>(table: &[S]) -> Result<Self, RuleError> {
        let mut rules: HashMap<char, Vec<Rule>> = HashMap::new();
        for text in table {
            let rule = Rule::parse(text.as_ref())?;
            let key = rule.ending.chars().last().expect("non-empty ending");
            rules.entry(key).or_default().push(rule);
        }
        Ok(Lancaster { rules })
    }

    pub fn stem(&self, word: &str) -> String {
        let original: Vec<char> = word.chars().collect();
        let mut w = original.clone();
        loop {
            let run = w.iter().take_while(|c| c.is_alphabetic()).count();
            if run == 0 {
                break;
            }
            let Some(rules) = self.rules.get(&w[run - 1]) else {
                break;
            };
            let mut applied = None;
            for rule in rules {
                let n = rule.ending.chars().count();
                let matches = w.len() >= n && w[w.len() - n..].iter().copied().eq(rule.ending.chars());
                if !matches || (rule.intact_only && w != original) || !acceptable(&w, rule.remove) {
                    continue;
                }
                w.truncate(w.len() - rule.remove);
                w.extend(rule.append.chars());
                applied = Some(rule.stop);
                break;
            }
            if applied != Some(false) {
                break;
            }
        }
        w.into_iter().collect()
    }
}
