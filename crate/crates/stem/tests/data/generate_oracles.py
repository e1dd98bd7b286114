#!/usr/bin/env python3
"""Regenerate the frozen stemmer oracle tables in this directory.

Reference implementations (independent of the Rust code):
  porter     nltk.stem.PorterStemmer(mode=ORIGINAL_ALGORITHM)   (nltk 3.10)
  lancaster  nltk.stem.LancasterStemmer()                       (nltk 3.10)
  snowball   snowballstemmer.stemmer(<language>)                (snowballstemmer 3.1.1)

Vocabularies come from the spaCy lookups data package (MIT): the most
frequent word forms where a frequency table exists (en, de, es), otherwise
a seeded sample of the lemma lookup keys (fr, it, pt).

usage: generate_oracles.py <path to spacy_lookups_data/data>
"""
import gzip
import json
import random
import re
import sys

import snowballstemmer
from nltk.stem.lancaster import LancasterStemmer
from nltk.stem.porter import PorterStemmer

DATA = sys.argv[1]

LETTERS = {
    "en": "a-z",
    "de": "a-zäöüß",
    "es": "a-záéíóúüñ",
    "fr": "a-zàâäçéèêëîïôöùûüÿœæ",
    "it": "a-zàèéìíîòóùú",
    "pt": "a-záàâãçéêíóôõúü",
}
SNOWBALL = {
    "en": "english",
    "de": "german",
    "es": "spanish",
    "fr": "french",
    "it": "italian",
    "pt": "portuguese",
}

# Words from the original rule listings, kept so the tables cover every step.
EXTRA_EN = """caresses ponies ties caress cats feed agreed plastered bled motoring
sing conflated troubled sized hopping tanned falling hissing fizzed failing filing
happy sky relational conditional rational valenci hesitanci digitizer conformabli
radicalli differentli vileli analogousli vietnamization predication operator
feudalism decisiveness hopefulness callousness formaliti sensitiviti sensibiliti
triplicate formative formalize electriciti electrical hopeful goodness revival
allowance inference airliner gyroscopic adjustable defensible irritant replacement
adjustment dependent adoption homologou communism activate angulariti homologous
effective bowdlerize probate rate cease controll roll generalizations oscillators
argue argued argues arguing argument arguments arguer programming programmer programs
maximum presumably multiply provision owed ear saying crying string meant cement
skies skis dying lying tying news innings outings cannings howe proceed exceed succeed
generously generation universal universe communication emergency arsenal organization
""".split()


def words_by_frequency(lang, n):
    prob = json.load(gzip.open(f"{DATA}/{lang}_lexeme_prob.json.gz"))
    pat = re.compile(f"[{LETTERS[lang]}]+")
    out = []
    for w, _ in sorted(prob.items(), key=lambda kv: (-kv[1], kv[0])):
        if w == w.lower() and pat.fullmatch(w):
            out.append(w)
            if len(out) == n:
                break
    return out


def words_by_sample(lang, n):
    lookup = json.load(gzip.open(f"{DATA}/{lang}_lemma_lookup.json.gz"))
    pat = re.compile(f"[{LETTERS[lang]}]+")
    keys = sorted({k for k in lookup if k == k.lower() and pat.fullmatch(k)})
    lemmas = set()
    for v in lookup.values():
        for l in v if isinstance(v, list) else [v]:
            if l == l.lower() and pat.fullmatch(l):
                lemmas.add(l)
    rng = random.Random(20240917)
    return rng.sample(keys, n // 2) + rng.sample(sorted(lemmas), n // 2)


def dedup(ws):
    seen = set()
    return [w for w in ws if not (w in seen or seen.add(w))]


def main():
    porter = PorterStemmer(PorterStemmer.ORIGINAL_ALGORITHM)
    lancaster = LancasterStemmer()
    en = dedup(words_by_frequency("en", 6000) + EXTRA_EN)
    snow = snowballstemmer.stemmer("english")
    with open("english.tsv", "w", encoding="utf-8") as f:
        f.write("word\tporter\tlancaster\tsnowball\n")
        for w in en:
            f.write(f"{w}\t{porter.stem(w)}\t{lancaster.stem(w)}\t{snow.stemWord(w)}\n")
    for lang in ["de", "es", "fr", "it", "pt"]:
        if lang in ("de", "es"):
            ws = words_by_frequency(lang, 3000)
        else:
            ws = words_by_sample(lang, 3000)
        ws = dedup(ws)
        snow = snowballstemmer.stemmer(SNOWBALL[lang])
        with open(f"snowball_{SNOWBALL[lang]}.tsv", "w", encoding="utf-8") as f:
            f.write("word\tsnowball\n")
            for w in ws:
                f.write(f"{w}\t{snow.stemWord(w)}\n")


if __name__ == "__main__":
    main()
