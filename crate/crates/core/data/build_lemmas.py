#!/usr/bin/env python3
"""Rebuild data/<lang>/lemmas.tsv from spacy-lookups-data 1.0.5.

usage: build_lemmas.py <path to spacy_lookups_data/data>
"""
import gzip
import json
import os
import sys

LIMIT = 40000
LANGS = ["en", "fr", "de", "it", "pt", "es"]

OVERRIDES = {
    "en": {
        "is": ["be"],
        "are": ["be"],
        "am": ["be"],
        "was": ["be"],
        "were": ["be"],
        "been": ["be"],
        "being": ["be"],
        "'s": ["be", "have"],
        "'m": ["be"],
        "'re": ["be"],
        "'ve": ["have"],
        "'ll": ["will"],
        "'d": ["would", "have"],
        "n't": ["not"],
        "leaves": ["leaf", "leave"],
    },
}


def keep(word):
    return word == word.lower() and word.isalpha()


def main(src):
    here = os.path.dirname(os.path.abspath(__file__))
    for lang in LANGS:
        lookup = json.load(gzip.open(os.path.join(src, f"{lang}_lemma_lookup.json.gz")))
        entries = {}
        for k, v in lookup.items():
            cands = [c for c in (v if isinstance(v, list) else [v]) if isinstance(c, str) and keep(c)]
            if keep(k) and cands and cands != [k]:
                entries[k] = list(dict.fromkeys(cands))
        prob_path = os.path.join(src, f"{lang}_lexeme_prob.json.gz")
        if os.path.exists(prob_path):
            prob = json.load(gzip.open(prob_path))
            ranked = sorted(entries, key=lambda w: (-prob.get(w, -100.0), w))
        else:
            ranked = sorted(entries, key=lambda w: (len(w), w))
        chosen = {w: entries[w] for w in ranked[:LIMIT]}
        chosen.update(OVERRIDES.get(lang, {}))
        with open(os.path.join(here, lang, "lemmas.tsv"), "w", encoding="utf-8") as out:
            for w in sorted(chosen):
                out.write(f"{w}\t{','.join(chosen[w])}\n")
        print(lang, len(chosen))


if __name__ == "__main__":
    main(sys.argv[1])
