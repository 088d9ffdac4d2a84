#!/usr/bin/env python3
"""Regenerates tests/fixtures/stems.tsv from the Python snowballstemmer package.

Usage: gen_stem_table.py WORDFILE... > tests/fixtures/stems.tsv
Words are every lowercase [a-z]{3,24} run found in the given files.
"""
import importlib.metadata
import re
import sys

import snowballstemmer


def main(paths):
    stemmer = snowballstemmer.stemmer("english")
    words = set()
    for path in paths:
        with open(path, errors="ignore") as f:
            words |= set(re.findall(r"[a-z]{3,24}", f.read().lower()))
    version = importlib.metadata.version("snowballstemmer")
    print(f"# word\tstem (snowballstemmer {version}, english)")
    for w in sorted(words):
        print(f"{w}\t{stemmer.stemWord(w)}")


if __name__ == "__main__":
    main(sys.argv[1:])
