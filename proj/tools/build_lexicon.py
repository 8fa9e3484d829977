#!/usr/bin/env python3
"""Extract a single-word synonym lexicon (TSV) from WordNet database files.

Usage: build_lexicon.py <wordnet dict dir> <out.tsv>

Only lemmas that survive text cleaning unchanged (lowercase letters/digits)
are kept, so substitution never alters the token count.
"""
import re
import sys
from collections import defaultdict
from pathlib import Path

WORD = re.compile(r"^[a-z0-9]+$")


def synsets(path):
    with open(path, encoding="utf-8", errors="replace") as f:
        for line in f:
            if line.startswith("  "):
                continue
            fields = line.split()
            count = int(fields[3], 16)
            lemmas = []
            for i in range(count):
                lemma = fields[4 + 2 * i].lower()
                lemma = re.sub(r"\(.*\)$", "", lemma)
                if WORD.match(lemma):
                    lemmas.append(lemma)
            yield lemmas


def main():
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    table = defaultdict(set)
    for pos in ("noun", "verb", "adj", "adv"):
        for lemmas in synsets(src / f"data.{pos}"):
            for w in lemmas:
                table[w].update(x for x in lemmas if x != w)
    with open(out, "w", encoding="utf-8") as f:
        f.write("# word<TAB>comma-separated synonyms, extracted from WordNet 3.1\n")
        for w in sorted(table):
            if table[w]:
                f.write(f"{w}\t{','.join(sorted(table[w]))}\n")


if __name__ == "__main__":
    main()
