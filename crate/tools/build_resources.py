#!/usr/bin/env python3
"""Regenerate the shipped lexical resources.

Inputs (all obtainable offline from package indexes):
  --wordnet DIR        WordNet 3.0 database directory (data.noun, index.noun, *.exc, ...)
  --tagger-pickle PATH averaged-perceptron weights pickle (textblob-aptagger's trontagger-0.1.0.pickle)
  wordfreq             python package, English frequency list

Outputs:
  resources/frequency.tsv      word<TAB>count, '# total N' header
  resources/concreteness.tsv   lemma<TAB>rating, '# scale 1 5' header (WordNet physical-entity proxy)
  resources/hypernymy.tsv      noun lemma<TAB>mean minimum hypernym depth
  resources/embeddings.txt     word v1 ... vd  (LSA space over WordNet glosses)
  resources/tagger.model       svf-tagger flat model
  crates/core/data/lemma_exceptions.tsv, crates/core/data/lemmas.tsv
"""

import argparse
import math
import os
import pickle
import re
from collections import Counter, defaultdict

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
PHYSICAL_ENTITY = "00001930"
STOP = set(
    """a an the and or but if of to in on at by for with from as is are was were be been being
    that this these those it its he she they them his her their we our you your i me my
    not no nor so than too very can will just do does did has have had which who whom whose
    what when where why how all any both each few more most other some such only own same
    into over under again further then once here there about above below up down out off
    s t also""".split()
)


def read_lines(path):
    with open(path, "rb") as fh:
        for raw in fh:
            line = raw.decode("utf-8", "replace").rstrip("\r\n")
            if not line or line.startswith(" "):
                continue
            yield line


def parse_data(wn_dir, pos):
    synsets = {}
    for line in read_lines(os.path.join(wn_dir, "data." + POS_FILES[pos])):
        head, _, gloss = line.partition(" | ")
        f = head.split()
        offset = f[0]
        w_cnt = int(f[3], 16)
        words = [f[4 + 2 * i].lower() for i in range(w_cnt)]
        idx = 4 + 2 * w_cnt
        p_cnt = int(f[idx])
        idx += 1
        hypers = []
        for _ in range(p_cnt):
            sym, off, ppos = f[idx], f[idx + 1], f[idx + 2]
            idx += 4
            if sym in ("@", "@i") and ppos == "n":
                hypers.append(off)
        synsets[offset] = {"words": words, "hypers": hypers, "gloss": gloss}
    return synsets


def parse_index(wn_dir, pos):
    index = {}
    for line in read_lines(os.path.join(wn_dir, "index." + POS_FILES[pos])):
        f = line.split()
        lemma = f[0]
        synset_cnt = int(f[2])
        index[lemma] = f[-synset_cnt:]
    return index


def min_depths(nouns):
    memo = {}

    def depth(off, stack=()):
        if off in memo:
            return memo[off]
        hy = nouns[off]["hypers"]
        if not hy or off in stack:
            d = 0
        else:
            d = 1 + min(depth(h, stack + (off,)) for h in hy)
        memo[off] = d
        return d

    for off in nouns:
        depth(off)
    return memo


def ancestors(nouns, off, memo):
    if off in memo:
        return memo[off]
    out = {off}
    for h in nouns[off]["hypers"]:
        out |= ancestors(nouns, h, memo)
    memo[off] = out
    return out


def build_frequency(out_dir, n_words):
    import wordfreq

    total = 1_000_000_000
    rows = []
    for w in wordfreq.top_n_list("en", n_words, wordlist="best"):
        if not re.fullmatch(r"[a-z][a-z']*", w):
            continue
        c = int(round(wordfreq.word_frequency(w, "en", wordlist="best") * total))
        if c >= 1:
            rows.append((w, c))
    with open(os.path.join(out_dir, "frequency.tsv"), "w") as fh:
        fh.write(f"# total {total}\n")
        for w, c in rows:
            fh.write(f"{w}\t{c}\n")
    return [w for w, _ in rows]


def build_lexical(wn_dir, out_dir, data_dir, vocab):
    vocab_set = set(vocab)
    nouns = parse_data(wn_dir, "n")
    noun_index = parse_index(wn_dir, "n")
    depths = min_depths(nouns)
    anc_memo = {}

    with open(os.path.join(out_dir, "hypernymy.tsv"), "w") as hy, open(
        os.path.join(out_dir, "concreteness.tsv"), "w"
    ) as cn:
        cn.write("# scale 1 5\n")
        for lemma in sorted(noun_index):
            if lemma not in vocab_set:
                continue
            offs = noun_index[lemma]
            mean_depth = sum(depths[o] for o in offs) / len(offs)
            hy.write(f"{lemma}\t{mean_depth:.4f}\n")
            weights = [1.0 / (r + 1) for r in range(len(offs))]
            phys = sum(
                w for w, o in zip(weights, offs) if PHYSICAL_ENTITY in ancestors(nouns, o, anc_memo)
            )
            frac = phys / sum(weights)
            cn.write(f"{lemma}\t{1.0 + 4.0 * frac:.4f}\n")

    with open(os.path.join(data_dir, "lemma_exceptions.tsv"), "w") as fh:
        for pos, name in POS_FILES.items():
            for line in read_lines(os.path.join(wn_dir, name + ".exc")):
                f = line.split()
                if len(f) >= 2 and "_" not in f[0]:
                    fh.write(f"{pos}\t{f[0]}\t{f[1]}\n")
    with open(os.path.join(data_dir, "lemmas.tsv"), "w") as fh:
        for pos in ("n", "v", "a"):
            for lemma in sorted(parse_index(wn_dir, pos)):
                if lemma in vocab_set:
                    fh.write(f"{pos}\t{lemma}\n")


def build_embeddings(wn_dir, out_dir, vocab, dims, n_out):
    docs = []
    for pos in POS_FILES:
        for syn in parse_data(wn_dir, pos).values():
            text = " ".join(w.replace("_", " ") for w in syn["words"]) + " " + syn["gloss"]
            toks = [t for t in re.findall(r"[a-z]+", text.lower()) if len(t) > 1 and t not in STOP]
            if toks:
                docs.append(Counter(toks))
    df = Counter()
    for d in docs:
        df.update(d.keys())
    terms = sorted(t for t, c in df.items() if c >= 3)
    tid = {t: i for i, t in enumerate(terms)}
    rows, cols, vals = [], [], []
    gf = defaultdict(float)
    for d in docs:
        for t, c in d.items():
            if t in tid:
                gf[t] += c
    entropy = defaultdict(float)
    n_docs = len(docs)
    for d in docs:
        for t, c in d.items():
            if t in tid:
                p = c / gf[t]
                entropy[t] += p * math.log(p) / math.log(n_docs)
    for j, d in enumerate(docs):
        for t, c in d.items():
            if t in tid:
                rows.append(tid[t])
                cols.append(j)
                vals.append(math.log1p(c) * (1.0 + entropy[t]))
    m = sp.csr_matrix((vals, (rows, cols)), shape=(len(terms), n_docs))
    u, s, _ = svds(m, k=dims, random_state=7)
    order = np.argsort(-s)
    vecs = u[:, order] * s[order]
    # fix SVD sign ambiguity: largest-magnitude entry of each column positive
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            vecs[:, k] = -col
    written = 0
    with open(os.path.join(out_dir, "embeddings.txt"), "w") as fh:
        for w in vocab:
            if w in tid and w not in STOP:
                v = vecs[tid[w]]
                if not np.any(v):
                    continue
                fh.write(w + " " + " ".join(f"{x:.4f}" for x in v) + "\n")
                written += 1
                if written >= n_out:
                    break


def build_tagger(pickle_path, out_dir, min_weight):
    weights, tagdict, classes = pickle.load(open(pickle_path, "rb"), encoding="latin1")
    with open(os.path.join(out_dir, "tagger.model"), "w") as fh:
        fh.write("svf-tagger 1\n")
        fh.write("classes\t" + " ".join(sorted(classes)) + "\n")
        for word in sorted(tagdict):
            fh.write(f"D\t{word}\t{tagdict[word]}\n")
        for feat in sorted(weights):
            for tag in sorted(weights[feat]):
                w = weights[feat][tag]
                if abs(w) >= min_weight:
                    fh.write(f"W\t{feat}\t{tag}\t{w:.3f}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wordnet", required=True)
    ap.add_argument("--tagger-pickle", required=True)
    ap.add_argument("--out", default="resources")
    ap.add_argument("--data-out", default="crates/core/data")
    ap.add_argument("--freq-words", type=int, default=60000)
    ap.add_argument("--dims", type=int, default=50)
    ap.add_argument("--embed-words", type=int, default=12000)
    ap.add_argument("--min-weight", type=float, default=0.05)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(args.data_out, exist_ok=True)
    vocab = build_frequency(args.out, args.freq_words)
    build_lexical(args.wordnet, args.out, args.data_out, vocab)
    build_embeddings(args.wordnet, args.out, vocab, args.dims, args.embed_words)
    build_tagger(args.tagger_pickle, args.out, args.min_weight)


if __name__ == "__main__":
    main()
