# Copyright 2026 The metricfair Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Writes the tiny synthetic provider fixtures used by the tests.

The "models" here are deterministic hash functions, not neural networks:
tiny-enc embeds tokens, tiny-gen emits teacher-forced log-probs and
tiny-reg returns a unigram-overlap score. Output is byte-stable, so the
checked-in fixtures can be regenerated and diffed.

Usage: make_tiny_fixtures.py [repo_root]
"""

import hashlib
import json
import pathlib
import re
import struct
import sys

DIM = 8
META_ENC = {"model": "tiny-enc", "revision": "tiny-r1", "layer": 4,
            "created_at": "2026-01-01T00:00:00Z"}
META_ENC_L2 = dict(META_ENC, layer=2)
META_GEN = {"model": "tiny-gen", "revision": "tiny-r1", "layer": -1,
            "created_at": "2026-01-01T00:00:00Z"}
META_REG = {"model": "tiny-reg", "revision": "tiny-r1", "layer": -1,
            "created_at": "2026-01-01T00:00:00Z"}

EXTRA_TEXTS = [
    "the cat sat on the mat",
    "a cat sat on a mat",
    "the dog barked",
    "dog",
]


def tokenize(text):
    return re.findall(r"\w+|[^\w\s]", text.lower())


def digest(s):
    return hashlib.sha256(s.encode("utf-8")).digest()


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def num(x):
    # Shortest decimal that round-trips the float32 value.
    v = f32(x)
    for p in range(6, 12):
        s = "%.*g" % (p, v)
        if f32(float(s)) == v:
            return float(s)
    return v


def token_vector(tok):
    d = digest("vec:" + tok)
    return [(d[i] / 127.5) - 1.0 for i in range(DIM)]


def embed(text, layer):
    toks = tokenize(text)
    base = [token_vector(t) for t in toks]
    mix = 0.15 if layer == 4 else 0.05
    vecs = []
    for i in range(len(toks)):
        v = list(base[i])
        for j in (i - 1, i + 1):
            if 0 <= j < len(toks):
                v = [a + mix * b for a, b in zip(v, base[j])]
        vecs.append([num(a) for a in v])
    return toks, vecs


def logprobs(source, target):
    src = set(tokenize(source))
    toks = tokenize(target) + ["</s>"]
    out = []
    for t in toks:
        h = digest("lp:" + t)[0]
        if t == "</s>":
            lp = -0.3
        elif t in src:
            lp = -0.05 - 0.05 * (h % 4)
        else:
            lp = -1.5 - 0.25 * (h % 8)
        out.append(num(lp))
    return toks, out


def overlap_score(sys_text, ref_text):
    s, r = tokenize(sys_text), tokenize(ref_text)
    common = sum(min(s.count(t), r.count(t)) for t in set(s))
    if common == 0:
        return 0.0
    p, rec = common / len(s), common / len(r)
    return round(2 * p * rec / (p + rec), 6)


def main():
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    data = root / "tests" / "data"
    texts = set(EXTRA_TEXTS)
    pairs = set()
    for name in ("gender_pairs.jsonl", "mixed_pairs.jsonl", "equal_pairs.jsonl"):
        for line in (data / name).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            texts.update([rec["reference"], rec["sys_stereo"], rec["sys_anti"]])
            pairs.add((rec["sys_stereo"], rec["reference"]))
            pairs.add((rec["sys_anti"], rec["reference"]))
    for line in (data / "judged.tsv").read_text(encoding="utf-8").splitlines():
        cols = line.split("\t")
        if len(cols) == 5:
            texts.update([cols[2], cols[3]])
            pairs.add((cols[2], cols[3]))
    cands = (data / "candidates.txt").read_text(encoding="utf-8").splitlines()
    refs = (data / "references.txt").read_text(encoding="utf-8").splitlines()
    for c, r in zip(cands, refs):
        texts.update([c, r])
        pairs.add((c, r))
    pairs.add(("the cat sat on the mat", "a cat sat on a mat"))

    out = root / "tests" / "fixtures" / "tiny"
    out.mkdir(parents=True, exist_ok=True)
    dump = lambda obj: json.dumps(obj, ensure_ascii=False, sort_keys=True)
    with open(out / "embed.jsonl", "w", encoding="utf-8") as f:
        for meta in (META_ENC, META_ENC_L2):
            for t in sorted(texts):
                toks, vecs = embed(t, meta["layer"])
                f.write(dump({"meta": meta, "text": t, "tokens": toks, "vectors": vecs}) + "\n")
    with open(out / "logprob.jsonl", "w", encoding="utf-8") as f:
        for sys_text, ref_text in sorted(pairs):
            for src, tgt in ((ref_text, sys_text), (sys_text, ref_text)):
                toks, lps = logprobs(src, tgt)
                f.write(dump({"meta": META_GEN, "source": src, "target": tgt,
                              "target_tokens": toks, "logprobs": lps}) + "\n")
    with open(out / "score.jsonl", "w", encoding="utf-8") as f:
        for sys_text, ref_text in sorted(pairs):
            f.write(dump({"meta": META_REG, "sys": sys_text, "ref": ref_text,
                          "score": overlap_score(sys_text, ref_text)}) + "\n")


if __name__ == "__main__":
    main()
