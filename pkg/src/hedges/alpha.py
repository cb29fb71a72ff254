"""Token classification stage: maps each token of an annotated sentence to
one of the six atomic type codes or DISCARD, using a random forest over
categorical linguistic features.

Sentences arrive pre-annotated (lemma, fine/coarse part-of-speech tags,
dependency label and head, named-entity tag, capitalization shape,
punctuation flag) as JSON Lines; see ``AnnotatedSentence.from_json``.
Feature values are plain category strings; trees split on one-hot
``feature == value`` tests.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable

from hedges.edges import Atom

LABELS = ("C", "P", "M", "B", "T", "J", "DISCARD")
NONE_VALUE = "NONE"
WORD_SIZES = (15, 25, 50, 100)

_ROOT_BAD = str.maketrans({c: "_" for c in " \t\r\n()/"})


def sanitize_root(text: str) -> str:
    """Lowercase a surface form and replace characters that the notation
    reserves."""
    out = text.lower().translate(_ROOT_BAD)
    return out or "_"


@dataclass(frozen=True)
class AnnotatedToken:
    text: str
    lemma: str
    tag: str
    pos: str
    dep: str
    head: int
    ner: str = ""
    shape: str = ""
    is_punct: bool = False


@dataclass(frozen=True)
class AnnotatedSentence:
    text: str
    tokens: tuple

    def __post_init__(self):
        roots = 0
        for i, tok in enumerate(self.tokens):
            if not 0 <= tok.head < len(self.tokens):
                raise ValueError(f"token {i}: head {tok.head} out of bounds")
            if tok.head == i:
                roots += 1
        if self.tokens and roots != 1:
            raise ValueError(f"expected exactly one root token, got {roots}")

    @property
    def root_index(self) -> int:
        for i, tok in enumerate(self.tokens):
            if tok.head == i:
                return i
        raise ValueError("sentence has no tokens")

    def depth(self, i: int) -> int:
        d = 0
        while self.tokens[i].head != i:
            i = self.tokens[i].head
            d += 1
            if d > len(self.tokens):
                raise ValueError("dependency links do not form a tree")
        return d

    def children(self, i: int) -> list[int]:
        return [j for j, tok in enumerate(self.tokens)
                if tok.head == i and j != i]

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotatedSentence":
        tokens = tuple(
            AnnotatedToken(
                text=t["text"], lemma=t.get("lemma", t["text"]),
                tag=t.get("tag", ""), pos=t.get("pos", ""),
                dep=t.get("dep", ""), head=int(t["head"]),
                ner=t.get("ner", ""), shape=t.get("shape", ""),
                is_punct=bool(t.get("is_punct", False)))
            for t in obj["tokens"])
        return cls(text=obj.get("text", ""), tokens=tokens)

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "tokens": [
                {"text": t.text, "lemma": t.lemma, "tag": t.tag,
                 "pos": t.pos, "dep": t.dep, "head": t.head, "ner": t.ner,
                 "shape": t.shape, "is_punct": t.is_punct}
                for t in self.tokens],
        }


def load_jsonl(path) -> list[tuple[AnnotatedSentence, list | None]]:
    """Read sentences (and labels, when present) from a JSON Lines file."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            sentence = AnnotatedSentence.from_json(obj)
            labels = obj.get("labels")
            if labels is not None:
                if len(labels) != len(sentence.tokens):
                    raise ValueError(f"line {lineno}: {len(labels)} labels "
                                     f"for {len(sentence.tokens)} tokens")
                for lab in labels:
                    if lab not in LABELS:
                        raise ValueError(f"line {lineno}: unknown label "
                                         f"{lab!r}")
            out.append((sentence, labels))
    return out


# ---------------------------------------------------------------------------
# Features
# ---------------------------------------------------------------------------

def _base_value(sentence, i, base, common_words):
    tok = sentence.tokens[i]
    if base == "TAG":
        return tok.tag or NONE_VALUE
    if base == "POS":
        return tok.pos or NONE_VALUE
    if base == "DEP":
        return tok.dep or NONE_VALUE
    if base == "NER":
        return tok.ner or NONE_VALUE
    if base == "SHAPE":
        return tok.shape or NONE_VALUE
    if base == "PUNCT":
        return "1" if tok.is_punct else "0"
    if base == "IS_ROOT":
        return "1" if tok.head == i else "0"
    if base.startswith("WORD"):
        n = int(base[4:])
        word = tok.text.lower()
        if common_words is None:
            return word
        return word if word in common_words.get(n, ()) else NONE_VALUE
    raise KeyError(f"unknown base feature {base!r}")


_BASE_NAMES = ["TAG", "POS", "DEP", "NER", "SHAPE", "PUNCT", "IS_ROOT"] + \
    [f"WORD{n}" for n in WORD_SIZES]


def _feature_targets(name: str) -> tuple[str, str]:
    """Split a feature name into (base, relation)."""
    if name.startswith("H") and name[1:] in _BASE_NAMES:
        return name[1:], "head"
    for suffix, rel in (("_BEFORE", "before"), ("_AFTER", "after")):
        if suffix in name:
            base, _, trailing = name.partition(suffix)
            return base + trailing, rel
    if name in _BASE_NAMES:
        return name, "self"
    raise KeyError(f"unknown feature {name!r}")


def feature_names() -> list[str]:
    names = list(_BASE_NAMES)
    names += ["H" + b for b in _BASE_NAMES if b != "IS_ROOT"]
    for base in _BASE_NAMES:
        if base == "IS_ROOT":
            continue
        if base.startswith("WORD"):
            names.append(f"WORD_BEFORE{base[4:]}")
            names.append(f"WORD_AFTER{base[4:]}")
        else:
            names.append(f"{base}_BEFORE")
            names.append(f"{base}_AFTER")
    return names


@dataclass(frozen=True)
class FeatureSet:
    name: str
    names: tuple

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate feature names")
        for n in self.names:
            _feature_targets(n)


FEATURE_SETS = {
    "F3": FeatureSet("F3", ("TAG", "DEP", "HDEP")),
    "F5": FeatureSet("F5", ("TAG", "DEP", "HDEP", "HPOS", "POS_AFTER")),
    "GA": FeatureSet("GA", ("WORD25", "TAG", "DEP", "HWORD25", "HWORD50",
                            "HWORD100", "HPOS", "HDEP", "IS_ROOT", "NER",
                            "WORD_BEFORE15", "WORD_BEFORE100", "WORD_AFTER15",
                            "PUNCT_BEFORE", "POS_AFTER")),
    "ALL": FeatureSet("ALL", tuple(feature_names())),
}


def extract_features(sentence: AnnotatedSentence, index: int,
                     fs: FeatureSet, common_words: dict | None = None
                     ) -> dict:
    """Categorical feature map for one token.  Missing relatives (sentence
    edges, the root's head) yield the sentinel value ``NONE``."""
    out = {}
    for name in fs.names:
        base, rel = _feature_targets(name)
        if rel == "self":
            j = index
        elif rel == "before":
            j = index - 1
        elif rel == "after":
            j = index + 1
        else:  # head
            j = sentence.tokens[index].head
            if j == index:
                j = -1
        if 0 <= j < len(sentence.tokens):
            out[name] = _base_value(sentence, j, base, common_words)
        else:
            out[name] = NONE_VALUE
    return out


# ---------------------------------------------------------------------------
# Decision forest
# ---------------------------------------------------------------------------

@dataclass
class TrainParams:
    n_trees: int = 100
    max_depth: int | None = None
    bag_fraction: float = 1.0
    bootstrap: bool = True
    seed: int = 0


def _gini(counts: dict) -> float:
    total = sum(counts.values())
    return 1.0 - sum((c / total) ** 2 for c in counts.values())


def _majority(labels: Iterable[str]) -> str:
    counts = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    best = max(counts.values())
    for lab in LABELS:
        if counts.get(lab) == best:
            return lab
    return next(iter(counts))


def _grow_tree(rows, labels, depth, max_depth):
    if len(set(labels)) == 1:
        return {"label": labels[0]}
    if max_depth is not None and depth >= max_depth:
        return {"label": _majority(labels)}
    n = len(labels)
    parent_counts = {}
    for lab in labels:
        parent_counts[lab] = parent_counts.get(lab, 0) + 1
    parent_gini = _gini(parent_counts)
    best = None
    candidates = sorted({(f, row[f]) for row in rows for f in row})
    for feature, value in candidates:
        left_counts, right_counts = {}, {}
        n_left = 0
        for row, lab in zip(rows, labels):
            if row[feature] == value:
                left_counts[lab] = left_counts.get(lab, 0) + 1
                n_left += 1
            else:
                right_counts[lab] = right_counts.get(lab, 0) + 1
        if n_left == 0 or n_left == n:
            continue
        weighted = (n_left * _gini(left_counts)
                    + (n - n_left) * _gini(right_counts)) / n
        gain = parent_gini - weighted
        if gain > 1e-12 and (best is None or gain > best[0] + 1e-12):
            best = (gain, feature, value)
    if best is None:
        return {"label": _majority(labels)}
    _, feature, value = best
    left_rows, left_labels, right_rows, right_labels = [], [], [], []
    for row, lab in zip(rows, labels):
        if row[feature] == value:
            left_rows.append(row)
            left_labels.append(lab)
        else:
            right_rows.append(row)
            right_labels.append(lab)
    return {
        "feature": feature,
        "value": value,
        "left": _grow_tree(left_rows, left_labels, depth + 1, max_depth),
        "right": _grow_tree(right_rows, right_labels, depth + 1, max_depth),
    }


def _tree_predict(node: dict, row: dict) -> str:
    while "label" not in node:
        branch = "left" if row.get(node["feature"]) == node["value"] \
            else "right"
        node = node[branch]
    return node["label"]


@dataclass
class Forest:
    feature_set: FeatureSet
    trees: list
    common_words: dict = field(default_factory=dict)

    def predict_row(self, row: dict) -> str:
        votes = {}
        for tree in self.trees:
            lab = _tree_predict(tree, row)
            votes[lab] = votes.get(lab, 0) + 1
        best = max(votes.values())
        for lab in LABELS:
            if votes.get(lab) == best:
                return lab
        return next(iter(votes))

    def predict(self, sentence: AnnotatedSentence, index: int) -> str:
        row = extract_features(sentence, index, self.feature_set,
                               self.common_words)
        return self.predict_row(row)

    def save(self, path):
        payload = {
            "format": "hedges-forest",
            "version": 1,
            "feature_set": {"name": self.feature_set.name,
                            "names": list(self.feature_set.names)},
            "common_words": {str(n): sorted(words)
                             for n, words in self.common_words.items()},
            "trees": self.trees,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path) -> "Forest":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != "hedges-forest":
            raise ValueError(f"{path}: not a forest file")
        if payload.get("version") != 1:
            raise ValueError(f"{path}: unsupported forest version")
        fs = FeatureSet(payload["feature_set"]["name"],
                        tuple(payload["feature_set"]["names"]))
        common = {int(n): frozenset(words)
                  for n, words in payload["common_words"].items()}
        return cls(fs, payload["trees"], common)


def _common_words(dataset) -> dict:
    counts = {}
    for sentence, _ in dataset:
        for tok in sentence.tokens:
            w = tok.text.lower()
            counts[w] = counts.get(w, 0) + 1
    ranked = sorted(counts, key=lambda w: (-counts[w], w))
    return {n: frozenset(ranked[:n]) for n in WORD_SIZES}


def train_forest(dataset, fs: FeatureSet, params: TrainParams | None = None
                 ) -> Forest:
    """Train a forest on (sentence, per-token label) pairs.

    Deterministic for a fixed seed.  Trees are grown to purity unless
    ``max_depth`` caps them, with bootstrap bags drawn per tree; pass
    ``bootstrap=False`` to train every tree on the full dataset.
    """
    params = params or TrainParams()
    if not dataset:
        raise ValueError("empty training dataset")
    for sentence, labels in dataset:
        if labels is None or len(labels) != len(sentence.tokens):
            raise ValueError("every token needs a label")
        for lab in labels:
            if lab not in LABELS:
                raise ValueError(f"unknown label {lab!r}")
    common = _common_words(dataset)
    rows, labels = [], []
    for sentence, sent_labels in dataset:
        for i, lab in enumerate(sent_labels):
            rows.append(extract_features(sentence, i, fs, common))
            labels.append(lab)
    rng = random.Random(params.seed)
    trees = []
    bag_size = max(1, int(round(params.bag_fraction * len(rows))))
    for _ in range(params.n_trees):
        if params.bootstrap:
            idx = [rng.randrange(len(rows)) for _ in range(bag_size)]
        else:
            idx = list(range(len(rows)))
        trees.append(_grow_tree([rows[i] for i in idx],
                                [labels[i] for i in idx], 0,
                                params.max_depth))
    return Forest(fs, trees, common)


def classify_tokens(sentence: AnnotatedSentence, forest: Forest
                    ) -> list[Atom | None]:
    """One atom per token (root = sanitized lowercase surface form, type =
    predicted code) or None for discarded tokens."""
    out = []
    for i, tok in enumerate(sentence.tokens):
        label = forest.predict(sentence, i)
        if label == "DISCARD":
            out.append(None)
        else:
            out.append(Atom(sanitize_root(tok.text), label))
    return out
