"""Converts a dependency-parsing pipeline's output into the annotated
sentence JSON Lines format: one object per sentence with per-token text,
lemma, fine/coarse part-of-speech tags, dependency label, in-sentence head
index, named-entity tag, capitalization shape and punctuation flag.

The pipeline object only needs the usual document API (``nlp(text)``
returning a document whose sentences yield tokens with ``text``,
``lemma_``, ``tag_``, ``pos_``, ``dep_``, ``head``, ``ent_type_``,
``shape_``, ``is_punct`` and a document-level index ``i``).  ``spacy`` is
loaded lazily when a model name is given.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator

_SANITIZE = str.maketrans({c: "_" for c in " \t\r\n()/"})


class ModelLoadError(RuntimeError):
    pass


def load_pipeline(model: str):
    """Load a language model by name.  Raises :class:`ModelLoadError` when
    the NLP library or the model is unavailable."""
    try:
        import spacy
    except ImportError as exc:
        raise ModelLoadError(
            "the spacy library is not installed; install the 'spacy' extra "
            "or pass a pipeline object directly") from exc
    try:
        return spacy.load(model)
    except Exception as exc:
        raise ModelLoadError(f"could not load model {model!r}: {exc}") \
            from exc


def _clean(label: str) -> str:
    out = label.translate(_SANITIZE)
    return out or "_"


def sentence_record(sent) -> dict:
    """One JSON object for a sentence span.

    Head indices are rebased to the sentence; the root points at itself.
    Token text and lemma are sanitized so they are usable as atom labels.
    """
    tokens = list(sent)
    offsets = {tok.i: j for j, tok in enumerate(tokens)}

    def head_index(tok, j: int) -> int:
        head = offsets.get(tok.head.i, j)
        return j if tok.head.i == tok.i else head

    return {
        "text": sent.text if hasattr(sent, "text") else
        " ".join(t.text for t in tokens),
        "tokens": [
            {
                "text": _clean(tok.text),
                "lemma": _clean(tok.lemma_ if tok.lemma_ else tok.text),
                "tag": tok.tag_,
                "pos": tok.pos_,
                "dep": tok.dep_,
                "head": head_index(tok, j),
                "ner": tok.ent_type_,
                "shape": tok.shape_,
                "is_punct": bool(tok.is_punct),
            }
            for j, tok in enumerate(tokens)
        ],
    }


def annotate(lines: Iterable[str], nlp) -> Iterator[dict]:
    """Sentence records for a stream of text, in document order."""
    for line in lines:
        line = line.strip()
        if not line:
            continue
        doc = nlp(line)
        for sent in doc.sents:
            yield sentence_record(sent)


def annotate_to_jsonl(lines: Iterable[str], nlp, out) -> int:
    count = 0
    for record in annotate(lines, nlp):
        out.write(json.dumps(record) + "\n")
        count += 1
    return count
