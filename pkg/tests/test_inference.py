import random

import pytest

from hedges.edges import Atom, parse_notation, to_string
from hedges.inference import (
    Claim,
    Conflict,
    OIETuple,
    actor_category,
    build_conflict_network,
    decompose_conjunctions,
    detect_claim,
    detect_conflict,
    detect_factions,
    edge_text,
    extract_claim_context,
    extract_oie,
    find_claims,
    inspect_predicate,
    resolve_anaphora,
)
from hedges.store import Store

E = parse_notation

POPULATION_EDGE = (
    "(is/P.scx (of/B.ma (the/M population/C) (the/M (special/M wards/C)))"
    " ((over/M (9/M million/M)) people/C)"
    " (with/T (exceeding/P.so (of/B.ma (the/M (total/M population/C))"
    " (the/M prefecture/C)) (13/M million/C))))")

BECK_EDGE = ("(+/B.mm (the/M (prolific/M (+/B.am film/C composer/C)))"
             " (+/B.am christophe/C beck/C))")

GONZALES_EDGE = (
    "(graduated/P.sx gonzales/C (from/T (in/B.ma"
    " (+/B.am crescent/C school/C)"
    " (,/J toronto/C (,/J ontario/C canada/C)))))")

RUSSIA_EDGE = (
    "(:/J (says/P.sr russia/C ('s/P.sc it/C ready/C))"
    " ((to/M deal/P.x) (with/T (new/M (+/B.am ukraine/C president/C)))))")


# ---------------------------------------------------------------------------
# Conjunction decomposition
# ---------------------------------------------------------------------------

def test_decompose_concept_conjunction():
    out = decompose_conjunctions(
        E("(likes/P.so mary/C (and/J books/C flowers/C))"))
    assert set(out) == {E("(likes/P.so mary/C books/C)"),
                        E("(likes/P.so mary/C flowers/C)")}


def test_decompose_relation_conjunction():
    out = decompose_conjunctions(
        E("(and/J (likes/P.so mary/C astronomy/C)"
          " (plays/P.so alice/C football/C))"))
    assert set(out) == {E("(likes/P.so mary/C astronomy/C)"),
                        E("(plays/P.so alice/C football/C)")}


def test_decompose_subject_propagation():
    out = decompose_conjunctions(
        E("(and/J (likes/P.so mary/C astronomy/C) (plays/P.o football/C))"))
    assert set(out) == {E("(likes/P.so mary/C astronomy/C)"),
                        E("(plays/P.so mary/C football/C)")}


def test_decompose_fixpoint():
    edge = E("(likes/P.so mary/C (and/J books/C flowers/C))")
    first = decompose_conjunctions(edge)
    for derived in first:
        assert decompose_conjunctions(derived) == []


def test_decompose_ignores_lemma_links():
    assert decompose_conjunctions(E("(lemma/J apples/C apple/C)")) == []


def test_decompose_nested_conjunctions():
    out = decompose_conjunctions(E(GONZALES_EDGE))
    finals = [e for e in out if "/J" not in to_string(e).replace("lemma/J", "")]
    cities = {"toronto", "ontario", "canada"}
    rendered = {to_string(e) for e in finals}
    for city in cities:
        assert any(city in r for r in rendered)


# ---------------------------------------------------------------------------
# Text rendering
# ---------------------------------------------------------------------------

def test_edge_text_builder_infix():
    assert edge_text(E("(of/B.ma (the/M population/C)"
                       " (the/M (special/M wards/C)))")) == \
        "the population of the special wards"


def test_edge_text_compound_skips_plus():
    assert edge_text(E("(+/B.am christophe/C beck/C)")) == "christophe beck"


def test_edge_text_relation_subject_first():
    assert edge_text(E("(exceeding/P.so (of/B.ma (the/M (total/M"
                       " population/C)) (the/M prefecture/C))"
                       " (13/M million/C))")) == \
        "the total population of the prefecture exceeding 13 million"


def test_edge_text_prefers_store_text():
    store = Store()
    edge = E("(is/P berlin/C nice/C)")
    store.add(edge, text="Berlin is nice.")
    assert edge_text(edge, store) == "Berlin is nice."


# ---------------------------------------------------------------------------
# Relation tuples
# ---------------------------------------------------------------------------

def test_oie_population():
    tuples = extract_oie(E(POPULATION_EDGE))
    assert tuples == [OIETuple("is", (
        "the population of the special wards",
        "over 9 million people",
        "with the total population of the prefecture exceeding 13 million"))]


def test_oie_symmetric_compound():
    tuples = extract_oie(E(BECK_EDGE))
    assert OIETuple("is", ("the prolific film composer",
                           "christophe beck")) in tuples
    assert OIETuple("is", ("christophe beck",
                           "the prolific film composer")) in tuples
    assert len(tuples) == 2


def test_oie_symmetry_property():
    rng = random.Random(13)
    words = ["lake", "park", "tower", "square", "cafe", "museum"]
    for _ in range(30):
        w1, w2, w3, w4 = rng.sample(words, 4)
        a1 = E(f"({w1}/M {w2}/C)")
        a2 = E(f"(+/B.am {w3}/C {w4}/C)")
        edge = parse_notation(
            f"(+/B.mm {to_string(a1)} {to_string(a2)})")
        tuples = extract_oie(edge)
        mm = [t for t in tuples if t.rel == "is"]
        assert len(mm) == 2
        assert mm[0].args == (mm[1].args[1], mm[1].args[0])


def test_oie_main_auxiliary_requires_composite_arguments():
    assert extract_oie(E("(+/B.am barack/C obama/C)")) == []
    tuples = extract_oie(E("(+/B.am (+/B.am prime/C minister/C)"
                           " (+/B.am juha/C sipila/C))"))
    assert OIETuple("is", ("juha sipila", "prime minister")) in tuples


def test_oie_gonzales_conjunction_fanout():
    tuples = extract_oie(E(GONZALES_EDGE))
    for place in ("toronto", "ontario", "canada"):
        assert OIETuple("graduated from",
                        ("gonzales", f"crescent school in {place}")) in tuples
    assert len(tuples) == 3


def test_oie_split_relation_concatenation():
    tuples = extract_oie(E("(is/P.sc aragorn/C (of/B.ma king/C gondor/C))"))
    assert OIETuple("is king of", ("aragorn", "gondor")) in tuples


# ---------------------------------------------------------------------------
# Claims
# ---------------------------------------------------------------------------

def claim_store():
    store = Store()
    store.add(E("(lemma/J says/P say/P)"))
    store.add(E("(lemma/J claims/P claim/P)"))
    store.add(E("(lemma/J accuses/P accuse/P)"))
    store.add(E("(lemma/J denies/P deny/P)"))
    return store


def test_detect_claim_russia():
    store = claim_store()
    claim = detect_claim(E(RUSSIA_EDGE), store)
    assert claim is not None
    assert claim.actor == Atom("russia", "C")
    assert claim.pronoun == "it"
    assert claim.claim == E("('s/P.sc russia/C ready/C)")
    assert claim.contexts == (
        E("((to/M deal/P.x) (with/T (new/M (+/B.am ukraine/C"
          " president/C))))"),)
    assert claim.specifications == (
        E("(with/T (new/M (+/B.am ukraine/C president/C)))"),)


def test_detect_claim_requires_lemma_edge():
    assert detect_claim(E(RUSSIA_EDGE), Store()) is None


def test_detect_claim_claims_predicate():
    store = claim_store()
    edge = E("(claims/P.sr (+/B.am google/C boss/C)"
             " (knows/P.so he/C (his/M salary/C)))")
    claim = detect_claim(edge, store)
    assert claim is not None
    assert claim.actor == E("(+/B.am google/C boss/C)")


def test_detect_claim_rejects_other_lemmas():
    store = claim_store()
    edge = E("(denies/P.sr russia/C (is/P.sc it/C ready/C))")
    assert detect_claim(edge, store) is None


def test_resolve_anaphora_cases():
    base = Claim(actor=Atom("russia", "C"), predicate=Atom("says", "P", "sr"),
                 claim=E("(is/P.sc it/C ready/C)"))
    resolved = resolve_anaphora(base)
    assert resolved.claim == E("(is/P.sc russia/C ready/C)")
    assert resolved.pronoun == "it"
    she = Claim(actor=Atom("merkel", "C"), predicate=Atom("says", "P", "sr"),
                claim=E("(is/P.sc she/C ready/C)"))
    assert resolve_anaphora(she).pronoun == "she"
    plain = Claim(actor=Atom("russia", "C"),
                  predicate=Atom("says", "P", "sr"),
                  claim=E("(is/P.sc moscow/C ready/C)"))
    assert resolve_anaphora(plain) == plain


def test_actor_category():
    assert actor_category({"he": 3, "it": 1}) == "male"
    assert actor_category({}) == "unknown"
    assert actor_category({"she": 2, "they": 2}) == "unknown"
    assert actor_category({"she": 2, "her": 5}) == "female"


def test_inspect_predicate():
    assert inspect_predicate(E("(not/M is/P)")) == ("present", True)
    assert inspect_predicate(Atom("was", "P")) == ("past", False)
    assert inspect_predicate(E("(will/M be/P)")) == ("future", False)
    assert inspect_predicate(E("(not/M (will/M be/P))")) == ("future", True)
    assert inspect_predicate(Atom("is", "P")) == ("present", False)


def test_claim_tense_from_inner_relation():
    store = claim_store()
    edge = E("(says/P.sr putin/C ((will/M be/P.sc) he/C president/C))")
    claim = detect_claim(edge, store)
    assert claim.tense == "future"
    assert claim.pronoun == "he"


def test_extract_claim_context_without_wrapper():
    rel, contexts, specs = extract_claim_context(
        E("(says/P.sr russia/C ('s/P.sc it/C ready/C))"))
    assert contexts == ()
    assert specs == ()
    assert rel == E("(says/P.sr russia/C ('s/P.sc it/C ready/C))")


def test_extract_claim_context_specification_projection():
    rel, contexts, specs = extract_claim_context(
        E("(opened/P.sox pablo/C (a/M bar/C) (in/T spain/C))"))
    assert specs == (E("(in/T spain/C)"),)


def test_find_claims_sorted():
    store = claim_store()
    store.add(E(RUSSIA_EDGE))
    store.add(E("(says/P.sr us/C (is/P.sc it/C ready/C))"))
    claims = find_claims(store)
    assert [to_string(c.actor) for c in claims] == ["russia/C", "us/C"]


# ---------------------------------------------------------------------------
# Conflicts
# ---------------------------------------------------------------------------

CONFLICT_EDGE = ("(accuses/P.sox us/C russia/C"
                 " (over/T (meddled/P.so russia/C election/C)))")


def test_detect_conflict():
    store = claim_store()
    conflict = detect_conflict(E(CONFLICT_EDGE), store)
    assert conflict == Conflict(Atom("us", "C"), Atom("russia", "C"),
                                E("(meddled/P.so russia/C election/C)"),
                                "over")


def test_detect_conflict_rejects_say():
    store = claim_store()
    edge = E("(says/P.sox us/C russia/C"
             " (over/T (meddled/P.so russia/C election/C)))")
    assert detect_conflict(edge, store) is None


def test_detect_conflict_requires_trigger():
    store = claim_store()
    assert detect_conflict(E("(accuses/P.so us/C russia/C)"), store) is None
    edge = E("(accuses/P.sox us/C russia/C"
             " (during/T (meddled/P.so russia/C election/C)))")
    assert detect_conflict(edge, store) is None


# ---------------------------------------------------------------------------
# Factions
# ---------------------------------------------------------------------------

def conflicts_between(pairs):
    topic = E("(is/P tension/C high/C)")
    return [Conflict(Atom(a, "C"), Atom(b, "C"), topic, "over")
            for a, b in pairs]


def test_factions_single_edge():
    net = build_conflict_network(conflicts_between([("a", "b")]))
    a, b, unassigned = detect_factions(net)
    assert a == {"a/C"} and b == {"b/C"} and unassigned == set()


def test_factions_triangle():
    net = build_conflict_network(
        conflicts_between([("a", "b"), ("b", "c"), ("a", "c")]))
    a, b, unassigned = detect_factions(net)
    assert a == {"a/C"} and b == {"b/C"} and unassigned == {"c/C"}


def test_factions_star():
    net = build_conflict_network(
        conflicts_between([("x", "l1"), ("x", "l2"), ("x", "l3")]))
    a, b, unassigned = detect_factions(net)
    assert a == {"x/C"}
    assert b == {"l1/C", "l2/C", "l3/C"}
    assert unassigned == set()


def test_factions_two_blocs():
    pairs = [(f"x{i}", f"y{j}") for i in range(4) for j in range(4)]
    net = build_conflict_network(conflicts_between(pairs))
    a, b, unassigned = detect_factions(net)
    bloc_x = {f"x{i}/C" for i in range(4)}
    bloc_y = {f"y{j}/C" for j in range(4)}
    assert sorted(map(sorted, (a, b))) == sorted(map(sorted,
                                                     (bloc_x, bloc_y)))
    assert unassigned == set()
    for faction in (a, b):
        for m in faction:
            for n in faction:
                assert not net.in_conflict(m, n)


def test_factions_empty_network():
    with pytest.raises(ValueError):
        detect_factions(build_conflict_network([]))
