import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hindi_politeness.corpus import (LABELS, Comment, Corpus, PolitenessLabel, SplitSpec,
                                     compute_agreement, load_annotations, load_corpus, split, write_split)
from hindi_politeness.errors import CorpusError

N, A, P, I = LABELS


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _corpus(n, prefix="c"):
    return Corpus(tuple(Comment(f"{prefix}{i}", f"पाठ {i}", LABELS[i % 4]) for i in range(n)))


# -- labels -----------------------------------------------------------------

def test_label_parse_case_insensitive():
    assert PolitenessLabel.parse("Polite") is P
    assert PolitenessLabel.parse(" IMPOLITE ") is I


def test_label_parse_rejects_unknown():
    with pytest.raises(CorpusError, match="rude"):
        PolitenessLabel.parse("rude")


def test_canonical_order():
    assert sorted([I, P, N, A]) == [N, A, P, I]
    assert [lab.rank for lab in LABELS] == [0, 1, 2, 3]


# -- loading ----------------------------------------------------------------

def test_load_single_jsonl_record(tmp_path):
    path = _write(tmp_path / "c.jsonl", ['{"id":"c1","text":"धन्यवाद","label":"polite"}'])
    corpus = load_corpus(path)
    assert list(corpus) == [Comment("c1", "धन्यवाद", P)]


def test_unknown_label_reports_line(tmp_path):
    path = _write(tmp_path / "c.jsonl", ['{"id":"c1","text":"धन्यवाद"}',
                                         '{"id":"c2","text":"x","label":"rude"}'])
    with pytest.raises(CorpusError, match=r"unknown label 'rude' at line 2"):
        load_corpus(path)


def test_malformed_json_reports_line(tmp_path):
    path = _write(tmp_path / "c.jsonl", ['{"id":"c1","text":"a"}', '{"id": broken'])
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus(path)


@pytest.mark.parametrize("line", ['{"text":"a"}', '{"id":"","text":"a"}', '{"id":"x"}',
                                  '{"id":"x","text":"   "}', '["x","y"]'])
def test_missing_fields_rejected(tmp_path, line):
    with pytest.raises(CorpusError, match="line 1"):
        load_corpus(_write(tmp_path / "c.jsonl", [line]))


def test_duplicate_id_rejected(tmp_path):
    path = _write(tmp_path / "c.jsonl", ['{"id":"a","text":"x"}', '{"id":"a","text":"y"}'])
    with pytest.raises(CorpusError, match="duplicate id 'a' at line 2"):
        load_corpus(path)


def test_label_optional_and_extra_fields_ignored(tmp_path):
    path = _write(tmp_path / "c.jsonl", ['{"id":"a","text":"x","source":"blog"}'])
    (c,) = load_corpus(path)
    assert c.label is None


def test_load_tsv(tmp_path):
    path = _write(tmp_path / "c.tsv", ["a\tneutral\tसुन्दर रचना", "b\t\tकुछ\tभी"])
    corpus = load_corpus(path)
    assert corpus.ids == ["a", "b"]
    assert corpus[0].label is N
    assert corpus[1].label is None
    assert corpus[1].text == "कुछ\tभी"


def test_file_order_preserved(tmp_path):
    ids = [f"id{i}" for i in random.Random(3).sample(range(100), 100)]
    path = _write(tmp_path / "c.jsonl", [json.dumps({"id": i, "text": "x"}) for i in ids])
    assert load_corpus(path).ids == ids


def test_corpus_rejects_duplicate_ids():
    with pytest.raises(CorpusError):
        Corpus((Comment("a", "x"), Comment("a", "y")))


def test_load_annotations_without_text(tmp_path):
    path = _write(tmp_path / "a.jsonl", ['{"id":"a","label":"polite"}'])
    assert load_annotations(path) == [("a", P)]


# -- splitting ---------------------------------------------------------------

def test_split_spec_defaults():
    spec = SplitSpec()
    assert (spec.train_fraction, spec.test_fraction, spec.validation_fraction) == (Fraction(7, 10), Fraction(1, 10), Fraction(1, 5))


@pytest.mark.parametrize("fractions", [(0.7, 0.2, 0.2), (1.0, 0.0, 0.0), (0.5, 0.5, 0.0), (-0.1, 0.6, 0.5)])
def test_split_spec_rejects_bad_fractions(fractions):
    with pytest.raises(CorpusError):
        SplitSpec(*fractions)


def test_split_sizes_full_corpus_scale():
    assert SplitSpec().sizes(25660) == (17962, 2566, 5132)


def test_split_sizes_small():
    parts = split(_corpus(10), SplitSpec(seed=1))
    assert tuple(len(p) for p in parts) == (7, 1, 2)


def test_split_empty_corpus():
    with pytest.raises(CorpusError):
        split(Corpus(()), SplitSpec())


def test_split_ignores_file_order():
    corpus = _corpus(500)
    shuffled = list(corpus.comments)
    random.Random(11).shuffle(shuffled)
    a = split(corpus, SplitSpec(seed=5))
    b = split(Corpus(tuple(shuffled)), SplitSpec(seed=5))
    assert [set(p.ids) for p in a] == [set(p.ids) for p in b]


def test_split_ignores_labels():
    corpus = _corpus(200)
    relabeled = Corpus(tuple(Comment(c.id, c.text, N) for c in corpus))
    assert [set(p.ids) for p in split(corpus, SplitSpec(seed=2))] == \
           [set(p.ids) for p in split(relabeled, SplitSpec(seed=2))]


def test_split_depends_on_seed():
    corpus = _corpus(200)
    assert set(split(corpus, SplitSpec(seed=1))[0].ids) != set(split(corpus, SplitSpec(seed=2))[0].ids)


def test_split_parts_keep_input_order():
    corpus = _corpus(100)
    pos = {cid: i for i, cid in enumerate(corpus.ids)}
    for part in split(corpus, SplitSpec(seed=9)):
        assert [pos[c] for c in part.ids] == sorted(pos[c] for c in part.ids)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.text(min_size=1, max_size=8), min_size=1, max_size=150),
       st.integers(min_value=0, max_value=2**64 - 1))
def test_split_is_partition(ids, seed):
    corpus = Corpus(tuple(Comment(i, "x") for i in sorted(ids)))
    parts = split(corpus, SplitSpec(seed=seed))
    sets = [set(p.ids) for p in parts]
    assert sum(map(len, parts)) == len(corpus)
    assert sets[0] | sets[1] | sets[2] == set(ids)
    assert not (sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2])
    assert (len(parts[0]), len(parts[1])) == SplitSpec().sizes(len(corpus))[:2]


def test_write_split(tmp_path):
    manifest = write_split(_corpus(30), SplitSpec(seed=4), tmp_path / "x")
    assert manifest["counts"] == {"train": 21, "test": 3, "validation": 6}
    assert manifest["seed"] == 4
    for suffix, n in (("train", 21), ("test", 3), ("valid", 6)):
        assert len(load_corpus(tmp_path / f"x.{suffix}.jsonl")) == n
    assert json.loads((tmp_path / "x.manifest.json").read_text())["counts"]["train"] == 21


# -- agreement ----------------------------------------------------------------

def _pairs(labels):
    return [(f"i{k}", lab) for k, lab in enumerate(labels)]


def test_agreement_identical():
    labels = [LABELS[k % 4] for k in range(37)]
    rep = compute_agreement(_pairs(labels), _pairs(labels))
    assert rep.percent_agreement == 1.0
    assert rep.cohen_kappa == 1.0


def test_agreement_single_label_kappa_undefined():
    rep = compute_agreement(_pairs([P] * 5), _pairs([P] * 5))
    assert rep.percent_agreement == 1.0
    assert rep.cohen_kappa is None


def test_agreement_150_items_80_percent():
    rng = random.Random(0)
    a = [rng.choice(LABELS) for _ in range(150)]
    b = list(a)
    for k in rng.sample(range(150), 30):
        b[k] = LABELS[(a[k].rank + 1) % 4]
    rep = compute_agreement(_pairs(a), _pairs(b))
    assert rep.n_items == 150
    assert rep.percent_agreement == pytest.approx(0.80, abs=1e-12)


def test_agreement_total_disagreement_kappa():
    # p_o = 0, uniform marginals give p_e = 4 * (1/4)^2 = 1/4, kappa = -0.25/0.75
    rep = compute_agreement(_pairs([N, A, P, I]), _pairs([A, N, I, P]))
    assert rep.percent_agreement == 0.0
    assert rep.cohen_kappa == -1 / 3


def test_agreement_matches_id_not_position():
    a = [("x", N), ("y", P)]
    b = [("y", P), ("x", N)]
    assert compute_agreement(a, b).percent_agreement == 1.0


@pytest.mark.parametrize("a,b", [([], []), ([("x", N)], [("y", N)]), ([("x", N)], [("x", N), ("y", P)])])
def test_agreement_errors(a, b):
    with pytest.raises(CorpusError):
        compute_agreement(a, b)


label_lists = st.lists(st.tuples(st.sampled_from(LABELS), st.sampled_from(LABELS)), min_size=1, max_size=80)


@given(label_lists)
def test_agreement_properties(pairs):
    a = _pairs([p[0] for p in pairs])
    b = _pairs([p[1] for p in pairs])
    ab, ba = compute_agreement(a, b), compute_agreement(b, a)
    assert ab.percent_agreement == ba.percent_agreement
    assert ab.cohen_kappa == ba.cohen_kappa
    assert ab.confusion == tuple(zip(*ba.confusion))
    n = len(pairs)
    assert sum(map(sum, ab.confusion)) == n
    for k, lab in enumerate(LABELS):
        assert sum(ab.confusion[k]) == sum(p[0] is lab for p in pairs)
        assert sum(row[k] for row in ab.confusion) == sum(p[1] is lab for p in pairs)
    assert ab.percent_agreement == sum(ab.confusion[i][i] for i in range(4)) / n
    if ab.cohen_kappa is not None:
        assert -1 <= ab.cohen_kappa <= 1
        assert (ab.cohen_kappa == 1.0) == all(x == y for x, y in pairs)
