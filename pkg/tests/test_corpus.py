#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Testes de leitura e escrita do corpus CSV/JSON."""

import os

import numpy as np
import pytest

from src.config import CORPUS_HEADER
from src.core.emotions import GameOutcome, SourceId, SourceKind
from src.core.exceptions import (
    DuplicateEntryError, MalformedRowError, UnknownOutcomeError, UnknownSourceKindError,
)
from src.ingest.corpus import load_corpus, load_corpus_json, save_corpus, save_corpus_json
from src.ingest.synthetic import SynthConfig, generate_synthetic

HEADER = ",".join(CORPUS_HEADER)
ROW = "CC-01,CC,lstm,0.6,0.1,0.1,0.05,0.05,0.05,0.05"


def _write(tmp_path, *lines, name="corpus.csv"):
    path = os.path.join(tmp_path, name)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    return path


def _assert_same_corpus(left, right):
    assert [r.clip_id for r in left] == [r.clip_id for r in right]
    for a, b in zip(left, right):
        assert a.outcome is b.outcome
        assert a.sources == b.sources
        for source in a.sources:
            np.testing.assert_allclose(a.get(source).probs, b.get(source).probs, atol=1e-12)


class TestLoadCorpus:
    def test_fixture(self, corpus_path):
        corpus = load_corpus(corpus_path)
        assert len(corpus) == 8
        assert [r.clip_id for r in corpus] == sorted(r.clip_id for r in corpus)
        expected = {"eac", "facet", "gpt3_ctx", "gpt4_ctx", "human_cb", "human_cf", "human_ctx", "lstm"}
        for record in corpus:
            assert {s.code for s in record.sources} == expected
            assert record.clip_id.startswith(record.outcome.value)
        assert {r.outcome for r in corpus} == set(GameOutcome)

    def test_single_row(self, tmp_path):
        [record] = load_corpus(_write(tmp_path, HEADER, ROW))
        assert record.get(SourceId(SourceKind.FACE_LSTM)).probs[0] == pytest.approx(0.6, abs=1e-12)

    def test_fused_source_code_with_detail(self, tmp_path):
        row = "CC-01,CC,fused_bci:lstm+gpt4_ctx,0.6,0.1,0.1,0.05,0.05,0.05,0.05"
        [record] = load_corpus(_write(tmp_path, HEADER, row))
        assert record.has(SourceId(SourceKind.FUSED_BCI, "lstm+gpt4_ctx"))

    def test_renormalizes_rounded_rows(self, tmp_path):
        row = "CC-01,CC,lstm,0.62,0.1,0.1,0.05,0.05,0.05,0.05"
        [record] = load_corpus(_write(tmp_path, HEADER, row))
        assert sum(record.get(SourceId(SourceKind.FACE_LSTM)).probs) == pytest.approx(1.0, abs=1e-9)

    def test_sum_out_of_window(self, tmp_path):
        row = "CC-01,CC,lstm,0.3,0.1,0.1,0.05,0.05,0.05,0.05"
        with pytest.raises(MalformedRowError) as info:
            load_corpus(_write(tmp_path, HEADER, ROW.replace("CC-01", "CC-00"), row))
        assert info.value.line == 3

    @pytest.mark.parametrize("value", ["abc", "", "-0.1"])
    def test_bad_probability(self, tmp_path, value):
        row = f"CC-01,CC,lstm,0.6,{value},0.1,0.05,0.05,0.05,0.05"
        with pytest.raises(MalformedRowError):
            load_corpus(_write(tmp_path, HEADER, row))

    def test_duplicate_pair(self, tmp_path):
        with pytest.raises(DuplicateEntryError):
            load_corpus(_write(tmp_path, HEADER, ROW, ROW))

    def test_conflicting_outcomes(self, tmp_path):
        other = "CC-01,DD,facet,0.6,0.1,0.1,0.05,0.05,0.05,0.05"
        with pytest.raises(MalformedRowError):
            load_corpus(_write(tmp_path, HEADER, ROW, other))

    def test_unknown_outcome(self, tmp_path):
        with pytest.raises(UnknownOutcomeError):
            load_corpus(_write(tmp_path, HEADER, ROW.replace(",CC,", ",XX,")))

    def test_unknown_source(self, tmp_path):
        with pytest.raises(UnknownSourceKindError):
            load_corpus(_write(tmp_path, HEADER, ROW.replace("lstm", "openface")))

    def test_wrong_header(self, tmp_path):
        with pytest.raises(MalformedRowError) as info:
            load_corpus(_write(tmp_path, HEADER.replace("joy", "happiness"), ROW))
        assert info.value.line == 1

    def test_empty_clip_id(self, tmp_path):
        with pytest.raises(MalformedRowError):
            load_corpus(_write(tmp_path, HEADER, ROW.replace("CC-01", "")))

    def test_empty_file(self, tmp_path):
        path = os.path.join(tmp_path, "empty.csv")
        open(path, "w").close()
        with pytest.raises(MalformedRowError):
            load_corpus(path)

    def test_header_only(self, tmp_path):
        assert load_corpus(_write(tmp_path, HEADER)) == []


class TestSaveCorpus:
    def test_round_trip(self, tmp_path):
        corpus = generate_synthetic(SynthConfig(n_clips_per_outcome=3, seed=9))
        path = os.path.join(tmp_path, "corpus.csv")
        save_corpus(corpus, path)
        _assert_same_corpus(load_corpus(path), corpus)

    def test_output_is_deterministic(self, tmp_path):
        corpus = generate_synthetic(SynthConfig(n_clips_per_outcome=2, seed=3))
        first, second = os.path.join(tmp_path, "a.csv"), os.path.join(tmp_path, "b.csv")
        save_corpus(corpus, first)
        save_corpus(list(reversed(corpus)), second)
        with open(first, "rb") as a, open(second, "rb") as b:
            assert a.read() == b.read()

    def test_header_and_row_order(self, tmp_path, corpus_path):
        path = os.path.join(tmp_path, "corpus.csv")
        save_corpus(load_corpus(corpus_path), path)
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        assert lines[0] == HEADER
        keys = [tuple(line.split(",")[i] for i in (0, 2)) for line in lines[1:]]
        assert keys == sorted(keys)
        assert len(lines) == 1 + 8 * 8

    def test_json_mirror(self, tmp_path, corpus_path):
        corpus = load_corpus(corpus_path)
        path = os.path.join(tmp_path, "corpus.json")
        save_corpus_json(corpus, path)
        _assert_same_corpus(load_corpus_json(path), corpus)

    def test_json_missing_emotion(self, tmp_path):
        path = _write(
            tmp_path,
            '{"clips": [{"clip_id": "CC-01", "outcome": "CC", "distributions": {"lstm": {"joy": 1.0}}}]}',
            name="corpus.json",
        )
        with pytest.raises(MalformedRowError):
            load_corpus_json(path)
