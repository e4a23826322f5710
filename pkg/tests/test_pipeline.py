#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Testes do manifesto, da grade de métodos e da gravação dos relatórios."""

import hashlib
import os

import numpy as np
import pytest

from src.application.fusion import PriorKind, bci_source_id, fuse_corpus
from src.application.nni import TrainConfig, load_params
from src.application.pipeline import (
    EmotionPipelineHandler, GridEntry, Integration, RunManifest, default_grid, derive_seed,
    load_manifest, manifest_from_dict, run_fuse, train_and_report, write_evaluation,
)
from src.communication.prompts import build_prompt, parse_response
from src.communication.replay_cache import CacheMode, ReplayCache, request_key
from src.core.emotions import ClipRecord, Emotion, GameOutcome, SourceId, SourceKind
from src.core.exceptions import CacheMissError, ConfigError, MissingSourceError, PipelineError, ResponseParseError
from src.ingest.corpus import load_corpus, save_corpus
from src.ingest.synthetic import SynthConfig, generate_synthetic

LSTM = SourceId(SourceKind.FACE_LSTM)
HUMAN_CF = SourceId(SourceKind.HUMAN_CONTEXT_FREE)
GPT4 = SourceId(SourceKind.CONTEXT_GPT4)
HUMAN_CTX = SourceId(SourceKind.HUMAN_CONTEXT_ONLY)
TRUTH = SourceId(SourceKind.HUMAN_CONTEXT_BASED)


def _entry(face, integration, context=None):
    data = {"face": face, "integration": integration}
    if context:
        data["context"] = context
    return GridEntry.from_dict(data)


def _strip(corpus, source):
    return [ClipRecord(r.clip_id, r.outcome, {s: d for s, d in r.distributions.items() if s != source})
            for r in corpus]


def _read_bytes(path):
    with open(path, "rb") as handle:
        return handle.read()


class TestDeriveSeed:
    def test_formula(self):
        digest = hashlib.sha256(b"synth").digest()
        assert derive_seed(0, "synth") == int.from_bytes(digest[:4], "big")
        assert derive_seed(7, "synth") == derive_seed(0, "synth") ^ 7

    def test_labels_are_independent(self):
        seeds = {derive_seed(0, label) for label in ("synth", "nni", "nni:lstm+gpt4_ctx/nni")}
        assert len(seeds) == 3

    def test_unsigned_32_bits(self):
        assert 0 <= derive_seed(0xFFFFFFFF, "nni") <= 0xFFFFFFFF


class TestGridEntry:
    def test_labels_and_outputs(self):
        bci = _entry("lstm", "bci", "gpt4_ctx")
        assert bci.label == "lstm+gpt4_ctx/bci"
        assert bci.output_source.code == "fused_bci:lstm+gpt4_ctx"
        llm = _entry("lstm", "llm")
        assert llm.label == "lstm/llm"
        assert llm.output_source.code == "fused_gpt4:lstm"
        nni = _entry("lstm", "NNI", "gpt4_ctx")
        assert nni.integration is Integration.NNI
        assert nni.output_source.code == "fused_nni:lstm+gpt4_ctx"

    @pytest.mark.parametrize("data", [
        {"face": "lstm", "integration": "llm", "context": "gpt4_ctx"},
        {"face": "lstm", "integration": "bci"},
        {"face": "gpt4_ctx", "integration": "bci", "context": "gpt3_ctx"},
        {"face": "lstm", "integration": "bci", "context": "facet"},
        {"face": "lstm", "integration": "kalman", "context": "gpt4_ctx"},
        {"face": "lstm", "integration": "bci", "context": "gpt4_ctx", "weight": 2},
        {"integration": "bci", "context": "gpt4_ctx"},
    ])
    def test_invalid(self, data):
        with pytest.raises(ConfigError):
            GridEntry.from_dict(data)

    def test_default_grid(self):
        grid = default_grid()
        assert len(grid) == 10
        assert sum(1 for e in grid if e.integration is Integration.LLM) == 3
        assert grid[6].label == "human_cf+human_ctx/bci"


class TestManifest:
    def test_fixture(self, manifest_path, fixtures_dir):
        manifest = load_manifest(manifest_path)
        assert manifest.corpus == os.path.join(fixtures_dir, "corpus_fixture.csv")
        assert manifest.cache_path == os.path.join(fixtures_dir, "replay_cache.jsonl")
        assert manifest.cache_mode is CacheMode.REPLAY
        assert manifest.prior is PriorKind.UNIFORM
        assert manifest.jobs == 2
        assert [e.label for e in manifest.grid] == [e.label for e in default_grid()]

    def test_defaults(self):
        manifest = manifest_from_dict({})
        assert manifest.seed == 0
        assert manifest.truth_source == TRUTH
        assert manifest.cache_mode is CacheMode.REPLAY
        assert len(manifest.grid) == 10

    def test_empty_grid(self):
        assert manifest_from_dict({"grid": []}).grid == ()

    @pytest.mark.parametrize("data", [
        {"colour": "blue"},
        {"seed": "zero"},
        {"seed": -1},
        {"jobs": 0},
        {"jobs": True},
        {"cache_mode": "offline"},
        {"prior": "jeffreys"},
        {"truth_source": "lstm"},
        {"grid": {"face": "lstm"}},
        {"grid": [{"face": "lstm", "integration": "llm"}, {"face": "lstm", "integration": "llm"}]},
    ])
    def test_invalid(self, data):
        with pytest.raises(ConfigError):
            manifest_from_dict(data)

    def test_unreadable_toml(self, tmp_path):
        path = os.path.join(tmp_path, "bad.toml")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("seed = = 1\n")
        with pytest.raises(ConfigError):
            load_manifest(path)

    def test_relative_paths_resolve_from_manifest(self, tmp_path):
        path = os.path.join(tmp_path, "run.toml")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write('corpus = "data/corpus.csv"\noutput_dir = "/abs/out"\n')
        manifest = load_manifest(path)
        assert manifest.corpus == os.path.join(tmp_path, "data", "corpus.csv")
        assert manifest.output_dir == "/abs/out"

    def test_overrides_skip_none(self):
        manifest = RunManifest(seed=3)
        assert manifest.with_overrides(seed=None, jobs=None) is manifest
        assert manifest.with_overrides(seed=9, jobs=None).seed == 9


class TestHandler:
    def test_fixture_grid_in_replay(self, manifest_path, cache_path):
        manifest = load_manifest(manifest_path)
        corpus = load_corpus(manifest.corpus)
        handler = EmotionPipelineHandler(manifest)
        fused = handler.run_grid(corpus)
        assert [r.clip_id for r in fused] == [r.clip_id for r in corpus]
        for entry in manifest.grid:
            assert all(r.has(entry.output_source) for r in fused)
        assert all(client.network_calls == 0 for client in handler.clients.values())

        expected = fuse_corpus(corpus, LSTM, GPT4)
        target = bci_source_id(LSTM, GPT4)
        for got, want in zip(fused, expected):
            np.testing.assert_allclose(got.get(target).probs, want.get(target).probs, atol=1e-12)

        cache = ReplayCache(cache_path)
        record = fused[0]
        bundle = build_prompt(record.outcome, record.get(LSTM), face_model="lstm")
        raw = cache.lookup(request_key("gpt-4-0613", 0.0, bundle.text)).raw_text
        llm_source = SourceId(SourceKind.FUSED_GPT4, "lstm")
        np.testing.assert_allclose(record.get(llm_source).probs, parse_response(raw).probs, atol=1e-12)

    def test_serial_matches_parallel(self, manifest_path):
        manifest = load_manifest(manifest_path)
        corpus = load_corpus(manifest.corpus)
        serial = EmotionPipelineHandler(manifest).run_grid(corpus, jobs=1)
        parallel = EmotionPipelineHandler(manifest).run_grid(corpus, jobs=4)
        assert [dict(r.distributions) for r in serial] == [dict(r.distributions) for r in parallel]

    def test_prepare_fetches_missing_context(self, manifest_path):
        manifest = load_manifest(manifest_path).with_overrides(grid=(_entry("lstm", "bci", "gpt4_ctx"),))
        corpus = _strip(load_corpus(manifest.corpus), GPT4)
        prepared = EmotionPipelineHandler(manifest).prepare(corpus)
        for record in prepared:
            assert record.has(GPT4)
            if record.outcome is GameOutcome.CC:
                assert record.get(GPT4)[Emotion.JOY] == pytest.approx(0.70, abs=1e-12)

    def test_prepare_rejects_unobtainable_context(self, manifest_path):
        manifest = load_manifest(manifest_path).with_overrides(grid=(_entry("human_cf", "bci", "human_ctx"),))
        corpus = _strip(load_corpus(manifest.corpus), HUMAN_CTX)
        with pytest.raises(PipelineError) as info:
            EmotionPipelineHandler(manifest).prepare(corpus)
        assert isinstance(info.value.cause, MissingSourceError)
        assert info.value.entry == "human_cf+human_ctx/bci"

    def test_cache_miss_is_wrapped(self, manifest_path):
        manifest = load_manifest(manifest_path).with_overrides(grid=(_entry("lstm", "llm"),))
        handler = EmotionPipelineHandler(manifest, cache=ReplayCache(None, CacheMode.REPLAY))
        with pytest.raises(PipelineError) as info:
            handler.run_grid(load_corpus(manifest.corpus))
        assert isinstance(info.value.cause, CacheMissError)
        assert info.value.entry == "lstm/llm"

    def test_unparsable_context_answer(self, manifest_path):
        manifest = load_manifest(manifest_path)
        cache = ReplayCache(None, CacheMode.REPLAY)
        for outcome in GameOutcome:
            text = build_prompt(outcome).text
            cache.store(request_key("gpt-4-0613", 0.0, text), "gpt-4-0613", 0.0, text, "No idea.")
        corpus = _strip(load_corpus(manifest.corpus), GPT4)
        with pytest.raises(PipelineError) as info:
            EmotionPipelineHandler(manifest, cache=cache).record_context(corpus, GPT4)
        assert isinstance(info.value.cause, ResponseParseError)

    def test_empirical_prior(self, manifest_path):
        manifest = load_manifest(manifest_path).with_overrides(prior=PriorKind.EMPIRICAL)
        prior = EmotionPipelineHandler(manifest).prior(load_corpus(manifest.corpus))
        assert prior.kind is PriorKind.EMPIRICAL
        assert prior.dist != prior.uniform().dist

    def test_nni_entry(self, tmp_path):
        corpus = generate_synthetic(SynthConfig(n_clips_per_outcome=3, seed=1))
        manifest = RunManifest(grid=(_entry("lstm", "nni", "gpt4_ctx"),), nni_epochs=5, nni_folds=2,
                               cache_path=os.path.join(tmp_path, "unused.jsonl"))
        fused = EmotionPipelineHandler(manifest).run_grid(corpus)
        target = SourceId(SourceKind.FUSED_NNI, "lstm+gpt4_ctx")
        assert all(r.has(target) for r in fused)


class TestRunFuse:
    def test_reruns_are_byte_identical(self, manifest_path, tmp_path):
        manifest = load_manifest(manifest_path)
        first = run_fuse(manifest.with_overrides(output_dir=os.path.join(tmp_path, "a")))
        second = run_fuse(manifest.with_overrides(output_dir=os.path.join(tmp_path, "b")), jobs=1)
        assert _read_bytes(first) == _read_bytes(second)

    def test_empty_grid_keeps_corpus(self, manifest_path, tmp_path):
        manifest = load_manifest(manifest_path).with_overrides(grid=(), output_dir=str(tmp_path))
        path = run_fuse(manifest)
        expected = os.path.join(tmp_path, "expected.csv")
        save_corpus(load_corpus(manifest.corpus), expected)
        assert _read_bytes(path) == _read_bytes(expected)

    def test_requires_corpus(self, tmp_path):
        with pytest.raises(ConfigError):
            run_fuse(RunManifest(output_dir=str(tmp_path)))


class TestWriteEvaluation:
    def test_outputs(self, manifest_path, tmp_path):
        manifest = load_manifest(manifest_path)
        fused = EmotionPipelineHandler(manifest).run_grid(load_corpus(manifest.corpus))
        preds = [e.output_source for e in manifest.grid] + [LSTM]
        paths = write_evaluation(fused, TRUTH, preds, str(tmp_path), face_truth=HUMAN_CF)
        names = {os.path.relpath(p, tmp_path) for p in paths}
        for name in ("summary.csv", "summary.md", "kld_by_outcome.csv", "rmse_by_outcome.md",
                     "f1_by_outcome.csv", "improvement_deltas.csv", "distributions.csv",
                     os.path.join("methods", "fused_bci_lstm_gpt4_ctx.csv"),
                     os.path.join("confusion", "fused_gpt4_lstm.csv")):
            assert name in names
            assert os.path.exists(os.path.join(tmp_path, name))
        with open(os.path.join(tmp_path, "summary.csv"), encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        assert lines[0] == "method,KLD,RMSE,F1"
        assert len(lines) == 1 + len(preds)
        assert any(line.startswith("LSTM+GPT-4 (BCI),") for line in lines)

    def test_missing_prediction(self, corpus_path, tmp_path):
        with pytest.raises(MissingSourceError):
            write_evaluation(load_corpus(corpus_path), TRUTH, [bci_source_id(LSTM, GPT4)], str(tmp_path))

    def test_no_predictions(self, corpus_path, tmp_path):
        with pytest.raises(ConfigError):
            write_evaluation(load_corpus(corpus_path), TRUTH, [], str(tmp_path))


class TestTrainAndReport:
    def test_writes_params_and_report(self, tmp_path):
        corpus = generate_synthetic(SynthConfig(n_clips_per_outcome=4, seed=2))
        paths = train_and_report(corpus, LSTM, GPT4, TRUTH, TrainConfig(epochs=5, folds=2), str(tmp_path))
        params_path, csv_path, md_path = paths
        load_params(params_path)
        with open(csv_path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        assert lines[0] == "fold,n,KLD,RMSE,F1"
        assert [line.split(",")[0] for line in lines[1:]] == ["0", "1", "mean"]
        assert lines[-1].split(",")[1] == "16"
        assert md_path.endswith("nni_cv_report.md")
