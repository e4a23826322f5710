#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Testes do cliente de chat-completion, com o transporte HTTP simulado por responses."""

import json
import logging
import os

import pytest
import requests
import responses

from src.communication.llm_client import LlmClientManager
from src.communication.prompts import build_prompt
from src.communication.replay_cache import CacheMode, ReplayCache, request_key
from src.core.emotions import OUTCOMES, Emotion, EmotionDistribution, GameOutcome
from src.core.exceptions import CacheMissError, ConfigError, RateLimitedError, TransportError

BASE_URL = "https://llm.test/v1"
URL = f"{BASE_URL}/chat/completions"
ANSWER = "Joy: 0.1, Neutral: 0.1, Surprise: 0.1, Anger: 0.4, Disgust: 0.1, Fear: 0.1, Sadness: 0.1."


def _completion(content):
    return {"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]}


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "sk-test-secret")
    return "sk-test-secret"


@pytest.fixture
def client():
    manager = LlmClientManager(base_url=BASE_URL, model_id="gpt-4-0613", retry_count=2, retry_delay=0)
    yield manager
    manager.disconnect()


class TestReplay:
    def test_hit_without_network_or_credentials(self, client, cache_path):
        cache = ReplayCache(cache_path, CacheMode.REPLAY)
        response = client.query(build_prompt(GameOutcome.CC), cache)
        assert client.network_calls == 0
        assert client.session is None
        assert response.parsed[Emotion.JOY] == pytest.approx(0.70, abs=1e-12)
        assert response.model_id == "gpt-4-0613"

    def test_miss(self, client):
        bundle = build_prompt(GameOutcome.CC, EmotionDistribution.uniform())
        with pytest.raises(CacheMissError) as info:
            client.query(bundle, ReplayCache(None, CacheMode.REPLAY))
        assert info.value.key == request_key("gpt-4-0613", 0.0, bundle.text)
        assert client.network_calls == 0

    def test_other_model_misses(self, cache_path):
        manager = LlmClientManager(base_url=BASE_URL, model_id="gpt-3.5-turbo-0613")
        with pytest.raises(CacheMissError):
            manager.query(build_prompt(GameOutcome.CC), ReplayCache(cache_path, CacheMode.REPLAY))

    def test_query_many_preserves_order(self, client, cache_path):
        cache = ReplayCache(cache_path, CacheMode.REPLAY)
        bundles = [build_prompt(o) for o in OUTCOMES]
        serial = [client.query(b, cache).raw_text for b in bundles]
        parallel = [r.raw_text for r in client.query_many(bundles, cache, max_workers=4)]
        assert parallel == serial
        assert len(set(serial)) == 4


class TestRecord:
    @responses.activate
    def test_miss_is_fetched_stored_and_replayed(self, client, api_key, tmp_path):
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        path = os.path.join(tmp_path, "cache.jsonl")
        bundle = build_prompt(GameOutcome.DD)

        recorded = client.query(bundle, ReplayCache(path, CacheMode.RECORD))
        assert client.network_calls == 1
        assert recorded.parsed[Emotion.ANGER] == pytest.approx(0.4, abs=1e-12)

        replayer = LlmClientManager(base_url=BASE_URL, model_id="gpt-4-0613")
        replayed = replayer.query(bundle, ReplayCache(path, CacheMode.REPLAY))
        assert replayed.raw_text == recorded.raw_text
        assert replayer.network_calls == 0

    @responses.activate
    def test_hit_is_not_fetched_again(self, client, api_key, tmp_path):
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        cache = ReplayCache(os.path.join(tmp_path, "cache.jsonl"), CacheMode.RECORD)
        bundle = build_prompt(GameOutcome.CD)
        client.query(bundle, cache)
        client.query(bundle, cache)
        assert client.network_calls == 1
        assert len(responses.calls) == 1

    @responses.activate
    def test_request_body_and_headers(self, client, api_key):
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        bundle = build_prompt(GameOutcome.DC)
        client.query(bundle, ReplayCache(None, CacheMode.RECORD))
        request = responses.calls[0].request
        assert request.headers["Authorization"] == f"Bearer {api_key}"
        body = json.loads(request.body)
        assert body["model"] == "gpt-4-0613"
        assert body["temperature"] == 0.0
        assert body["messages"] == [{"role": "user", "content": bundle.text}]

    @responses.activate
    def test_api_key_is_never_logged(self, client, api_key, caplog):
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        with caplog.at_level(logging.DEBUG):
            client.query(build_prompt(GameOutcome.CC), ReplayCache(None, CacheMode.RECORD))
        assert api_key not in caplog.text

    def test_missing_api_key(self, client):
        with pytest.raises(ConfigError):
            client.query(build_prompt(GameOutcome.CC), ReplayCache(None, CacheMode.RECORD))

    @responses.activate
    def test_unparsable_answer_is_kept_raw(self, client, api_key):
        responses.add(responses.POST, URL, json=_completion("I would rather not say."))
        cache = ReplayCache(None, CacheMode.RECORD)
        response = client.query(build_prompt(GameOutcome.CC), cache)
        assert response.parsed is None
        assert response.raw_text == "I would rather not say."
        assert len(cache) == 1


class TestPassthrough:
    @responses.activate
    def test_always_fetches_and_never_writes(self, client, api_key, tmp_path, cache_path):
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        path = os.path.join(tmp_path, "cache.jsonl")
        cache = ReplayCache(path, CacheMode.PASSTHROUGH)
        client.query(build_prompt(GameOutcome.CC), cache)
        client.query(build_prompt(GameOutcome.CC), cache)
        assert client.network_calls == 2
        assert len(cache) == 0
        assert not os.path.exists(path)

    @responses.activate
    def test_ignores_existing_entries(self, client, api_key, cache_path):
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        response = client.query(build_prompt(GameOutcome.CC), ReplayCache(cache_path, CacheMode.PASSTHROUGH))
        assert response.raw_text == ANSWER
        assert client.network_calls == 1


class TestRetries:
    @responses.activate
    def test_rate_limit_then_success(self, client, api_key):
        responses.add(responses.POST, URL, status=429)
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        assert client.complete("prompt") == ANSWER
        assert len(responses.calls) == 2

    @responses.activate
    def test_server_errors_exhaust_retries(self, client, api_key):
        for _ in range(3):
            responses.add(responses.POST, URL, status=503)
        with pytest.raises(TransportError):
            client.complete("prompt")
        assert len(responses.calls) == 3

    @responses.activate
    def test_persistent_rate_limit(self, client, api_key):
        for _ in range(3):
            responses.add(responses.POST, URL, status=429)
        with pytest.raises(RateLimitedError):
            client.complete("prompt")

    @responses.activate
    def test_connection_error_is_retried(self, client, api_key):
        responses.add(responses.POST, URL, body=requests.ConnectionError("connection refused"))
        responses.add(responses.POST, URL, json=_completion(ANSWER))
        assert client.complete("prompt") == ANSWER

    @responses.activate
    def test_client_error_is_not_retried(self, client, api_key):
        responses.add(responses.POST, URL, status=400, json={"error": "bad request"})
        with pytest.raises(TransportError):
            client.complete("prompt")
        assert len(responses.calls) == 1

    @responses.activate
    def test_off_protocol_body(self, client, api_key):
        responses.add(responses.POST, URL, json={"unexpected": True})
        with pytest.raises(TransportError):
            client.complete("prompt")

    def test_backoff_is_capped(self):
        manager = LlmClientManager(retry_delay=1.0, max_retry_delay=5.0)
        assert [manager._backoff(a) for a in range(5)] == [1.0, 2.0, 4.0, 5.0, 5.0]
