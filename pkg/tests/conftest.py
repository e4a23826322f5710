#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Configuração comum dos testes.

Coloca a raiz do repositório no path, para que `from src...` funcione sem
instalação, e expõe os caminhos das fixtures versionadas.
"""

import os
import sys

import numpy as np
import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if REPO_ROOT not in sys.path:
    sys.path.insert(0, REPO_ROOT)

FIXTURES_DIR = os.path.join(REPO_ROOT, "fixtures")
GOLDEN_DIR = os.path.join(REPO_ROOT, "tests", "golden")


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


@pytest.fixture
def corpus_path():
    return os.path.join(FIXTURES_DIR, "corpus_fixture.csv")


@pytest.fixture
def cache_path():
    return os.path.join(FIXTURES_DIR, "replay_cache.jsonl")


@pytest.fixture
def manifest_path():
    return os.path.join(FIXTURES_DIR, "manifest_fixture.toml")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _no_api_key(monkeypatch):
    """Nenhum teste deve depender de uma credencial real."""
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
