#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Pacote de ingestão: formato do corpus e gerador sintético.
"""

from src.ingest.corpus import load_corpus, load_corpus_json, save_corpus, save_corpus_json
from src.ingest.synthetic import SynthConfig, blend_face, generate_synthetic, joy_baseline

__all__ = [
    'load_corpus', 'load_corpus_json', 'save_corpus', 'save_corpus_json', 'SynthConfig',
    'blend_face', 'generate_synthetic', 'joy_baseline',
]
