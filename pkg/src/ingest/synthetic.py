#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Gerador de corpus sintético que substitui, em escala de bancada, o corpus
split-or-steal indisponível.

Para cada resultado do jogo, a pista de contexto e a pista facial são
sorteadas de uma Dirichlet centrada em um arquétipo fixo; a face é misturada
a uma linha de base com viés de alegria; a verdade com contexto é a fusão BCI
das duas pistas, de modo que o pipeline tem um oráculo de autoconsistência.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.config import (
    SYNTH_ARCHETYPES, SYNTH_CLIPS_PER_OUTCOME, SYNTH_CONCENTRATION, SYNTH_JOY_BASELINE,
    SYNTH_JOY_BIAS, SYNTH_RECOGNIZER_CONCENTRATION, SYNTH_RECOGNIZER_JOY_BIAS, SYNTH_SEED,
)
from src.core.emotions import OUTCOMES, ClipRecord, SourceId, SourceKind, make_distribution, smooth
from src.core.exceptions import ConfigError
from src.application.fusion import Prior, bci_fuse

logger = logging.getLogger(__name__)

# Centro mínimo das re-amostragens, para que nenhum parâmetro da Dirichlet seja ~0
_REDRAW_FLOOR = 1e-3


@dataclass(frozen=True)
class SynthConfig:
    n_clips_per_outcome: int = SYNTH_CLIPS_PER_OUTCOME
    dirichlet_concentration: float = SYNTH_CONCENTRATION
    joy_bias: float = SYNTH_JOY_BIAS
    seed: int = SYNTH_SEED
    include_recognizers: bool = True

    def __post_init__(self):
        if self.n_clips_per_outcome < 1:
            raise ConfigError("n_clips_per_outcome deve ser >= 1")
        if not self.dirichlet_concentration > 0:
            raise ConfigError("dirichlet_concentration deve ser > 0")
        if not 0.0 <= self.joy_bias <= 1.0:
            raise ConfigError("joy_bias deve estar em [0, 1]")
        if self.seed < 0:
            raise ConfigError("seed deve ser um inteiro sem sinal")


def joy_baseline():
    return make_distribution(SYNTH_JOY_BASELINE)


def blend_face(archetype_draw, joy_bias):
    """(1 - joy_bias) * sorteio + joy_bias * linha de base com viés de alegria."""
    mixed = (1.0 - joy_bias) * archetype_draw.as_array() + joy_bias * joy_baseline().as_array()
    return make_distribution(mixed)


def _draw(rng, center, concentration):
    return make_distribution(rng.dirichlet(concentration * np.asarray(center, dtype=np.float64)))


def _redraw(rng, dist, concentration):
    return _draw(rng, smooth(dist, _REDRAW_FLOOR).as_array(), concentration)


def generate_synthetic(config=None):
    """
    Gera um corpus determinístico dada a seed.

    Fontes por clipe: human_cf (pista facial), gpt4_ctx (pista de contexto) e
    human_cb = BCI(human_cf, gpt4_ctx). Com include_recognizers também lstm,
    facet, eac, gpt3_ctx e human_ctx.

    Returns:
        list: ClipRecord ordenados por clip_id
    """
    config = config or SynthConfig()
    rng = np.random.default_rng(config.seed)
    concentration = config.dirichlet_concentration
    prior = Prior.uniform()
    corpus = []
    for outcome in OUTCOMES:
        archetype = SYNTH_ARCHETYPES[outcome.value]
        for index in range(config.n_clips_per_outcome):
            context = _draw(rng, archetype, concentration)
            face = blend_face(_draw(rng, archetype, concentration), config.joy_bias)
            sources = {
                SourceId(SourceKind.HUMAN_CONTEXT_FREE): face,
                SourceId(SourceKind.CONTEXT_GPT4): context,
                SourceId(SourceKind.HUMAN_CONTEXT_BASED): bci_fuse(face, context, prior),
            }
            if config.include_recognizers:
                joyful = blend_face(face, SYNTH_RECOGNIZER_JOY_BIAS)
                sources[SourceId(SourceKind.FACE_LSTM)] = _redraw(rng, face, SYNTH_RECOGNIZER_CONCENTRATION)
                sources[SourceId(SourceKind.FACE_FACET)] = _redraw(rng, joyful, SYNTH_RECOGNIZER_CONCENTRATION)
                sources[SourceId(SourceKind.FACE_EAC)] = _redraw(rng, joyful, SYNTH_RECOGNIZER_CONCENTRATION)
                sources[SourceId(SourceKind.CONTEXT_GPT3)] = _redraw(rng, context, concentration / 2.0)
                sources[SourceId(SourceKind.HUMAN_CONTEXT_ONLY)] = _redraw(rng, context, SYNTH_RECOGNIZER_CONCENTRATION)
            corpus.append(ClipRecord(f"{outcome.value}-{index + 1:04d}", outcome, sources))
    logger.info(
        f"Corpus sintético: {len(corpus)} clipe(s), seed={config.seed}, "
        f"concentração={concentration}, joy_bias={config.joy_bias}")
    return sorted(corpus, key=lambda r: r.clip_id)
