#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Pacote de domínio: emoções, resultados do jogo, fontes e distribuições.
"""

from src.core.emotions import (
    EMOTIONS, N_EMOTIONS, OUTCOMES, ROLE_CONTEXT, ROLE_FACE, ROLE_FUSED, ROLE_TRUTH,
    ClipRecord, Emotion, EmotionDistribution, GameOutcome, SourceId, SourceKind,
    argmax_label, make_distribution, smooth, sort_corpus, sources_in,
)

__all__ = [
    'EMOTIONS', 'N_EMOTIONS', 'OUTCOMES', 'ROLE_CONTEXT', 'ROLE_FACE', 'ROLE_FUSED',
    'ROLE_TRUTH', 'ClipRecord', 'Emotion', 'EmotionDistribution', 'GameOutcome',
    'SourceId', 'SourceKind', 'argmax_label', 'make_distribution', 'smooth',
    'sort_corpus', 'sources_in',
]
