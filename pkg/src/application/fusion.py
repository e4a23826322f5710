#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Integração Bayesiana de pistas (BCI).

P(e|c,f) é proporcional a P(e|f) * P(e|c) / P(e). Com prior uniforme a fórmula
se reduz ao produto elemento a elemento renormalizado.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.config import SMOOTHING_EPSILON
from src.core.emotions import (
    N_EMOTIONS, ROLE_CONTEXT, ROLE_FACE, ROLE_TRUTH, EmotionDistribution, SourceId,
    SourceKind, make_distribution, smooth, sort_corpus,
)
from src.core.exceptions import DegenerateProductError, EmptyCorpusError, ValidationError

logger = logging.getLogger(__name__)


class PriorKind(Enum):
    UNIFORM = "uniform"
    EMPIRICAL = "empirical"

    @classmethod
    def parse(cls, value):
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"Tipo de prior desconhecido: {value!r}") from None


@dataclass(frozen=True)
class Prior:
    """Prior P(e) sobre as emoções."""

    dist: EmotionDistribution
    kind: PriorKind

    def __post_init__(self):
        if self.kind is PriorKind.UNIFORM and any(p != 1.0 / N_EMOTIONS for p in self.dist.probs):
            raise ValidationError("Prior uniforme deve ter todas as componentes iguais a 1/7")
        if self.kind is PriorKind.EMPIRICAL and min(self.dist.probs) <= 0.0:
            raise ValidationError("Prior empírico deve ser estritamente positivo (suavize antes)")

    @classmethod
    def uniform(cls):
        return cls(EmotionDistribution.uniform(), PriorKind.UNIFORM)

    @classmethod
    def empirical(cls, corpus, truth_source, epsilon=SMOOTHING_EPSILON):
        """Média da fonte de verdade sobre o corpus inteiro, suavizada."""
        truth_source.check_role(ROLE_TRUTH)
        if not corpus:
            raise EmptyCorpusError("Prior empírico exige um corpus não vazio")
        stacked = np.vstack([record.get(truth_source).as_array() for record in corpus])
        mean = make_distribution(stacked.mean(axis=0))
        logger.debug(f"Prior empírico a partir de {truth_source}: {mean.probs}")
        return cls(smooth(mean, epsilon), PriorKind.EMPIRICAL)


def bci_fuse(face, context, prior=None, epsilon=SMOOTHING_EPSILON):
    """
    Funde a pista facial e a pista de contexto em P(e|c,f).

    Ambas as pistas são suavizadas antes do produto para que um zero em uma
    delas não anule uma emoção que a outra sustenta.

    Args:
        face (EmotionDistribution): P(e|f)
        context (EmotionDistribution): P(e|c)
        prior (Prior): P(e); uniforme quando omitido
        epsilon (float): Suavização aplicada às duas pistas

    Returns:
        EmotionDistribution: Distribuição fundida
    """
    prior = prior or Prior.uniform()
    product = smooth(face, epsilon).as_array() * smooth(context, epsilon).as_array()
    product = product / prior.dist.as_array()
    total = math.fsum(product.tolist())
    if not math.isfinite(total) or total <= 0.0:
        raise DegenerateProductError(f"Produto das pistas degenerado (soma {total!r})")
    return EmotionDistribution(tuple((product / total).tolist()))


def bci_source_id(face_source, context_source):
    return SourceId(SourceKind.FUSED_BCI, f"{face_source.code}+{context_source.code}")


def fuse_corpus(corpus, face_source, context_source, prior=None, epsilon=SMOOTHING_EPSILON,
                jobs=1, target=None):
    """
    Aplica bci_fuse a cada clipe do corpus.

    Args:
        corpus (list): Lista de ClipRecord
        face_source (SourceId): Fonte da pista facial
        context_source (SourceId): Fonte da pista de contexto
        prior (Prior): Prior; uniforme quando omitido
        jobs (int): Número de threads
        target (SourceId): Fonte de saída; padrão fused_bci:<face>+<contexto>

    Returns:
        list: Novos ClipRecord, ordenados por clip_id, cada um com a fonte fundida
    """
    face_source.check_role(ROLE_FACE)
    context_source.check_role(ROLE_CONTEXT)
    target = target or bci_source_id(face_source, context_source)
    prior = prior or Prior.uniform()

    def fuse_one(record):
        fused = bci_fuse(record.get(face_source), record.get(context_source), prior, epsilon)
        return record.with_distribution(target, fused, replace=True)

    records = sort_corpus(corpus)
    logger.info(f"Fundindo {len(records)} clipe(s): {face_source} + {context_source} -> {target}")
    if jobs > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(fuse_one, records))
    return [fuse_one(record) for record in records]
