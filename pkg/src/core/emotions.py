#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tipos de domínio e aritmética no simplex de emoções.

Todos os valores são imutáveis após a construção e podem ser compartilhados
entre threads sem sincronização.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType

import numpy as np

from src.config import (
    DIST_TOLERANCE, RENORM_MIN_SUM, RENORM_MAX_SUM, SMOOTHING_MAX_EPSILON,
)
from src.core.exceptions import (
    DistributionError, DuplicateEntryError, EpsilonOutOfRangeError,
    MissingSourceError, NegativeComponentError, NonFiniteInputError,
    SourceRoleError, SumOutOfRangeError, UnknownEmotionError,
    UnknownOutcomeError, UnknownSourceKindError, ValidationError,
)

logger = logging.getLogger(__name__)


class Emotion(Enum):
    """As sete emoções básicas, na ordem canônica do formato de resposta."""

    JOY = 0
    NEUTRAL = 1
    SURPRISE = 2
    ANGER = 3
    DISGUST = 4
    FEAR = 5
    SADNESS = 6

    @property
    def label(self):
        """Nome de exibição ("Joy", "Neutral", ...)."""
        return self.name.capitalize()

    @property
    def key(self):
        """Nome minúsculo usado em CSV e JSON."""
        return self.name.lower()

    @classmethod
    def parse(cls, name):
        try:
            return cls[str(name).strip().upper()]
        except KeyError:
            raise UnknownEmotionError(f"Emoção desconhecida: {name!r}") from None


N_EMOTIONS = len(Emotion)
EMOTIONS = tuple(Emotion)


class GameOutcome(Enum):
    """
    Resultado de uma rodada do split-or-steal (variável de contexto c).

    Primeira letra: jogada do jogador focal A; segunda: do jogador B.
    C = split (coopera), D = steal (trai).
    """

    CC = "CC"
    DC = "DC"
    CD = "CD"
    DD = "DD"

    @property
    def focal_move(self):
        return "split" if self.value[0] == "C" else "steal"

    @property
    def other_move(self):
        return "split" if self.value[1] == "C" else "steal"

    @classmethod
    def parse(cls, code):
        try:
            return cls(str(code).strip().upper())
        except ValueError:
            raise UnknownOutcomeError(f"Resultado de jogo desconhecido: {code!r}") from None


OUTCOMES = tuple(GameOutcome)

ROLE_FACE = "face"
ROLE_CONTEXT = "context"
ROLE_TRUTH = "truth"
ROLE_FUSED = "fused"


class SourceKind(Enum):
    """Origem de uma distribuição; o valor é o código usado no CSV."""

    FACE_FACET = "facet"
    FACE_EAC = "eac"
    FACE_LSTM = "lstm"
    HUMAN_CONTEXT_FREE = "human_cf"
    HUMAN_CONTEXT_BASED = "human_cb"
    HUMAN_CONTEXT_ONLY = "human_ctx"
    CONTEXT_GPT3 = "gpt3_ctx"
    CONTEXT_GPT4 = "gpt4_ctx"
    FUSED_BCI = "fused_bci"
    FUSED_GPT4 = "fused_gpt4"
    FUSED_NNI = "fused_nni"

    @property
    def roles(self):
        return _SOURCE_ROLES[self]

    @property
    def display_name(self):
        return _DISPLAY_NAMES[self]

    @classmethod
    def parse(cls, code):
        try:
            return cls(str(code).strip().lower())
        except ValueError:
            raise UnknownSourceKindError(f"Tipo de fonte desconhecido: {code!r}") from None


# Anotações humanas sem contexto servem tanto de pista facial quanto de verdade
# para os reconhecedores faciais.
_SOURCE_ROLES = {
    SourceKind.FACE_FACET: frozenset({ROLE_FACE}),
    SourceKind.FACE_EAC: frozenset({ROLE_FACE}),
    SourceKind.FACE_LSTM: frozenset({ROLE_FACE}),
    SourceKind.HUMAN_CONTEXT_FREE: frozenset({ROLE_FACE, ROLE_TRUTH}),
    SourceKind.HUMAN_CONTEXT_BASED: frozenset({ROLE_TRUTH}),
    SourceKind.HUMAN_CONTEXT_ONLY: frozenset({ROLE_CONTEXT}),
    SourceKind.CONTEXT_GPT3: frozenset({ROLE_CONTEXT}),
    SourceKind.CONTEXT_GPT4: frozenset({ROLE_CONTEXT}),
    SourceKind.FUSED_BCI: frozenset({ROLE_FUSED}),
    SourceKind.FUSED_GPT4: frozenset({ROLE_FUSED}),
    SourceKind.FUSED_NNI: frozenset({ROLE_FUSED}),
}

_DISPLAY_NAMES = {
    SourceKind.FACE_FACET: "FACET",
    SourceKind.FACE_EAC: "EAC",
    SourceKind.FACE_LSTM: "LSTM",
    SourceKind.HUMAN_CONTEXT_FREE: "Human",
    SourceKind.HUMAN_CONTEXT_BASED: "Human (context-based)",
    SourceKind.HUMAN_CONTEXT_ONLY: "Human",
    SourceKind.CONTEXT_GPT3: "GPT-3",
    SourceKind.CONTEXT_GPT4: "GPT-4",
    SourceKind.FUSED_BCI: "BCI",
    SourceKind.FUSED_GPT4: "GPT-4",
    SourceKind.FUSED_NNI: "NNI",
}


@dataclass(frozen=True)
class SourceId:
    """Identifica uma fonte: tipo + rótulo livre (ex.: "lstm+gpt4_ctx")."""

    kind: SourceKind
    detail: str = ""

    @property
    def code(self):
        return f"{self.kind.value}:{self.detail}" if self.detail else self.kind.value

    @classmethod
    def parse(cls, code):
        kind, _, detail = str(code).strip().partition(":")
        return cls(SourceKind.parse(kind), detail)

    def check_role(self, role):
        if role not in self.kind.roles:
            raise SourceRoleError(f"A fonte {self.code} não pode ser usada como {role}")

    def __str__(self):
        return self.code


@dataclass(frozen=True)
class EmotionDistribution:
    """Ponto no simplex de 7 emoções, indexado pela ordem canônica."""

    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) != N_EMOTIONS:
            raise DistributionError(f"Esperadas {N_EMOTIONS} componentes, recebidas {len(probs)}")
        if not all(math.isfinite(p) for p in probs):
            raise NonFiniteInputError(f"Componentes não finitas: {probs}")
        if any(p < 0.0 for p in probs):
            raise NegativeComponentError(f"Componentes negativas: {probs}")
        if abs(math.fsum(probs) - 1.0) > DIST_TOLERANCE:
            raise SumOutOfRangeError(f"Distribuição não normalizada (soma {math.fsum(probs)!r})")
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, emotion):
        return self.probs[emotion.value]

    def as_array(self):
        return np.array(self.probs, dtype=np.float64)

    def to_dict(self):
        return {emotion.key: self.probs[emotion.value] for emotion in Emotion}

    @classmethod
    def uniform(cls):
        return cls((1.0 / N_EMOTIONS,) * N_EMOTIONS)

    @classmethod
    def one_hot(cls, emotion):
        probs = [0.0] * N_EMOTIONS
        probs[emotion.value] = 1.0
        return cls(tuple(probs))


def make_distribution(raw):
    """
    Constrói uma distribuição a partir de 7 valores brutos.

    Valores cuja soma cai na janela [0.9, 1.1] são renormalizados; fora dela a
    construção falha.

    Args:
        raw: sequência de 7 reais não negativos e finitos

    Returns:
        EmotionDistribution: distribuição com soma 1 (tolerância 1e-9)
    """
    values = np.asarray(raw, dtype=np.float64)
    if values.shape != (N_EMOTIONS,):
        raise DistributionError(f"Esperadas {N_EMOTIONS} componentes, recebido formato {values.shape}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteInputError(f"Componentes não finitas: {values.tolist()}")
    if np.any(values < 0.0):
        raise NegativeComponentError(f"Componentes negativas: {values.tolist()}")
    total = math.fsum(values.tolist())
    if not RENORM_MIN_SUM <= total <= RENORM_MAX_SUM:
        raise SumOutOfRangeError(
            f"Soma {total:.6f} fora da janela [{RENORM_MIN_SUM}, {RENORM_MAX_SUM}]")
    return EmotionDistribution(tuple((values / total).tolist()))


def smooth(d, epsilon):
    """Suavização aditiva: (d_i + eps) / (1 + 7 eps), todas as componentes > 0."""
    if not 0.0 < epsilon <= SMOOTHING_MAX_EPSILON:
        raise EpsilonOutOfRangeError(
            f"Epsilon {epsilon!r} fora do intervalo (0, {SMOOTHING_MAX_EPSILON}]")
    scale = 1.0 + N_EMOTIONS * epsilon
    return EmotionDistribution(tuple((p + epsilon) / scale for p in d.probs))


def argmax_label(d):
    """Emoção mais provável; empates vão para o menor índice canônico."""
    return EMOTIONS[int(np.argmax(d.as_array()))]


@dataclass(frozen=True)
class ClipRecord:
    """Um clipe de vídeo: identidade, resultado do jogo e distribuições por fonte."""

    clip_id: str
    outcome: GameOutcome
    distributions: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.clip_id:
            raise ValidationError("clip_id vazio")
        if not isinstance(self.outcome, GameOutcome):
            raise UnknownOutcomeError(f"Resultado inválido: {self.outcome!r}")
        object.__setattr__(self, "distributions", MappingProxyType(dict(self.distributions)))

    def get(self, source):
        try:
            return self.distributions[source]
        except KeyError:
            raise MissingSourceError(self.clip_id, source) from None

    def has(self, source):
        return source in self.distributions

    @property
    def sources(self):
        return sorted(self.distributions, key=lambda s: s.code)

    def with_distribution(self, source, dist, replace=False):
        """Retorna uma cópia com a distribuição adicionada; o registro original não muda."""
        if source in self.distributions and not replace:
            raise DuplicateEntryError(f"Clipe {self.clip_id!r} já possui a fonte {source}")
        updated = dict(self.distributions)
        updated[source] = dist
        return ClipRecord(self.clip_id, self.outcome, updated)


def sort_corpus(records):
    """Ordena por clip_id e rejeita identificadores repetidos."""
    ordered = sorted(records, key=lambda r: r.clip_id)
    for previous, current in zip(ordered, ordered[1:]):
        if previous.clip_id == current.clip_id:
            raise DuplicateEntryError(f"clip_id repetido no corpus: {current.clip_id!r}")
    return ordered


def sources_in(corpus):
    """Conjunto de fontes presentes em pelo menos um clipe."""
    found = set()
    for record in corpus:
        found.update(record.distributions)
    return found
