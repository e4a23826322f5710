#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Construção dos prompts do LLM e interpretação das respostas.

O prompt tem quatro partes, nesta ordem: descrição do jogo, resultado da
rodada, pista facial (opcional) e pedido da distribuição no formato de resposta.
"""

import functools
import logging
import os
import re
from dataclasses import dataclass
from enum import Enum

from src.config import (
    DEFAULT_FACE_MODEL, FACE_CUE_BANDS, FACE_MODEL_PHRASES, PROMPT_TEMPLATE_VERSION, TEMPLATE_DIR,
)
from src.core.emotions import EMOTIONS, Emotion, GameOutcome, make_distribution
from src.core.exceptions import (
    ConfigError, DuplicateEmotionError, MissingEmotionError, UnparsableNumberError,
    ValidationError,
)

logger = logging.getLogger(__name__)

PAYOFFS = {
    GameOutcome.CC: (5, 5),
    GameOutcome.DC: (10, 0),
    GameOutcome.CD: (0, 10),
    GameOutcome.DD: (1, 1),
}

EMOTION_NOUNS = {
    Emotion.JOY: "happiness",
    Emotion.NEUTRAL: "neutrality",
    Emotion.SURPRISE: "surprise",
    Emotion.ANGER: "anger",
    Emotion.DISGUST: "disgust",
    Emotion.FEAR: "fear",
    Emotion.SADNESS: "sadness",
}

REQUEST_WITH_FACE = (
    "Given the facial cue and the outcome, please consider how Player A might feel at the end "
    "of the game and generate a probability distribution for their emotions."
)
REQUEST_CONTEXT_ONLY = (
    "Given the outcome, please consider how Player A might feel at the end "
    "of the game and generate a probability distribution for their emotions."
)
ANSWER_FORMAT = (
    "Provide your answer in the following format:\n"
    "“" + ", ".join(f"{e.label}: {{prob {e.value + 1}}}" for e in EMOTIONS) + ".”"
)

_PAIR_PATTERN = re.compile(
    r"\b(" + "|".join(e.key for e in EMOTIONS) + r")\b\**\s*[:=]\s*\**\s*"
    r"(?:([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(%?)|([^\s,;*\"“”'()\[\]{}]*))",
    re.IGNORECASE,
)


class PromptMode(Enum):
    CONTEXT_ONLY = "context_only"
    FACE_AND_CONTEXT = "face_and_context"


@dataclass(frozen=True)
class PromptBundle:
    """Prompt renderizado e sua proveniência."""

    text: str
    outcome: GameOutcome
    face_rendering: object
    template_version: str
    mode: PromptMode
    face_model: str = ""

    def __post_init__(self):
        if (self.mode is PromptMode.FACE_AND_CONTEXT) != (self.face_rendering is not None):
            raise ValidationError("face_rendering deve existir se e somente se o modo usa a face")


@functools.lru_cache(maxsize=None)
def load_game_description(template_version=PROMPT_TEMPLATE_VERSION):
    """Lê a descrição do jogo versionada em src/templates."""
    path = os.path.join(TEMPLATE_DIR, f"game_description_{template_version}.txt")
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read().strip()
    except OSError as e:
        logger.error(f"Template de prompt não encontrado: {path}")
        raise ConfigError(f"Template {template_version!r} indisponível: {e}") from e


def render_outcome(outcome):
    """Frase do resultado da rodada, do ponto de vista do jogador A."""
    payoff_a, payoff_b = PAYOFFS[outcome]
    if payoff_a == payoff_b:
        payoff = f"both get ${payoff_a}"
    else:
        payoff = f"Player A gets ${payoff_a} and Player B gets ${payoff_b}"
    return (f"In this round, Player A chooses to {outcome.focal_move}, "
            f"while Player B chooses to {outcome.other_move}, {payoff}.")


def _qualifier(probability):
    for lower_bound, qualifier in FACE_CUE_BANDS:
        if probability >= lower_bound:
            return qualifier
    return FACE_CUE_BANDS[-1][1]


def render_face_cue(d):
    """Uma linha por emoção: nome, probabilidade com 3 casas e qualificador verbal."""
    return "\n".join(
        f"- {e.label}: {d[e]:.3f} ({_qualifier(d[e])} of {EMOTION_NOUNS[e]})"
        for e in EMOTIONS
    )


def build_prompt(outcome, face=None, face_model=DEFAULT_FACE_MODEL,
                 template_version=PROMPT_TEMPLATE_VERSION):
    """
    Monta o prompt completo.

    Args:
        outcome (GameOutcome): Resultado da rodada
        face (EmotionDistribution): P(e|f); None gera o prompt só de contexto
        face_model (str): Código do reconhecedor que produziu P(e|f)
        template_version (str): Versão da descrição do jogo

    Returns:
        PromptBundle: Texto e proveniência
    """
    parts = [load_game_description(template_version), render_outcome(outcome)]
    face_rendering = None
    if face is not None:
        phrase = FACE_MODEL_PHRASES.get(face_model)
        if phrase is None:
            raise ValidationError(f"Reconhecedor facial sem descrição no prompt: {face_model!r}")
        face_rendering = render_face_cue(face)
        parts.append(f"Player A's facial expression data, analyzed using {phrase},\n{face_rendering}")
        parts.append(f"{REQUEST_WITH_FACE}\n{ANSWER_FORMAT}")
        mode = PromptMode.FACE_AND_CONTEXT
    else:
        parts.append(f"{REQUEST_CONTEXT_ONLY}\n{ANSWER_FORMAT}")
        mode = PromptMode.CONTEXT_ONLY
    return PromptBundle(
        text="\n\n".join(parts),
        outcome=outcome,
        face_rendering=face_rendering,
        template_version=template_version,
        mode=mode,
        face_model=face_model if face is not None else "",
    )


def render_answer(d):
    """Distribuição escrita no formato de resposta pedido ao LLM."""
    return ", ".join(f"{e.label}: {d[e]!r}" for e in EMOTIONS) + "."


def _parse_number(name, match):
    number, percent, other = match.group(2, 3, 4)
    if number is None:
        raise UnparsableNumberError(f"Valor ilegível para {name}: {other!r}")
    return float(number) * (0.01 if percent else 1.0)


def parse_response(raw):
    """
    Extrai as sete probabilidades de uma resposta em texto livre.

    Nomes sem distinção de maiúsculas, em qualquer ordem, cercados ou não de
    prosa. A construção herda a janela de renormalização de make_distribution.

    Returns:
        EmotionDistribution: Distribuição extraída
    """
    values = {}
    for match in _PAIR_PATTERN.finditer(raw):
        emotion = Emotion.parse(match.group(1))
        if emotion in values:
            raise DuplicateEmotionError(emotion.label)
        values[emotion] = _parse_number(emotion.label, match)
    for emotion in EMOTIONS:
        if emotion not in values:
            raise MissingEmotionError(emotion.label)
    return make_distribution([values[e] for e in EMOTIONS])
