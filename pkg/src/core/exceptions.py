#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Hierarquia de exceções do toolkit.

ValidationError sinaliza entrada ou configuração inválida, ComputationError e
LlmError sinalizam falhas em tempo de execução. A CLI converte cada ramo em um
código de saída estável.
"""


class EmotionIntegrationError(Exception):
    """Raiz de todas as exceções do projeto."""


class ValidationError(EmotionIntegrationError):
    """Entrada ou configuração inválida."""


class ComputationError(EmotionIntegrationError):
    """Falha numérica durante um cálculo."""


class LlmError(EmotionIntegrationError):
    """Falha na camada de comunicação com o LLM."""


# Distribuições

class DistributionError(ValidationError):
    pass


class NegativeComponentError(DistributionError):
    pass


class SumOutOfRangeError(DistributionError):
    pass


class NonFiniteInputError(DistributionError):
    pass


class EpsilonOutOfRangeError(DistributionError):
    pass


class UnknownEmotionError(ValidationError):
    pass


class UnknownOutcomeError(ValidationError):
    pass


class UnknownSourceKindError(ValidationError):
    pass


class SourceRoleError(ValidationError):
    """A fonte não pode ocupar o papel pedido (pista facial, contexto, verdade)."""


class MissingSourceError(ValidationError):
    def __init__(self, clip_id, source):
        self.clip_id = clip_id
        self.source = source
        super().__init__(f"Clipe {clip_id!r} não possui a fonte {source}")


# Métricas

class EmptyInputError(ValidationError):
    pass


class LengthMismatchError(ValidationError):
    pass


class EmptyCorpusError(ValidationError):
    pass


class OutcomeSetMismatchError(ValidationError):
    pass


# Ingestão

class MalformedRowError(ValidationError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"Linha {line} malformada: {reason}")


class DuplicateEntryError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


# NNI

class EmptyDatasetError(ValidationError):
    pass


class DatasetTooSmallError(ValidationError):
    pass


class NonFiniteActivationError(ComputationError):
    pass


class DivergedTrainingError(ComputationError):
    pass


class DegenerateProductError(ComputationError):
    pass


# Respostas do LLM

class ResponseParseError(ValidationError):
    pass


class MissingEmotionError(ResponseParseError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Emoção ausente na resposta: {name}")


class DuplicateEmotionError(ResponseParseError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Emoção repetida na resposta: {name}")


class UnparsableNumberError(ResponseParseError):
    pass


class CacheMissError(LlmError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"Requisição ausente no cache de replay: {key}")


class TransportError(LlmError):
    pass


class RateLimitedError(TransportError):
    pass


class PipelineError(EmotionIntegrationError):
    """Erro de um módulo, anotado com a entrada do grid e o clipe."""

    def __init__(self, entry, clip_id, cause):
        self.entry = entry
        self.clip_id = clip_id
        self.cause = cause
        where = f"entrada {entry}" + (f", clipe {clip_id!r}" if clip_id else "")
        super().__init__(f"{where}: {cause}")
