#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Módulo de configuração para o toolkit de integração de pistas emocionais.
"""

import os

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Configurações das distribuições de emoção
DIST_TOLERANCE = 1e-9           # Tolerância da soma após a construção
RENORM_MIN_SUM = 0.9            # Janela de renormalização (+-10%)
RENORM_MAX_SUM = 1.1
SMOOTHING_EPSILON = 1e-6        # Suavização obrigatória antes de BCI e KLD
SMOOTHING_MAX_EPSILON = 0.01

# Configurações das métricas
KLD_DIRECTION = "truth_pred"    # KL(verdade || predição); alternativa: "pred_truth"
KLD_LOG_BASE = "e"              # "e" (nats) ou "2" (bits)
OUTCOME_WEIGHTING = "clip"      # Overall = média por clipe

# Configurações do cliente LLM (endpoint de chat-completion)
LLM_BASE_URL = "https://api.openai.com/v1"
LLM_MODEL_ID = "gpt-4-0613"
LLM_API_KEY_ENV = "OPENAI_API_KEY"  # Apenas o nome; o valor nunca é logado
LLM_TIMEOUT = 60.0              # Timeout em segundos
LLM_RETRY_COUNT = 4             # Número de novas tentativas
LLM_RETRY_DELAY = 1.0           # Atraso inicial entre tentativas em segundos
LLM_MAX_RETRY_DELAY = 30.0      # Teto do backoff exponencial
LLM_MAX_CONCURRENCY = 4         # Requisições simultâneas em voo
LLM_TEMPERATURE = 0.0
PROMPT_TEMPLATE_VERSION = "v1"
TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates")

# Como o prompt descreve o reconhecedor que produziu P(e|f)
FACE_MODEL_PHRASES = {
    "lstm": "an LSTM model",
    "facet": "the FACET recognizer",
    "eac": "the EAC recognizer",
    "human_cf": "human observers without context",
}
DEFAULT_FACE_MODEL = "lstm"

# Faixas verbais da pista facial: (limite inferior, qualificador)
FACE_CUE_BANDS = [
    (0.5, "a high level"),
    (0.2, "a moderate level"),
    (0.05, "a small level"),
    (0.0, "a negligible level"),
]

# Modelo consultado para gerar cada fonte de contexto por LLM
LLM_CONTEXT_MODELS = {
    "gpt4_ctx": "gpt-4-0613",
    "gpt3_ctx": "gpt-3.5-turbo-0613",
}

# Manifesto de execução (valores usados quando a chave está ausente)
DEFAULT_OUTPUT_DIR = "results"
DEFAULT_CACHE_PATH = "llm_cache.jsonl"
DEFAULT_CACHE_MODE = "replay"
DEFAULT_PRIOR = "uniform"
DEFAULT_TRUTH_SOURCE = "human_cb"
DEFAULT_SEED = 0
FUSED_CORPUS_FILE = "fused_corpus.csv"

# Grade padrão de métodos (linhas da tabela de comparação)
DEFAULT_GRID = [
    {"face": "facet", "context": "gpt3_ctx", "integration": "bci"},
    {"face": "facet", "context": "gpt4_ctx", "integration": "bci"},
    {"face": "eac", "context": "gpt3_ctx", "integration": "bci"},
    {"face": "eac", "context": "gpt4_ctx", "integration": "bci"},
    {"face": "lstm", "context": "gpt3_ctx", "integration": "bci"},
    {"face": "lstm", "context": "gpt4_ctx", "integration": "bci"},
    {"face": "human_cf", "context": "human_ctx", "integration": "bci"},
    {"face": "facet", "integration": "llm"},
    {"face": "eac", "integration": "llm"},
    {"face": "lstm", "integration": "llm"},
]

# Configurações da integração por rede neural (NNI)
NNI_HIDDEN_UNITS = 100
NNI_EPOCHS = 1000
NNI_LEARNING_RATE = 1e-3
NNI_ADAM_BETA1 = 0.9
NNI_ADAM_BETA2 = 0.999
NNI_ADAM_EPS = 1e-8
NNI_FOLDS = 5
NNI_SEED = 0
NNI_PARAMS_FORMAT = "nni-params"
NNI_PARAMS_VERSION = 1

# Configurações do gerador sintético
SYNTH_CLIPS_PER_OUTCOME = 50
SYNTH_CONCENTRATION = 50.0
SYNTH_JOY_BIAS = 0.3
SYNTH_SEED = 0
SYNTH_RECOGNIZER_CONCENTRATION = 80.0
SYNTH_RECOGNIZER_JOY_BIAS = 0.4  # FACET/EAC superestimam alegria

# Arquétipos por resultado (ordem canônica: joy, neutral, surprise, anger, disgust, fear, sadness)
SYNTH_ARCHETYPES = {
    "CC": [0.70, 0.12, 0.08, 0.02, 0.02, 0.02, 0.04],
    "DC": [0.45, 0.10, 0.25, 0.04, 0.04, 0.06, 0.06],
    "CD": [0.04, 0.10, 0.22, 0.30, 0.08, 0.04, 0.22],
    "DD": [0.04, 0.20, 0.08, 0.28, 0.08, 0.04, 0.28],
}
SYNTH_JOY_BASELINE = [0.55, 0.25, 0.05, 0.04, 0.04, 0.03, 0.04]

# Formato do corpus
CORPUS_HEADER = [
    "clip_id", "outcome", "source",
    "joy", "neutral", "surprise", "anger", "disgust", "fear", "sadness",
]

# Códigos de saída da CLI
EXIT_OK = 0
EXIT_VALIDATION_ERROR = 1
EXIT_RUNTIME_ERROR = 2
EXIT_CACHE_MISS = 3

# Configurações de logging
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE = "emotion_integration.log"
LOG_MAX_SIZE = 5 * 1024 * 1024  # 5 MB
LOG_BACKUP_COUNT = 3
