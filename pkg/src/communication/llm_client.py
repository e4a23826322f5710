#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Módulo para gerenciamento do cliente de chat-completion (GPT).
"""

import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import requests

from src.config import (
    LLM_API_KEY_ENV, LLM_BASE_URL, LLM_MAX_CONCURRENCY, LLM_MAX_RETRY_DELAY, LLM_MODEL_ID,
    LLM_RETRY_COUNT, LLM_RETRY_DELAY, LLM_TEMPERATURE, LLM_TIMEOUT,
)
from src.core.exceptions import (
    CacheMissError, ConfigError, RateLimitedError, TransportError, ValidationError,
)
from src.communication.prompts import parse_response
from src.communication.replay_cache import CacheMode, request_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LlmResponse:
    """Resposta do LLM; parsed só existe se o texto passou pela interpretação."""

    raw_text: str
    model_id: str
    temperature: float
    parsed: object = None


class _ServerError(TransportError):
    """Erro 5xx, tratado como transitório."""


class LlmClientManager:
    """
    Classe para gerenciar a comunicação com um endpoint de chat-completion.

    Encapsula a biblioteca requests; a sessão HTTP só é aberta quando uma
    requisição de rede é de fato necessária, de modo que o modo Replay
    funciona sem credenciais.
    """

    def __init__(self, base_url=LLM_BASE_URL, model_id=LLM_MODEL_ID, api_key_env=LLM_API_KEY_ENV,
                 timeout=LLM_TIMEOUT, retry_count=LLM_RETRY_COUNT, retry_delay=LLM_RETRY_DELAY,
                 max_retry_delay=LLM_MAX_RETRY_DELAY, temperature=LLM_TEMPERATURE,
                 max_concurrency=LLM_MAX_CONCURRENCY):
        """
        Inicializa o gerenciador do cliente.

        Args:
            base_url (str): URL base da API (sem /chat/completions)
            model_id (str): Identificador do modelo
            api_key_env (str): Nome da variável de ambiente com a credencial
            timeout (float): Tempo limite das requisições em segundos
            retry_count (int): Número de novas tentativas
            retry_delay (float): Atraso inicial entre tentativas em segundos
            max_retry_delay (float): Teto do atraso exponencial
            temperature (float): Temperatura de amostragem
            max_concurrency (int): Requisições simultâneas em voo, somando todas as threads
        """
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.retry_count = retry_count
        self.retry_delay = retry_delay
        self.max_retry_delay = max_retry_delay
        self.temperature = temperature
        self.max_concurrency = max_concurrency
        self._in_flight = threading.BoundedSemaphore(max_concurrency)
        self._session_lock = threading.Lock()
        self.session = None
        self.network_calls = 0

    def connect(self):
        """
        Abre a sessão HTTP com a credencial lida do ambiente.

        Returns:
            bool: True quando a sessão está pronta
        """
        api_key = os.environ.get(self.api_key_env)
        if not api_key:
            logger.error(f"Credencial ausente: defina a variável {self.api_key_env}")
            raise ConfigError(f"Variável de ambiente {self.api_key_env} não definida")
        self.session = requests.Session()
        self.session.headers.update({
            "Authorization": f"Bearer {api_key}",
            "Content-Type": "application/json",
        })
        logger.info(f"Sessão aberta com {self.base_url} (modelo {self.model_id})")
        return True

    def disconnect(self):
        """
        Encerra a sessão HTTP.

        Returns:
            bool: True se havia uma sessão aberta
        """
        if self.session is not None:
            self.session.close()
            self.session = None
            logger.info("Sessão com o LLM encerrada")
            return True
        return False

    def _backoff(self, attempt):
        return min(self.retry_delay * (2 ** attempt), self.max_retry_delay)

    def _execute_with_retry(self, operation_func, *args, **kwargs):
        """
        Executa uma operação de rede com novas tentativas e backoff exponencial.

        Erros de conexão, timeouts, 429 e 5xx são repetidos até retry_count
        vezes; depois disso o erro é propagado.
        """
        for attempt in range(self.retry_count + 1):
            try:
                with self._session_lock:
                    if self.session is None:
                        self.connect()
                return operation_func(*args, **kwargs)

            except (RateLimitedError, _ServerError, requests.ConnectionError, requests.Timeout) as e:
                logger.warning(f"Falha transitória (tentativa {attempt+1}/{self.retry_count+1}): {e}")
                if attempt < self.retry_count:
                    time.sleep(self._backoff(attempt))
                    continue
                logger.error("Número máximo de tentativas excedido")
                if isinstance(e, TransportError):
                    raise
                raise TransportError(f"Falha de conexão com {self.base_url}: {e}") from e

            except requests.RequestException as e:
                logger.error(f"Erro HTTP: {e}")
                raise TransportError(str(e)) from e

    def _post_chat(self, prompt):
        url = f"{self.base_url}/chat/completions"
        body = {
            "model": self.model_id,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        logger.debug(f"POST {url} headers={{'Authorization': 'Bearer ***'}} body={body}")
        with self._session_lock:
            self.network_calls += 1
        with self._in_flight:
            response = self.session.post(url, json=body, timeout=self.timeout)
        logger.debug(f"Resposta {response.status_code}: {response.text}")
        if response.status_code == 429:
            raise RateLimitedError(f"Limite de requisições atingido em {url}")
        if response.status_code >= 500:
            raise _ServerError(f"Erro {response.status_code} do servidor em {url}")
        if response.status_code >= 400:
            raise TransportError(f"Erro {response.status_code} em {url}: {response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise TransportError(f"Resposta fora do protocolo de chat-completion: {e}") from e

    def complete(self, prompt):
        """Envia um prompt (uma mensagem de usuário) e devolve o texto da resposta."""
        return self._execute_with_retry(self._post_chat, prompt)

    def query(self, bundle, cache):
        """
        Consulta o LLM respeitando o modo do cache.

        Args:
            bundle (PromptBundle): Prompt renderizado
            cache (ReplayCache): Cache de gravação/reprodução

        Returns:
            LlmResponse: Resposta com a distribuição interpretada, quando possível
        """
        key = request_key(self.model_id, self.temperature, bundle.text)
        entry = cache.lookup(key) if cache.mode is not CacheMode.PASSTHROUGH else None
        if entry is not None:
            raw_text = entry.raw_text
            logger.debug(f"Acerto no cache: {key}")
        elif cache.mode is CacheMode.REPLAY:
            logger.error(f"Falta no cache em modo replay: {key}")
            raise CacheMissError(key)
        else:
            raw_text = self.complete(bundle.text)
            if cache.mode is CacheMode.RECORD:
                cache.store(key, self.model_id, self.temperature, bundle.text, raw_text)

        try:
            parsed = parse_response(raw_text)
        except ValidationError as e:
            logger.warning(f"Resposta do LLM não interpretável ({bundle.outcome.value}): {e}")
            parsed = None
        return LlmResponse(raw_text, self.model_id, self.temperature, parsed)

    def query_many(self, bundles, cache, max_workers=None):
        """Consulta vários prompts com no máximo max_workers requisições em voo; a ordem é preservada."""
        max_workers = max_workers or self.max_concurrency
        if max_workers <= 1 or len(bundles) <= 1:
            return [self.query(bundle, cache) for bundle in bundles]
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            return list(executor.map(lambda b: self.query(b, cache), bundles))
