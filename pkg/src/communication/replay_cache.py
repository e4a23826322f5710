#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Cache de gravação/reprodução das respostas do LLM.

Arquivo JSON-lines somente-anexação, uma entrada por linha:
{key, model_id, temperature, prompt_sha256, raw_text, timestamp}.
Em caso de chave repetida vale a última linha.
"""

import hashlib
import json
import logging
import os
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from enum import Enum

from src.core.exceptions import ConfigError

logger = logging.getLogger(__name__)


class CacheMode(Enum):
    RECORD = "record"          # reutiliza acertos, busca e grava as faltas
    REPLAY = "replay"          # nunca acessa a rede; falta = erro
    PASSTHROUGH = "passthrough"  # sempre acessa a rede, não lê nem grava

    @classmethod
    def parse(cls, value):
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"Modo de cache desconhecido: {value!r}") from None


@dataclass(frozen=True)
class CacheEntry:
    key: str
    model_id: str
    temperature: float
    prompt_sha256: str
    raw_text: str
    timestamp: str


def sha256_hex(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def request_key(model_id, temperature, prompt):
    """Hash da requisição: modelo, temperatura e texto do prompt."""
    return sha256_hex(f"{model_id}\n{float(temperature)!r}\n{prompt}")


class ReplayCache:
    """
    Mapa chave-da-requisição -> resposta gravada.

    Leituras concorrentes são livres; escritas são serializadas por um lock.
    """

    def __init__(self, path=None, mode=CacheMode.REPLAY):
        self.path = path
        self.mode = mode
        self.entries = {}
        self._lock = threading.Lock()
        if path and os.path.exists(path):
            self._load()
        logger.info(f"Cache de LLM em modo {mode.value} com {len(self.entries)} entrada(s)")

    def _load(self):
        with open(self.path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    entry = CacheEntry(**json.loads(line))
                except (ValueError, TypeError) as e:
                    logger.error(f"Entrada inválida no cache {self.path}:{line_number}")
                    raise ConfigError(f"Cache corrompido na linha {line_number}: {e}") from e
                self.entries[entry.key] = entry

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries

    def lookup(self, key):
        return self.entries.get(key)

    def store(self, key, model_id, temperature, prompt, raw_text):
        """Grava uma resposta na memória e anexa a linha ao arquivo."""
        entry = CacheEntry(
            key=key,
            model_id=model_id,
            temperature=float(temperature),
            prompt_sha256=sha256_hex(prompt),
            raw_text=raw_text,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        with self._lock:
            self.entries[key] = entry
            if self.path:
                directory = os.path.dirname(self.path)
                if directory:
                    os.makedirs(directory, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(json.dumps(asdict(entry), ensure_ascii=False) + "\n")
        logger.debug(f"Resposta gravada no cache: {key}")
        return entry
