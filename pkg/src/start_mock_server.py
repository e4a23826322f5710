#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Script para iniciar um servidor mock de chat-completion para testes.

Responde no formato pedido pelo prompt: a distribuição arquetípica do
resultado da rodada, aguçada pela pista facial quando o prompt a contém.
Permite exercitar o modo Record sem acesso à API real.
"""

import json
import logging
import os
import re
import socket
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

# Adicionar o diretório raiz ao path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

import numpy as np

from src.config import SYNTH_ARCHETYPES
from src.core.emotions import EMOTIONS, OUTCOMES, Emotion, make_distribution
from src.communication.prompts import render_answer

logger = logging.getLogger(__name__)

_OUTCOME_PATTERN = re.compile(r"Player A chooses to (split|steal), while Player B chooses to (split|steal)")
_FACE_LINE_PATTERN = re.compile(r"^- (\w+): ([0-9.]+)", re.MULTILINE)


def is_port_in_use(host, port):
    """
    Verifica se uma porta está em uso.

    Args:
        host (str): Endereço IP
        port (int): Número da porta

    Returns:
        bool: True se a porta estiver em uso, False caso contrário
    """
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        return s.connect_ex((host, port)) == 0


def mock_answer(prompt):
    """
    Resposta determinística para um prompt.

    Returns:
        str: Texto no formato "Joy: p1, ..., Sadness: p7."
    """
    match = _OUTCOME_PATTERN.search(prompt)
    if match is None:
        return "I cannot tell how Player A feels."
    outcome = next(o for o in OUTCOMES if (o.focal_move, o.other_move) == match.groups())
    scores = np.array(SYNTH_ARCHETYPES[outcome.value], dtype=np.float64)

    face = {Emotion.parse(name): float(value) for name, value in _FACE_LINE_PATTERN.findall(prompt)}
    if len(face) == len(EMOTIONS):
        scores = scores * (np.array([face[e] for e in EMOTIONS]) + 1e-3)
    return render_answer(make_distribution(np.round(scores / scores.sum(), 3)))


class MockChatHandler(BaseHTTPRequestHandler):
    """Atende POST .../chat/completions no protocolo de chat-completion."""

    def do_POST(self):
        if not self.path.rstrip("/").endswith("/chat/completions"):
            self.send_error(404, "Endpoint desconhecido")
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            body = json.loads(self.rfile.read(length))
            prompt = body["messages"][-1]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            logger.warning(f"Requisição inválida: {e}")
            self.send_error(400, "Corpo fora do protocolo")
            return

        content = mock_answer(prompt)
        payload = json.dumps({
            "object": "chat.completion",
            "model": body.get("model", "mock"),
            "choices": [{"index": 0, "message": {"role": "assistant", "content": content}}],
        }).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)
        logger.info(f"Resposta enviada: {content}")

    def log_message(self, format, *args):
        logger.debug(format % args)


def create_mock_server(host="localhost", port=8089):
    """Cria o servidor sem iniciá-lo; porta 0 escolhe uma porta livre."""
    return ThreadingHTTPServer((host, port), MockChatHandler)


def run_mock_server(host="localhost", port=8089):
    """
    Inicia o servidor mock de chat-completion.

    Args:
        host (str): Endereço IP para o servidor
        port (int): Porta para o servidor
    """
    if is_port_in_use(host, port):
        logger.error(f"A porta {port} já está em uso. Não é possível iniciar o servidor.")
        logger.error("Encerre o servidor existente antes de iniciar um novo.")
        sys.exit(1)

    server = create_mock_server(host, port)
    logger.info(f"Iniciando servidor mock de chat-completion em http://{host}:{port}/v1")
    logger.info("Pressione Ctrl+C para parar o servidor")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("Servidor interrompido pelo usuário")
    finally:
        server.server_close()


if __name__ == "__main__":
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    try:
        host = sys.argv[1] if len(sys.argv) > 1 else "localhost"
        port = int(sys.argv[2]) if len(sys.argv) > 2 else 8089
        run_mock_server(host, port)
    except KeyboardInterrupt:
        logger.info("Servidor interrompido pelo usuário")
    except Exception as e:
        logger.exception(f"Erro ao iniciar o servidor: {e}")
