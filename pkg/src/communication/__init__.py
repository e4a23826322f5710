#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Pacote de comunicação com o LLM.

Este pacote contém a construção de prompts, o cliente de chat-completion e o
cache de gravação/reprodução.
"""

from src.communication.llm_client import LlmClientManager, LlmResponse
from src.communication.prompts import (
    PromptBundle, PromptMode, build_prompt, parse_response, render_answer, render_face_cue,
    render_outcome,
)
from src.communication.replay_cache import CacheMode, ReplayCache, request_key

__all__ = [
    'LlmClientManager', 'LlmResponse', 'PromptBundle', 'PromptMode', 'build_prompt',
    'parse_response', 'render_answer', 'render_face_cue', 'render_outcome', 'CacheMode',
    'ReplayCache', 'request_key',
]
