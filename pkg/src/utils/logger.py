#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Módulo para configuração de logging da aplicação.
"""

import logging
import logging.handlers
import os
import sys

from src.config import LOG_LEVEL, LOG_FORMAT, LOG_FILE, LOG_MAX_SIZE, LOG_BACKUP_COUNT


def setup_logging(level=None, log_file=None):
    """
    Configura o sistema de logging da aplicação.

    Configura handlers para console (stderr, para não misturar com a saída do
    comando prompt) e arquivo, com rotação quando o tamanho máximo é atingido.

    Args:
        level (str): Nível de log; padrão LOG_LEVEL
        log_file (str): Caminho do arquivo de log; padrão LOG_FILE, "" desativa
    """
    log_file = LOG_FILE if log_file is None else log_file
    log_level = getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Remover handlers existentes para evitar duplicação
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=LOG_MAX_SIZE,
            backupCount=LOG_BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    # Bibliotecas externas
    logging.getLogger('urllib3').setLevel(logging.WARNING)
    logging.getLogger('requests').setLevel(logging.WARNING)

    logging.debug("Sistema de logging configurado")
    return root_logger
