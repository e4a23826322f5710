#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Pacote de utilitários do toolkit.

Este pacote contém funções e classes utilitárias para logging e conversão de dados.
"""

from src.utils.logger import setup_logging
from src.utils.data_converter import EmotionDataConverter

__all__ = ['setup_logging', 'EmotionDataConverter']
