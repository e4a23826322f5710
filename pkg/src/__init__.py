#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Pacote principal do projeto EmotionCueIntegration.
"""

__version__ = "0.1.0"
__author__ = "EmotionCueIntegration Team"
