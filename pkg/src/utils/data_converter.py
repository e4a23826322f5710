#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Módulo para conversão entre os tipos do domínio e suas representações em texto.
"""

import json
import logging

import numpy as np

from src.core.emotions import Emotion, make_distribution
from src.core.exceptions import ConfigError, DistributionError

logger = logging.getLogger(__name__)


class EmotionDataConverter:
    """
    Classe para conversão de distribuições e parâmetros para JSON e linhas de CSV.

    A renderização canônica de uma distribuição é um objeto JSON com as sete
    emoções em minúsculas, na ordem canônica.
    """

    @staticmethod
    def distribution_to_json(d):
        """
        Renderiza uma distribuição no formato JSON canônico.

        Args:
            d (EmotionDistribution): Distribuição a ser renderizada

        Returns:
            str: Objeto JSON com as chaves joy..sadness
        """
        return json.dumps(d.to_dict())

    @staticmethod
    def json_to_distribution(payload):
        """
        Converte o JSON canônico (texto ou dict) de volta em distribuição.

        Args:
            payload (str | dict): Objeto com as sete emoções

        Returns:
            EmotionDistribution: Distribuição validada
        """
        data = json.loads(payload) if isinstance(payload, str) else dict(payload)
        lowered = {str(k).lower(): v for k, v in data.items()}
        missing = [e.key for e in Emotion if e.key not in lowered]
        if missing:
            logger.error(f"Chaves ausentes no JSON da distribuição: {missing}")
            raise DistributionError(f"Chaves ausentes: {', '.join(missing)}")
        return make_distribution([float(lowered[e.key]) for e in Emotion])

    @staticmethod
    def distribution_to_row(d):
        """Componentes na ordem das colunas do CSV."""
        return list(d.probs)

    @staticmethod
    def row_to_distribution(values):
        """Constrói uma distribuição a partir das 7 colunas de probabilidade."""
        return make_distribution([float(v) for v in values])

    @staticmethod
    def arrays_to_json(arrays, format_name, version):
        """
        Serializa matrizes nomeadas em JSON versionado (cabeçalho de formas + valores
        em ordem row-major).

        Args:
            arrays (dict): Nome -> numpy.ndarray, na ordem de escrita
            format_name (str): Identificador do formato
            version (int): Versão do formato

        Returns:
            str: Documento JSON determinístico
        """
        document = {
            "format": format_name,
            "version": version,
            "shapes": {name: list(np.shape(a)) for name, a in arrays.items()},
            "values": {name: np.asarray(a, dtype=np.float64).ravel(order="C").tolist()
                       for name, a in arrays.items()},
        }
        return json.dumps(document, indent=1)

    @staticmethod
    def json_to_arrays(text, format_name, version):
        """
        Reconstrói as matrizes de um documento gerado por arrays_to_json.

        Returns:
            dict: Nome -> numpy.ndarray com a forma do cabeçalho
        """
        document = json.loads(text)
        if document.get("format") != format_name or document.get("version") != version:
            raise ConfigError(
                f"Formato não suportado: {document.get('format')!r} v{document.get('version')!r}")
        arrays = {}
        for name, shape in document["shapes"].items():
            values = np.asarray(document["values"][name], dtype=np.float64)
            if values.size != int(np.prod(shape)):
                raise ConfigError(f"Matriz {name!r} não corresponde à forma {shape}")
            arrays[name] = values.reshape(shape, order="C")
        return arrays
