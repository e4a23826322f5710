#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Pacote de aplicação.

Este pacote contém os métodos de integração (BCI e NNI), as métricas de
avaliação, a renderização dos relatórios e a orquestração da grade.
"""

from src.application.fusion import Prior, PriorKind, bci_fuse, fuse_corpus
from src.application.metrics import (
    ConfusionMatrix, MetricReport, MetricTriple, confusion, evaluate, f1_weighted,
    improvement_delta, kld, rmse,
)
from src.application.nni import MlpParams, TrainConfig, cross_validate, forward, train
from src.application.pipeline import EmotionPipelineHandler, GridEntry, RunManifest, load_manifest

__all__ = [
    'Prior', 'PriorKind', 'bci_fuse', 'fuse_corpus', 'ConfusionMatrix', 'MetricReport',
    'MetricTriple', 'confusion', 'evaluate', 'f1_weighted', 'improvement_delta', 'kld', 'rmse',
    'MlpParams', 'TrainConfig', 'cross_validate', 'forward', 'train', 'EmotionPipelineHandler',
    'GridEntry', 'RunManifest', 'load_manifest',
]
