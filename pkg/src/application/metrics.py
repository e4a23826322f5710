#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Métricas de comparação entre distribuições (KLD, RMSE) e entre rótulos
(F1 ponderado, matriz de confusão), com quebra por resultado do jogo.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import rel_entr
from sklearn.metrics import confusion_matrix, f1_score

from src.config import KLD_DIRECTION, KLD_LOG_BASE, SMOOTHING_EPSILON
from src.core.emotions import EMOTIONS, N_EMOTIONS, OUTCOMES, ROLE_TRUTH, argmax_label, smooth
from src.core.exceptions import (
    ConfigError, EmptyCorpusError, EmptyInputError, LengthMismatchError,
    OutcomeSetMismatchError,
)

logger = logging.getLogger(__name__)

LABELS = list(range(N_EMOTIONS))


@dataclass(frozen=True)
class MetricTriple:
    kld: float
    rmse: float
    f1_weighted: float


@dataclass(frozen=True)
class MetricReport:
    """Métricas gerais e por resultado; resultados ausentes do corpus são omitidos."""

    overall: MetricTriple
    by_outcome: dict = field(default_factory=dict)
    n_items: int = 0
    n_by_outcome: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Contagens 7x7: linhas = emoção verdadeira, colunas = emoção prevista."""

    counts: tuple

    @property
    def total(self):
        return sum(sum(row) for row in self.counts)

    def as_array(self):
        return np.array(self.counts, dtype=np.int64)

    def __getitem__(self, index):
        true_label, pred_label = index
        return self.counts[true_label.value][pred_label.value]


@dataclass(frozen=True)
class OutcomeDelta:
    delta_kld: float
    delta_rmse: float


def _log_divisor(base):
    if str(base) == "e":
        return 1.0
    if str(base) == "2":
        return math.log(2.0)
    raise ConfigError(f"Base de logaritmo não suportada: {base!r}")


def kld(truth, pred, epsilon=SMOOTHING_EPSILON, direction=KLD_DIRECTION, base=KLD_LOG_BASE):
    """
    Divergência de Kullback-Leibler entre a verdade e a predição.

    A referência é usada como está (convenção 0 ln 0 = 0). A outra distribuição é
    suavizada com epsilon quando tem zero onde a referência tem massa, o que
    mantém o valor finito.

    Args:
        truth (EmotionDistribution): Distribuição de referência (anotação humana)
        pred (EmotionDistribution): Distribuição prevista
        epsilon (float): Suavização aplicada quando necessária
        direction (str): "truth_pred" = KL(truth || pred); "pred_truth" = KL(pred || truth)
        base (str): "e" (nats) ou "2" (bits)

    Returns:
        float: Divergência, sempre >= 0
    """
    if direction == "truth_pred":
        reference, other = truth, pred
    elif direction == "pred_truth":
        reference, other = pred, truth
    else:
        raise ConfigError(f"Direção de KLD desconhecida: {direction!r}")
    p = reference.as_array()
    q = other.as_array()
    if np.any((p > 0.0) & (q == 0.0)):
        q = smooth(other, epsilon).as_array()
    value = math.fsum(rel_entr(p, q).tolist()) / _log_divisor(base)
    return max(value, 0.0)


def rmse(truth, pred):
    """Raiz do erro quadrático médio sobre as 7 componentes."""
    diff = truth.as_array() - pred.as_array()
    return math.sqrt(math.fsum((diff * diff).tolist()) / N_EMOTIONS)


def _check_label_lists(truths, preds):
    if len(truths) != len(preds):
        raise LengthMismatchError(f"Listas com tamanhos diferentes: {len(truths)} e {len(preds)}")


def f1_weighted(truths, preds):
    """
    F1 por classe ponderado pelo suporte da classe verdadeira.

    Args:
        truths (list): Emoções verdadeiras
        preds (list): Emoções previstas

    Returns:
        float: F1 ponderado em [0, 1]
    """
    _check_label_lists(truths, preds)
    if not truths:
        raise EmptyInputError("F1 exige pelo menos um item")
    return float(f1_score(
        [e.value for e in truths], [e.value for e in preds],
        labels=LABELS, average="weighted", zero_division=0,
    ))


def confusion(truths, preds):
    """Matriz de confusão sobre as sete emoções (lista vazia -> matriz nula)."""
    _check_label_lists(truths, preds)
    if not truths:
        return ConfusionMatrix(tuple((0,) * N_EMOTIONS for _ in EMOTIONS))
    counts = confusion_matrix([e.value for e in truths], [e.value for e in preds], labels=LABELS)
    return ConfusionMatrix(tuple(tuple(int(c) for c in row) for row in counts))


def _mean(values):
    return math.fsum(values) / len(values)


def _triple(rows):
    return MetricTriple(
        kld=_mean([r[0] for r in rows]),
        rmse=_mean([r[1] for r in rows]),
        f1_weighted=f1_weighted([r[2] for r in rows], [r[3] for r in rows]),
    )


def evaluate(corpus, truth_source, pred_source, epsilon=SMOOTHING_EPSILON,
             direction=KLD_DIRECTION, base=KLD_LOG_BASE):
    """
    Avalia uma fonte prevista contra uma fonte de verdade no corpus inteiro.

    Overall é a média simples por clipe; cada resultado do jogo usa apenas os
    clipes daquele resultado. O F1 usa os rótulos argmax.

    Returns:
        tuple: (MetricReport, ConfusionMatrix)
    """
    if not corpus:
        raise EmptyCorpusError("Corpus vazio")
    truth_source.check_role(ROLE_TRUTH)

    rows_by_outcome = {}
    all_rows = []
    for record in corpus:
        truth = record.get(truth_source)
        pred = record.get(pred_source)
        row = (
            kld(truth, pred, epsilon, direction, base),
            rmse(truth, pred),
            argmax_label(truth),
            argmax_label(pred),
        )
        all_rows.append(row)
        rows_by_outcome.setdefault(record.outcome, []).append(row)

    by_outcome = {o: _triple(rows_by_outcome[o]) for o in OUTCOMES if o in rows_by_outcome}
    report = MetricReport(
        overall=_triple(all_rows),
        by_outcome=by_outcome,
        n_items=len(all_rows),
        n_by_outcome={o: len(rows_by_outcome[o]) for o in by_outcome},
    )
    matrix = confusion([r[2] for r in all_rows], [r[3] for r in all_rows])
    logger.info(
        f"{pred_source} vs {truth_source}: KLD={report.overall.kld:.4f} "
        f"RMSE={report.overall.rmse:.4f} F1={report.overall.f1_weighted:.4f} (n={report.n_items})")
    return report, matrix


def improvement_delta(report_face_only, report_fused):
    """
    Ganho da integração por resultado: métrica da face menos métrica fundida
    (positivo = a integração ajudou).
    """
    if set(report_face_only.by_outcome) != set(report_fused.by_outcome):
        raise OutcomeSetMismatchError(
            f"Resultados diferentes: {sorted(o.value for o in report_face_only.by_outcome)} vs "
            f"{sorted(o.value for o in report_fused.by_outcome)}")
    return {
        outcome: OutcomeDelta(
            delta_kld=report_face_only.by_outcome[outcome].kld - report_fused.by_outcome[outcome].kld,
            delta_rmse=report_face_only.by_outcome[outcome].rmse - report_fused.by_outcome[outcome].rmse,
        )
        for outcome in OUTCOMES if outcome in report_fused.by_outcome
    }
