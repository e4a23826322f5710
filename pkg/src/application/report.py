#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Renderização dos relatórios de avaliação em CSV e Markdown.

As tabelas seguem o layout da comparação de métodos (uma linha por método,
KLD/RMSE/F1) e das quebras por resultado do jogo (Overall, CC, DC, CD, DD).
"""

import logging
import os
import re

import numpy as np
import pandas as pd

from src.core.emotions import EMOTIONS, OUTCOMES, SourceId, SourceKind, make_distribution
from src.core.exceptions import ValidationError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"
METRICS = ("kld", "rmse", "f1_weighted")
METRIC_TITLES = {"kld": "KLD", "rmse": "RMSE", "f1_weighted": "F1"}
_INTEGRATION_SUFFIX = {
    SourceKind.FUSED_BCI: "BCI",
    SourceKind.FUSED_NNI: "NNI",
}


def _display(code):
    try:
        return SourceId.parse(code).kind.display_name
    except ValidationError:
        return code


def method_label(source):
    """
    Rótulo de exibição de uma fonte.

    fused_bci:lstm+gpt4_ctx -> "LSTM+GPT-4 (BCI)"; fused_gpt4:lstm -> "LSTM (GPT-4)".
    """
    if source.kind in _INTEGRATION_SUFFIX and source.detail:
        cues = "+".join(_display(part) for part in source.detail.split("+"))
        return f"{cues} ({_INTEGRATION_SUFFIX[source.kind]})"
    if source.kind is SourceKind.FUSED_GPT4 and source.detail:
        return f"{_display(source.detail)} (GPT-4)"
    label = source.kind.display_name
    return f"{label} [{source.detail}]" if source.detail else label


def slug(source):
    return re.sub(r"[^A-Za-z0-9_]+", "_", source.code).strip("_")


def report_frame(report):
    """Uma linha para o overall e uma por resultado presente."""
    rows = [["overall", report.n_items] + [getattr(report.overall, m) for m in METRICS]]
    for outcome in OUTCOMES:
        if outcome in report.by_outcome:
            triple = report.by_outcome[outcome]
            rows.append([outcome.value, report.n_by_outcome[outcome]] + [getattr(triple, m) for m in METRICS])
    return pd.DataFrame(rows, columns=["scope", "n"] + list(METRICS))


def summary_frame(named_reports):
    """Tabela de comparação: método x (KLD, RMSE, F1)."""
    rows = [[label] + [getattr(report.overall, m) for m in METRICS] for label, report in named_reports]
    return pd.DataFrame(rows, columns=["method"] + [METRIC_TITLES[m] for m in METRICS])


def breakdown_frame(named_reports, metric):
    """Quebra de uma métrica por resultado do jogo; resultados ausentes ficam vazios."""
    rows = []
    for label, report in named_reports:
        row = [label, getattr(report.overall, metric)]
        for outcome in OUTCOMES:
            triple = report.by_outcome.get(outcome)
            row.append(getattr(triple, metric) if triple is not None else np.nan)
        rows.append(row)
    return pd.DataFrame(rows, columns=["method", "Overall"] + [o.value for o in OUTCOMES])


def confusion_frame(matrix):
    labels = [e.label for e in EMOTIONS]
    frame = pd.DataFrame(matrix.as_array(), columns=labels)
    frame.insert(0, "true\\pred", labels)
    return frame


def delta_frame(deltas_by_method):
    """Ganho da integração por método e resultado (positivo = melhorou)."""
    rows = []
    for label, deltas in deltas_by_method:
        for outcome in OUTCOMES:
            if outcome in deltas:
                rows.append([label, outcome.value, deltas[outcome].delta_kld, deltas[outcome].delta_rmse])
    return pd.DataFrame(rows, columns=["method", "outcome", "delta_kld", "delta_rmse"])


def distribution_frame(corpus, sources):
    """Distribuição média por resultado do jogo para cada fonte (dados dos gráficos de barras)."""
    rows = []
    for source in sources:
        for outcome in OUTCOMES:
            members = [r.get(source).as_array() for r in corpus if r.outcome is outcome and r.has(source)]
            if members:
                mean = make_distribution(np.mean(members, axis=0))
                rows.append([method_label(source), outcome.value, len(members)] + list(mean.probs))
    return pd.DataFrame(rows, columns=["source", "outcome", "n"] + [e.key for e in EMOTIONS])


def to_markdown(frame, digits=3):
    """Tabela Markdown com colunas alinhadas."""
    def cell(value):
        if isinstance(value, (float, np.floating)):
            return "" if np.isnan(value) else f"{value:.{digits}f}"
        return str(value)

    header = [str(c) for c in frame.columns]
    body = [[cell(v) for v in row] for row in frame.itertuples(index=False, name=None)]
    widths = [max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
              for i in range(len(header))]

    def line(cells):
        padded = [c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths))]
        return "| " + " | ".join(padded) + " |"

    separator = "|" + "|".join(
        "-" * (w + 1) + ":" if i else ":" + "-" * (w + 1) for i, w in enumerate(widths)) + "|"
    return "\n".join([line(header), separator] + [line(r) for r in body]) + "\n"


def write_frame(frame, directory, name, markdown=False):
    """Escreve <name>.csv (e <name>.md) em directory; retorna os caminhos gerados."""
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, f"{name}.csv")
    frame.to_csv(csv_path, index=False, lineterminator="\n", float_format=FLOAT_FORMAT)
    paths = [csv_path]
    if markdown:
        md_path = os.path.join(directory, f"{name}.md")
        with open(md_path, "w", encoding="utf-8") as handle:
            handle.write(to_markdown(frame))
        paths.append(md_path)
    logger.debug(f"Relatório escrito: {', '.join(paths)}")
    return paths
