#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Leitura e escrita do corpus (uma linha por clipe x fonte).

Cabeçalho exato:
clip_id,outcome,source,joy,neutral,surprise,anger,disgust,fear,sadness
"""

import json
import logging

import pandas as pd

from src.config import CORPUS_HEADER
from src.core.emotions import (
    EMOTIONS, ClipRecord, GameOutcome, SourceId, make_distribution, sort_corpus,
)
from src.core.exceptions import (
    DistributionError, DuplicateEntryError, MalformedRowError, UnknownOutcomeError,
    UnknownSourceKindError,
)
from src.utils.data_converter import EmotionDataConverter

logger = logging.getLogger(__name__)


def _group_rows(rows):
    """
    Agrupa (linha, clip_id, outcome, source, dist) em ClipRecord.

    Returns:
        list: ClipRecord ordenados por clip_id
    """
    outcomes = {}
    grouped = {}
    for line, clip_id, outcome, source, dist in rows:
        if clip_id in outcomes and outcomes[clip_id] is not outcome:
            raise MalformedRowError(line, f"clipe {clip_id!r} com resultados diferentes")
        outcomes[clip_id] = outcome
        sources = grouped.setdefault(clip_id, {})
        if source in sources:
            raise DuplicateEntryError(f"Linha {line}: par repetido ({clip_id}, {source})")
        sources[source] = dist
    return sort_corpus([ClipRecord(cid, outcomes[cid], dists) for cid, dists in grouped.items()])


def load_corpus(path):
    """
    Carrega um corpus CSV.

    Args:
        path (str): Caminho do arquivo

    Returns:
        list: ClipRecord, um por clip_id, ordenados por clip_id
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise MalformedRowError(1, "arquivo vazio, cabeçalho obrigatório") from None
    except pd.errors.ParserError as e:
        raise MalformedRowError(0, f"CSV ilegível: {e}") from e

    if list(frame.columns) != CORPUS_HEADER:
        raise MalformedRowError(1, f"cabeçalho inesperado: {','.join(frame.columns)}")

    rows = []
    for index, row in enumerate(frame.itertuples(index=False, name=None)):
        line = index + 2
        clip_id, outcome_code, source_code = (str(value).strip() for value in row[:3])
        if not clip_id:
            raise MalformedRowError(line, "clip_id vazio")
        try:
            outcome = GameOutcome.parse(outcome_code)
        except UnknownOutcomeError as e:
            raise UnknownOutcomeError(f"Linha {line}: {e}") from None
        try:
            source = SourceId.parse(source_code)
        except UnknownSourceKindError as e:
            raise UnknownSourceKindError(f"Linha {line}: {e}") from None
        try:
            dist = EmotionDataConverter.row_to_distribution(row[3:])
        except ValueError as e:
            raise MalformedRowError(line, f"probabilidade ilegível ({e})") from None
        except DistributionError as e:
            raise MalformedRowError(line, f"{type(e).__name__}: {e}") from None
        rows.append((line, clip_id, outcome, source, dist))

    corpus = _group_rows(rows)
    logger.info(f"Corpus carregado de {path}: {len(corpus)} clipe(s), {len(rows)} linha(s)")
    return corpus


def corpus_frame(corpus):
    """DataFrame no layout do CSV, ordenado por clip_id e código da fonte."""
    records = []
    for record in sort_corpus(corpus):
        for source in record.sources:
            row = [record.clip_id, record.outcome.value, source.code]
            row.extend(EmotionDataConverter.distribution_to_row(record.get(source)))
            records.append(row)
    return pd.DataFrame(records, columns=CORPUS_HEADER)


def save_corpus(corpus, path):
    """Escreve o corpus em CSV; a saída é determinística para a mesma entrada."""
    frame = corpus_frame(corpus)
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Corpus salvo em {path}: {len(corpus)} clipe(s), {len(frame)} linha(s)")


def save_corpus_json(corpus, path):
    """Espelho JSON do corpus para ferramentas que preferem estrutura aninhada."""
    document = {
        "clips": [
            {
                "clip_id": record.clip_id,
                "outcome": record.outcome.value,
                "distributions": {s.code: record.get(s).to_dict() for s in record.sources},
            }
            for record in sort_corpus(corpus)
        ]
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, indent=1)


def load_corpus_json(path):
    with open(path, encoding="utf-8") as handle:
        document = json.load(handle)
    rows = []
    for index, clip in enumerate(document.get("clips", []), start=1):
        outcome = GameOutcome.parse(clip["outcome"])
        for code, probs in clip["distributions"].items():
            try:
                dist = make_distribution([float(probs[e.key]) for e in EMOTIONS])
            except (KeyError, ValueError, DistributionError) as e:
                raise MalformedRowError(index, f"{type(e).__name__}: {e}") from None
            rows.append((index, clip["clip_id"], outcome, SourceId.parse(code), dist))
    return _group_rows(rows)
