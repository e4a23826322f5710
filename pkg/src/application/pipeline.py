#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Orquestração da grade de experimentos: manifesto, fusão, avaliação e treino NNI.
"""

import dataclasses
import hashlib
import logging
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import toml

from src.config import (
    DEFAULT_CACHE_MODE, DEFAULT_CACHE_PATH, DEFAULT_GRID, DEFAULT_OUTPUT_DIR, DEFAULT_PRIOR,
    DEFAULT_SEED, DEFAULT_TRUTH_SOURCE, FACE_MODEL_PHRASES, FUSED_CORPUS_FILE, LLM_BASE_URL,
    LLM_CONTEXT_MODELS, LLM_MODEL_ID, NNI_EPOCHS, NNI_FOLDS,
)
from src.core.emotions import (
    OUTCOMES, ROLE_CONTEXT, ROLE_FACE, ROLE_FUSED, ROLE_TRUTH, SourceId, SourceKind, sort_corpus,
    sources_in,
)
from src.core.exceptions import (
    ConfigError, EmotionIntegrationError, EmptyCorpusError, MissingSourceError, PipelineError,
    ResponseParseError, SourceRoleError, ValidationError,
)
from src.communication.llm_client import LlmClientManager
from src.communication.prompts import build_prompt
from src.communication.replay_cache import CacheMode, ReplayCache
from src.application import report as rpt
from src.application.fusion import Prior, PriorKind, bci_source_id, fuse_corpus
from src.application.metrics import MetricReport, MetricTriple, evaluate, improvement_delta
from src.application.nni import (
    TrainConfig, cross_validate, dataset_from_corpus, nni_fuse_corpus, nni_source_id, save_params,
    train,
)
from src.ingest.corpus import load_corpus, save_corpus

logger = logging.getLogger(__name__)

MANIFEST_KEYS = {
    "corpus", "output_dir", "seed", "prior", "cache_mode", "cache_path", "truth_source",
    "model_id", "base_url", "jobs", "nni_epochs", "nni_folds", "grid",
}


def derive_seed(seed, label):
    """Seed de um sub-experimento: seed XOR os 4 primeiros bytes de sha256(label)."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return (int(seed) ^ int.from_bytes(digest[:4], "big")) & 0xFFFFFFFF


class Integration(Enum):
    BCI = "bci"
    LLM = "llm"
    NNI = "nni"

    @classmethod
    def parse(cls, value):
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"Integração desconhecida: {value!r} (use bci, llm ou nni)") from None


@dataclass(frozen=True)
class GridEntry:
    """Uma linha da grade: pista facial, pista de contexto e método de integração."""

    face: SourceId
    integration: Integration
    context: SourceId = None

    def __post_init__(self):
        try:
            self.face.check_role(ROLE_FACE)
            if self.integration is Integration.LLM:
                if self.context is not None:
                    raise ConfigError(f"Integração llm não aceita fonte de contexto ({self.context})")
                if self.face.code not in FACE_MODEL_PHRASES:
                    raise ConfigError(f"Reconhecedor sem descrição no prompt: {self.face}")
            elif self.context is None:
                raise ConfigError(f"Integração {self.integration.value} exige fonte de contexto")
            else:
                self.context.check_role(ROLE_CONTEXT)
        except SourceRoleError as e:
            raise ConfigError(str(e)) from e

    @property
    def label(self):
        cues = self.face.code if self.context is None else f"{self.face.code}+{self.context.code}"
        return f"{cues}/{self.integration.value}"

    @property
    def output_source(self):
        if self.integration is Integration.BCI:
            return bci_source_id(self.face, self.context)
        if self.integration is Integration.NNI:
            return nni_source_id(self.face, self.context)
        return SourceId(SourceKind.FUSED_GPT4, self.face.code)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"face", "context", "integration"}
        if unknown:
            raise ConfigError(f"Chaves desconhecidas na grade: {sorted(unknown)}")
        if "face" not in data or "integration" not in data:
            raise ConfigError(f"Entrada da grade incompleta: {data}")
        context = data.get("context")
        return cls(
            face=SourceId.parse(data["face"]),
            integration=Integration.parse(data["integration"]),
            context=SourceId.parse(context) if context else None,
        )


def default_grid():
    return tuple(GridEntry.from_dict(entry) for entry in DEFAULT_GRID)


@dataclass(frozen=True)
class RunManifest:
    """Configuração declarativa de uma execução."""

    corpus: str = ""
    output_dir: str = DEFAULT_OUTPUT_DIR
    seed: int = DEFAULT_SEED
    prior: PriorKind = PriorKind(DEFAULT_PRIOR)
    cache_mode: CacheMode = CacheMode(DEFAULT_CACHE_MODE)
    cache_path: str = DEFAULT_CACHE_PATH
    truth_source: SourceId = SourceId.parse(DEFAULT_TRUTH_SOURCE)
    model_id: str = LLM_MODEL_ID
    base_url: str = LLM_BASE_URL
    jobs: int = 1
    nni_epochs: int = NNI_EPOCHS
    nni_folds: int = NNI_FOLDS
    grid: tuple = field(default_factory=default_grid)

    def __post_init__(self):
        if self.seed < 0 or self.seed > 0xFFFFFFFF:
            raise ConfigError(f"seed fora do intervalo de 32 bits sem sinal: {self.seed}")
        if self.jobs < 1:
            raise ConfigError(f"jobs deve ser >= 1 (recebido {self.jobs})")
        try:
            self.truth_source.check_role(ROLE_TRUTH)
        except SourceRoleError as e:
            raise ConfigError(str(e)) from e
        outputs = [entry.output_source for entry in self.grid]
        if len(set(outputs)) != len(outputs):
            raise ConfigError("A grade repete a mesma combinação de fontes e integração")

    def with_overrides(self, **overrides):
        """Cópia com as chaves não nulas substituídas (flags globais da CLI)."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes) if changes else self

    @property
    def fused_corpus_path(self):
        return os.path.join(self.output_dir, FUSED_CORPUS_FILE)


def manifest_from_dict(data, base_dir=""):
    """
    Constrói um RunManifest a partir das chaves do TOML.

    Caminhos relativos de corpus, cache e saída são resolvidos a partir de base_dir.
    """
    unknown = set(data) - MANIFEST_KEYS
    if unknown:
        raise ConfigError(f"Chaves desconhecidas no manifesto: {sorted(unknown)}")

    def resolve(path):
        return path if not path or os.path.isabs(path) else os.path.join(base_dir, path)

    kwargs = {}
    for key in ("corpus", "output_dir", "cache_path"):
        if key in data:
            kwargs[key] = resolve(str(data[key]))
    for key in ("seed", "jobs", "nni_epochs", "nni_folds"):
        if key in data:
            if isinstance(data[key], bool) or not isinstance(data[key], int):
                raise ConfigError(f"{key} deve ser inteiro (recebido {data[key]!r})")
            kwargs[key] = data[key]
    for key in ("model_id", "base_url"):
        if key in data:
            kwargs[key] = str(data[key])
    if "prior" in data:
        try:
            kwargs["prior"] = PriorKind.parse(data["prior"])
        except ValidationError as e:
            raise ConfigError(str(e)) from e
    if "cache_mode" in data:
        kwargs["cache_mode"] = CacheMode.parse(data["cache_mode"])
    if "truth_source" in data:
        kwargs["truth_source"] = SourceId.parse(data["truth_source"])
    if "grid" in data:
        if not isinstance(data["grid"], list):
            raise ConfigError("grid deve ser uma lista de tabelas [[grid]]")
        kwargs["grid"] = tuple(GridEntry.from_dict(entry) for entry in data["grid"])
    return RunManifest(**kwargs)


def load_manifest(path):
    """
    Lê e valida um manifesto TOML.

    Args:
        path (str): Caminho do manifesto

    Returns:
        RunManifest: Manifesto validado
    """
    try:
        data = toml.load(path)
    except toml.TomlDecodeError as e:
        logger.error(f"Manifesto inválido em {path}: {e}")
        raise ConfigError(f"Manifesto ilegível: {e}") from e
    manifest = manifest_from_dict(data, os.path.dirname(os.path.abspath(path)))
    logger.info(f"Manifesto carregado de {path}: {len(manifest.grid)} entrada(s) na grade")
    return manifest


def _is_obtainable(source):
    return not source.detail and source.kind.value in LLM_CONTEXT_MODELS


class EmotionPipelineHandler:
    """
    Classe para executar a grade de métodos de um manifesto sobre um corpus.

    Os clientes do LLM são criados sob demanda, um por identificador de
    modelo, e compartilham o mesmo cache de gravação/reprodução.
    """

    def __init__(self, manifest, cache=None, clients=None):
        """
        Inicializa o handler.

        Args:
            manifest (RunManifest): Configuração da execução
            cache (ReplayCache): Cache do LLM; aberto a partir do manifesto quando omitido
            clients (dict): model_id -> LlmClientManager já configurado
        """
        self.manifest = manifest
        self.cache = cache
        self.clients = dict(clients or {})
        self._lock = threading.Lock()

    def _get_cache(self):
        with self._lock:
            if self.cache is None:
                self.cache = ReplayCache(self.manifest.cache_path, self.manifest.cache_mode)
            return self.cache

    def _get_client(self, model_id):
        with self._lock:
            if model_id not in self.clients:
                self.clients[model_id] = LlmClientManager(base_url=self.manifest.base_url, model_id=model_id)
            return self.clients[model_id]

    def close(self):
        for client in self.clients.values():
            client.disconnect()

    def prior(self, corpus):
        if self.manifest.prior is PriorKind.EMPIRICAL:
            return Prior.empirical(corpus, self.manifest.truth_source)
        return Prior.uniform()

    def _query(self, label, bundles, model_id):
        client = self._get_client(model_id)
        try:
            responses = client.query_many(bundles, self._get_cache())
        except EmotionIntegrationError as e:
            raise PipelineError(label, "", e) from e
        return responses

    def record_context(self, corpus, context_source, model_id=None):
        """
        Consulta o prompt só de contexto para cada resultado presente e anexa a
        resposta a todos os clipes daquele resultado.

        Returns:
            list: Novos ClipRecord com a fonte de contexto
        """
        context_source.check_role(ROLE_CONTEXT)
        model_id = model_id or LLM_CONTEXT_MODELS.get(context_source.code, self.manifest.model_id)
        records = sort_corpus(corpus)
        outcomes = [o for o in OUTCOMES if any(r.outcome is o for r in records)]
        label = f"{context_source.code}/llm-record"
        logger.info(f"Consultando {model_id} para {context_source}: {len(outcomes)} resultado(s)")
        responses = self._query(label, [build_prompt(o) for o in outcomes], model_id)

        answers = {}
        for outcome, response in zip(outcomes, responses):
            if response.parsed is None:
                raise PipelineError(label, "", ResponseParseError(
                    f"resposta não interpretável para {outcome.value}: {response.raw_text[:80]!r}"))
            answers[outcome] = response.parsed
        return [r.with_distribution(context_source, answers[r.outcome], replace=True) for r in records]

    def prepare(self, corpus):
        """
        Completa as fontes de contexto obteníveis pelo LLM e valida a grade contra o corpus.

        Returns:
            list: Corpus pronto para run_grid
        """
        if not corpus:
            raise EmptyCorpusError("Corpus vazio")
        records = sort_corpus(corpus)
        contexts = []
        for entry in self.manifest.grid:
            if entry.context is not None and entry.context not in contexts:
                contexts.append(entry.context)
        for context in contexts:
            if _is_obtainable(context) and not all(r.has(context) for r in records):
                records = self.record_context(records, context)

        for entry in self.manifest.grid:
            needed = [entry.face] + ([entry.context] if entry.context is not None else [])
            if entry.integration is Integration.NNI:
                needed.append(self.manifest.truth_source)
            for record in records:
                for source in needed:
                    if not record.has(source):
                        raise PipelineError(entry.label, record.clip_id,
                                            MissingSourceError(record.clip_id, source))
        return records

    def run_entry(self, corpus, entry, prior):
        """
        Executa uma entrada da grade.

        Returns:
            list: (clip_id, distribuição fundida), na ordem do corpus
        """
        target = entry.output_source
        try:
            if entry.integration is Integration.BCI:
                fused = fuse_corpus(corpus, entry.face, entry.context, prior, target=target)
            elif entry.integration is Integration.NNI:
                config = TrainConfig(
                    epochs=self.manifest.nni_epochs,
                    folds=self.manifest.nni_folds,
                    seed=derive_seed(self.manifest.seed, f"nni:{entry.label}"),
                )
                fused, _ = nni_fuse_corpus(corpus, entry.face, entry.context, self.manifest.truth_source, config)
            else:
                return self._run_llm_entry(corpus, entry)
        except PipelineError:
            raise
        except EmotionIntegrationError as e:
            raise PipelineError(entry.label, getattr(e, "clip_id", ""), e) from e
        return [(r.clip_id, r.get(target)) for r in fused]

    def _run_llm_entry(self, corpus, entry):
        bundles = [build_prompt(r.outcome, r.get(entry.face), face_model=entry.face.code) for r in corpus]
        responses = self._query(entry.label, bundles, self.manifest.model_id)
        results = []
        for record, response in zip(corpus, responses):
            if response.parsed is None:
                raise PipelineError(entry.label, record.clip_id, ResponseParseError(
                    f"resposta não interpretável: {response.raw_text[:80]!r}"))
            results.append((record.clip_id, response.parsed))
        return results

    def run_grid(self, corpus, jobs=None):
        """
        Executa todas as entradas da grade (em paralelo até jobs) e funde os
        resultados no corpus na ordem da grade.

        Returns:
            list: Corpus com uma fonte fundida por entrada
        """
        jobs = jobs or self.manifest.jobs
        records = self.prepare(corpus)
        prior = self.prior(records)
        entries = list(self.manifest.grid)
        logger.info(f"Executando {len(entries)} entrada(s) da grade com jobs={jobs}")

        if jobs > 1 and len(entries) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as executor:
                outputs = list(executor.map(lambda e: self.run_entry(records, e, prior), entries))
        else:
            outputs = [self.run_entry(records, e, prior) for e in entries]

        by_id = {r.clip_id: r for r in records}
        for entry, results in zip(entries, outputs):
            for clip_id, dist in results:
                by_id[clip_id] = by_id[clip_id].with_distribution(entry.output_source, dist, replace=True)
            logger.info(f"Entrada {entry.label} concluída -> {entry.output_source}")
        return sort_corpus(by_id.values())


def run_fuse(manifest, jobs=None, handler=None):
    """Carrega o corpus do manifesto, executa a grade e grava o corpus fundido."""
    if not manifest.corpus:
        raise ConfigError("Nenhum corpus informado (manifesto ou --corpus)")
    corpus = load_corpus(manifest.corpus)
    handler = handler or EmotionPipelineHandler(manifest)
    try:
        fused = handler.run_grid(corpus, jobs) if manifest.grid else corpus
    finally:
        handler.close()
    os.makedirs(manifest.output_dir, exist_ok=True)
    save_corpus(fused, manifest.fused_corpus_path)
    return manifest.fused_corpus_path


def _truth_for(pred, truth_source, face_truth):
    if face_truth is not None and pred != face_truth and ROLE_FUSED not in pred.kind.roles \
            and ROLE_FACE in pred.kind.roles:
        return face_truth
    return truth_source


def _face_baseline(pred, corpus_sources):
    if pred.kind.roles != {ROLE_FUSED} or not pred.detail:
        return None
    try:
        face = SourceId.parse(pred.detail.split("+")[0])
    except ValidationError:
        return None
    return face if face in corpus_sources and ROLE_FACE in face.kind.roles else None


def write_evaluation(corpus, truth_source, pred_sources, output_dir, face_truth=None):
    """
    Avalia cada fonte prevista e grava todos os relatórios.

    Gera summary (CSV + Markdown), a quebra por resultado de cada métrica,
    um relatório e uma matriz de confusão por método, as distribuições médias
    por resultado e, quando a fonte facial de um método fundido está no
    corpus, os ganhos da integração.

    Returns:
        list: Caminhos dos arquivos gerados
    """
    if not corpus:
        raise EmptyCorpusError("Corpus vazio")
    if not pred_sources:
        raise ConfigError("Nenhuma fonte prevista para avaliar")
    corpus_sources = sources_in(corpus)
    for source in [truth_source] + list(pred_sources):
        if source not in corpus_sources:
            raise MissingSourceError(corpus[0].clip_id, source)

    named, matrices, deltas = [], [], []
    for pred in pred_sources:
        truth = _truth_for(pred, truth_source, face_truth)
        report, matrix = evaluate(corpus, truth, pred)
        label = rpt.method_label(pred)
        named.append((label, report))
        matrices.append((pred, matrix))
        baseline = _face_baseline(pred, corpus_sources)
        if baseline is not None:
            face_report, _ = evaluate(corpus, truth, baseline)
            deltas.append((label, improvement_delta(face_report, report)))

    paths = []
    paths += rpt.write_frame(rpt.summary_frame(named), output_dir, "summary", markdown=True)
    for metric in rpt.METRICS:
        frame = rpt.breakdown_frame(named, metric)
        paths += rpt.write_frame(frame, output_dir, f"{rpt.METRIC_TITLES[metric].lower()}_by_outcome", markdown=True)
    methods_dir = os.path.join(output_dir, "methods")
    confusion_dir = os.path.join(output_dir, "confusion")
    for (pred, matrix), (_, report) in zip(matrices, named):
        paths += rpt.write_frame(rpt.report_frame(report), methods_dir, rpt.slug(pred), markdown=True)
        paths += rpt.write_frame(rpt.confusion_frame(matrix), confusion_dir, rpt.slug(pred))
    if deltas:
        paths += rpt.write_frame(rpt.delta_frame(deltas), output_dir, "improvement_deltas")
    shown = [s for s in [truth_source] + list(pred_sources) if s in corpus_sources]
    paths += rpt.write_frame(rpt.distribution_frame(corpus, list(dict.fromkeys(shown))),
                             output_dir, "distributions")
    logger.info(f"Avaliação concluída: {len(named)} método(s), {len(paths)} arquivo(s) em {output_dir}")
    return paths


def train_and_report(corpus, face_source, context_source, truth_source, config, output_dir, jobs=1):
    """
    Treina o NNI no corpus inteiro e mede a validação cruzada.

    Returns:
        list: Caminhos do arquivo de parâmetros e do relatório por fold
    """
    dataset = dataset_from_corpus(corpus, face_source, context_source, truth_source)
    fold_reports = cross_validate(dataset, config, jobs)
    result = train(dataset, config)

    os.makedirs(output_dir, exist_ok=True)
    params_path = os.path.join(output_dir, "nni_params.json")
    save_params(result.params, params_path)

    rows = [(str(fold), report) for fold, report in fold_reports]
    mean = MetricReport(
        overall=_mean_triple([report.overall for _, report in fold_reports]),
        by_outcome={},
        n_items=sum(report.n_items for _, report in fold_reports),
        n_by_outcome={},
    )
    rows.append(("mean", mean))
    frame = rpt.summary_frame(rows).rename(columns={"method": "fold"})
    frame.insert(1, "n", [report.n_items for _, report in rows])
    paths = [params_path] + rpt.write_frame(frame, output_dir, "nni_cv_report", markdown=True)
    logger.info(f"NNI: KLD médio fora do fold {mean.overall.kld:.4f}")
    return paths


def _mean_triple(triples):
    return MetricTriple(
        kld=math.fsum(t.kld for t in triples) / len(triples),
        rmse=math.fsum(t.rmse for t in triples) / len(triples),
        f1_weighted=math.fsum(t.f1_weighted for t in triples) / len(triples),
    )
