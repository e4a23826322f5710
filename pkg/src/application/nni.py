#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Integração por rede neural (NNI).

Uma camada densa de 100 neurônios ReLU seguida de saída softmax recebe
[P(e|f); P(e|c)] (14 valores, face primeiro) e é treinada com Adam em lote
completo para minimizar a divergência KL até P(e|c,f).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_softmax, rel_entr, softmax, xlogy
from sklearn.model_selection import KFold, StratifiedKFold

from src.config import (
    NNI_ADAM_BETA1, NNI_ADAM_BETA2, NNI_ADAM_EPS, NNI_EPOCHS, NNI_FOLDS, NNI_HIDDEN_UNITS,
    NNI_LEARNING_RATE, NNI_PARAMS_FORMAT, NNI_PARAMS_VERSION, NNI_SEED, SMOOTHING_EPSILON,
)
from src.core.emotions import (
    N_EMOTIONS, ROLE_CONTEXT, ROLE_FACE, ROLE_TRUTH, ClipRecord, EmotionDistribution, SourceId,
    SourceKind, argmax_label, sort_corpus,
)
from src.core.exceptions import (
    ConfigError, DatasetTooSmallError, DivergedTrainingError, EmptyDatasetError,
    NonFiniteActivationError, ValidationError,
)
from src.application.metrics import MetricReport, MetricTriple, evaluate, f1_weighted, kld, rmse
from src.utils.data_converter import EmotionDataConverter

logger = logging.getLogger(__name__)

N_INPUTS = 2 * N_EMOTIONS
PARAM_NAMES = ("w1", "b1", "w2", "b2")
PARAM_SHAPES = {
    "w1": (N_INPUTS, NNI_HIDDEN_UNITS),
    "b1": (NNI_HIDDEN_UNITS,),
    "w2": (NNI_HIDDEN_UNITS, N_EMOTIONS),
    "b2": (N_EMOTIONS,),
}

_TRUTH = SourceId(SourceKind.HUMAN_CONTEXT_BASED)
_PRED = SourceId(SourceKind.FUSED_NNI)


@dataclass(frozen=True, eq=False)
class MlpParams:
    """Pesos do integrador; as formas são fixas."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = np.array(getattr(self, name), dtype=np.float64)
            if value.shape != PARAM_SHAPES[name]:
                raise ValidationError(f"{name} com forma {value.shape}, esperado {PARAM_SHAPES[name]}")
            if not np.all(np.isfinite(value)):
                raise ValidationError(f"{name} contém valores não finitos")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def as_dict(self):
        return {name: getattr(self, name) for name in PARAM_NAMES}

    @classmethod
    def zeros(cls):
        return cls(**{name: np.zeros(shape) for name, shape in PARAM_SHAPES.items()})

    @classmethod
    def initialize(cls, seed):
        """He-uniforme na camada oculta, Xavier-uniforme na saída, vieses zerados."""
        rng = np.random.default_rng(seed)
        hidden_limit = math.sqrt(6.0 / N_INPUTS)
        output_limit = math.sqrt(6.0 / (NNI_HIDDEN_UNITS + N_EMOTIONS))
        return cls(
            w1=rng.uniform(-hidden_limit, hidden_limit, PARAM_SHAPES["w1"]),
            b1=np.zeros(PARAM_SHAPES["b1"]),
            w2=rng.uniform(-output_limit, output_limit, PARAM_SHAPES["w2"]),
            b2=np.zeros(PARAM_SHAPES["b2"]),
        )


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = NNI_EPOCHS
    learning_rate: float = NNI_LEARNING_RATE
    adam_beta1: float = NNI_ADAM_BETA1
    adam_beta2: float = NNI_ADAM_BETA2
    adam_eps: float = NNI_ADAM_EPS
    folds: int = NNI_FOLDS
    seed: int = NNI_SEED
    stratify: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs deve ser >= 1 (recebido {self.epochs})")
        if self.folds < 2:
            raise ConfigError(f"folds deve ser >= 2 (recebido {self.folds})")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate deve ser > 0 (recebido {self.learning_rate})")
        if self.seed < 0:
            raise ConfigError("seed deve ser um inteiro sem sinal")


@dataclass(frozen=True)
class NniSample:
    """Um exemplo de treino: pistas de entrada e distribuição alvo."""

    face: EmotionDistribution
    context: EmotionDistribution
    target: EmotionDistribution
    outcome: object = None
    clip_id: str = ""


@dataclass(frozen=True, eq=False)
class TrainResult:
    params: MlpParams
    loss_history: list = field(default_factory=list)


def _design_matrix(samples):
    x = np.array([s.face.probs + s.context.probs for s in samples], dtype=np.float64)
    t = np.array([s.target.probs for s in samples], dtype=np.float64)
    return x, t


def _forward_batch(params, x):
    z1 = x @ params.w1 + params.b1
    h = np.maximum(z1, 0.0)
    z2 = h @ params.w2 + params.b2
    return z1, h, z2


def forward(params, face, context):
    """
    Propagação direta de um único par de pistas.

    Returns:
        EmotionDistribution: softmax(relu(x w1 + b1) w2 + b2)
    """
    x = np.array([face.probs + context.probs], dtype=np.float64)
    _, _, z2 = _forward_batch(params, x)
    y = softmax(z2, axis=1)[0]
    if not np.all(np.isfinite(y)):
        raise NonFiniteActivationError("Ativação não finita; pesos provavelmente explodiram")
    # softmax pode zerar componentes com logits extremos; o KLD exige todas > 0
    y = np.maximum(y, SMOOTHING_EPSILON)
    return EmotionDistribution(tuple((y / y.sum()).tolist()))


def kl_loss(target, output):
    """KL(target || output) em nats."""
    return max(math.fsum(rel_entr(target.as_array(), output.as_array()).tolist()), 0.0)


def loss_and_gradients(params, x, t):
    """
    KL médio do lote e gradientes analíticos de cada parâmetro.

    Args:
        params (MlpParams): Pesos atuais
        x (numpy.ndarray): Entradas (n, 14)
        t (numpy.ndarray): Alvos (n, 7)

    Returns:
        tuple: (perda, dict nome -> gradiente)
    """
    n = x.shape[0]
    z1, h, z2 = _forward_batch(params, x)
    log_y = log_softmax(z2, axis=1)
    loss = float(np.sum(xlogy(t, t) - t * log_y) / n)

    # d(KL)/dz2 = y * sum(t) - t; sum(t) = 1 a menos de arredondamento
    g2 = (np.exp(log_y) * t.sum(axis=1, keepdims=True) - t) / n
    grad_h = g2 @ params.w2.T
    g1 = grad_h * (z1 > 0.0)
    grads = {
        "w1": x.T @ g1,
        "b1": g1.sum(axis=0),
        "w2": h.T @ g2,
        "b2": g2.sum(axis=0),
    }
    return loss, grads


def train(dataset, config=None):
    """
    Treina o integrador com Adam em lote completo.

    Args:
        dataset (list): Lista de NniSample
        config (TrainConfig): Hiperparâmetros

    Returns:
        TrainResult: Pesos finais e perda média por época
    """
    config = config or TrainConfig()
    if not dataset:
        raise EmptyDatasetError("Conjunto de treino vazio")
    x, t = _design_matrix(dataset)

    weights = {name: np.array(value) for name, value in MlpParams.initialize(config.seed).as_dict().items()}
    first_moment = {name: np.zeros_like(value) for name, value in weights.items()}
    second_moment = {name: np.zeros_like(value) for name, value in weights.items()}
    history = []

    logger.info(f"Treinando NNI: {len(dataset)} exemplo(s), {config.epochs} época(s), lr={config.learning_rate}")
    for step in range(1, config.epochs + 1):
        try:
            params = MlpParams(**weights)
        except ValidationError as e:
            logger.error(f"Pesos não finitos na época {step}")
            raise DivergedTrainingError(f"Pesos não finitos na época {step}: {e}") from e
        loss, grads = loss_and_gradients(params, x, t)
        if not math.isfinite(loss):
            logger.error(f"Perda não finita na época {step}")
            raise DivergedTrainingError(f"Perda não finita na época {step}")
        history.append(loss)

        correction1 = 1.0 - config.adam_beta1 ** step
        correction2 = 1.0 - config.adam_beta2 ** step
        for name in PARAM_NAMES:
            g = grads[name]
            first_moment[name] = config.adam_beta1 * first_moment[name] + (1.0 - config.adam_beta1) * g
            second_moment[name] = config.adam_beta2 * second_moment[name] + (1.0 - config.adam_beta2) * g * g
            m_hat = first_moment[name] / correction1
            v_hat = second_moment[name] / correction2
            weights[name] = weights[name] - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)

        if step % 200 == 0:
            logger.debug(f"Época {step}: perda média {loss:.6f}")

    try:
        params = MlpParams(**weights)
    except ValidationError as e:
        raise DivergedTrainingError(str(e)) from e
    logger.info(f"Treino concluído: perda inicial {history[0]:.4f}, final {history[-1]:.4f}")
    return TrainResult(params, history)


def predict(params, samples):
    return [forward(params, s.face, s.context) for s in samples]


def fold_assignment(dataset, config):
    """
    Índices de teste de cada fold: embaralhamento determinado pela seed e
    divisão contígua (opcionalmente estratificada pelo resultado do jogo).
    """
    if len(dataset) < config.folds:
        raise DatasetTooSmallError(
            f"{len(dataset)} exemplo(s) para {config.folds} folds")
    indices = np.arange(len(dataset))
    if config.stratify:
        outcomes = [str(s.outcome) for s in dataset]
        splitter = StratifiedKFold(n_splits=config.folds, shuffle=True, random_state=config.seed)
        return [test for _, test in splitter.split(indices, outcomes)]
    splitter = KFold(n_splits=config.folds, shuffle=True, random_state=config.seed)
    return [test for _, test in splitter.split(indices)]


def _has_outcomes(dataset, config):
    """
    Confere, antes de treinar, se os exemplos trazem o resultado do jogo: todos
    ou nenhum. Sem resultados o relatório de cada fold fica só com o geral.
    """
    missing = sum(1 for s in dataset if s.outcome is None)
    if missing and config.stratify:
        raise ValidationError("Folds estratificados exigem o resultado do jogo de cada exemplo")
    if 0 < missing < len(dataset):
        raise ValidationError(
            f"{missing} de {len(dataset)} exemplo(s) sem resultado do jogo; informe todos ou nenhum")
    return missing == 0


def _as_records(samples, predictions):
    return [
        ClipRecord(
            sample.clip_id or f"item-{index:05d}",
            sample.outcome,
            {_TRUTH: sample.target, _PRED: pred},
        )
        for index, (sample, pred) in enumerate(zip(samples, predictions))
    ]


def _fold_report(samples, predictions, with_outcomes):
    if with_outcomes:
        report, _ = evaluate(_as_records(samples, predictions), _TRUTH, _PRED)
        return report
    targets = [s.target for s in samples]
    overall = MetricTriple(
        kld=math.fsum(kld(t, p) for t, p in zip(targets, predictions)) / len(targets),
        rmse=math.fsum(rmse(t, p) for t, p in zip(targets, predictions)) / len(targets),
        f1_weighted=f1_weighted([argmax_label(t) for t in targets], [argmax_label(p) for p in predictions]),
    )
    return MetricReport(overall=overall, n_items=len(targets))


def cross_validate_predictions(dataset, config=None, jobs=1):
    """
    Validação cruzada com previsões fora do fold.

    Returns:
        tuple: (lista de (fold, MetricReport), lista de previsões alinhada ao dataset)
    """
    config = config or TrainConfig()
    with_outcomes = _has_outcomes(dataset, config)
    folds = fold_assignment(dataset, config)
    held_out_sets = [set(test.tolist()) for test in folds]

    def run_fold(fold_index):
        test = folds[fold_index]
        train_set = [s for i, s in enumerate(dataset) if i not in held_out_sets[fold_index]]
        result = train(train_set, config)
        held_out = [dataset[i] for i in test]
        return result, held_out, predict(result.params, held_out)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            outputs = list(executor.map(run_fold, range(len(folds))))
    else:
        outputs = [run_fold(i) for i in range(len(folds))]

    reports = []
    predictions = [None] * len(dataset)
    for fold_index, (result, held_out, preds) in enumerate(outputs):
        report = _fold_report(held_out, preds, with_outcomes)
        reports.append((fold_index, report))
        for i, pred in zip(folds[fold_index], preds):
            predictions[int(i)] = pred
        logger.info(f"Fold {fold_index}: KLD={report.overall.kld:.4f} RMSE={report.overall.rmse:.4f}")
    return reports, predictions


def cross_validate(dataset, config=None, jobs=1):
    """Relatório de métricas de cada fold (treina no restante, avalia no fold)."""
    reports, _ = cross_validate_predictions(dataset, config, jobs)
    return reports


def dataset_from_corpus(corpus, face_source, context_source, truth_source):
    """Monta exemplos de treino a partir das fontes de um corpus."""
    face_source.check_role(ROLE_FACE)
    context_source.check_role(ROLE_CONTEXT)
    truth_source.check_role(ROLE_TRUTH)
    return [
        NniSample(
            face=record.get(face_source),
            context=record.get(context_source),
            target=record.get(truth_source),
            outcome=record.outcome,
            clip_id=record.clip_id,
        )
        for record in sort_corpus(corpus)
    ]


def nni_source_id(face_source, context_source):
    return SourceId(SourceKind.FUSED_NNI, f"{face_source.code}+{context_source.code}")


def nni_fuse_corpus(corpus, face_source, context_source, truth_source, config=None, jobs=1):
    """
    Adiciona a cada clipe a previsão NNI do modelo do fold que não o viu.

    Returns:
        tuple: (novos ClipRecord, relatórios por fold)
    """
    records = sort_corpus(corpus)
    dataset = dataset_from_corpus(records, face_source, context_source, truth_source)
    reports, predictions = cross_validate_predictions(dataset, config, jobs)
    target = nni_source_id(face_source, context_source)
    fused = [r.with_distribution(target, p, replace=True) for r, p in zip(records, predictions)]
    return fused, reports


def save_params(params, path):
    text = EmotionDataConverter.arrays_to_json(params.as_dict(), NNI_PARAMS_FORMAT, NNI_PARAMS_VERSION)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    logger.info(f"Parâmetros NNI salvos em {path}")


def load_params(path):
    with open(path, encoding="utf-8") as handle:
        arrays = EmotionDataConverter.json_to_arrays(handle.read(), NNI_PARAMS_FORMAT, NNI_PARAMS_VERSION)
    return MlpParams(**{name: arrays[name] for name in PARAM_NAMES})
