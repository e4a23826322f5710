#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Módulo principal: linha de comando do toolkit de integração de pistas emocionais.

Subcomandos: synth, fuse, evaluate, train-nni, prompt, llm-record.
"""

import argparse
import logging
import os
import sys

# Adiciona o diretório pai ao path para importar os módulos do projeto
# Isso é necessário quando executamos o script diretamente
if __name__ == "__main__":
    project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    if project_root not in sys.path:
        sys.path.insert(0, project_root)

from src.config import (
    EXIT_CACHE_MISS, EXIT_OK, EXIT_RUNTIME_ERROR, EXIT_VALIDATION_ERROR, FACE_MODEL_PHRASES,
    PROMPT_TEMPLATE_VERSION, SYNTH_CLIPS_PER_OUTCOME, SYNTH_CONCENTRATION, SYNTH_JOY_BIAS,
)
from src.core.emotions import GameOutcome, SourceId
from src.core.exceptions import (
    CacheMissError, ComputationError, EmotionIntegrationError, LlmError, PipelineError,
    ValidationError,
)
from src.communication.prompts import build_prompt
from src.communication.replay_cache import CacheMode
from src.application.nni import TrainConfig
from src.application.pipeline import (
    EmotionPipelineHandler, RunManifest, derive_seed, load_manifest, run_fuse, train_and_report,
    write_evaluation,
)
from src.ingest.corpus import load_corpus, save_corpus, save_corpus_json
from src.ingest.synthetic import SynthConfig, generate_synthetic
from src.utils import EmotionDataConverter, setup_logging

logger = logging.getLogger(__name__)


def build_parser():
    """Monta o parser com as flags globais e um subparser por comando."""
    parser = argparse.ArgumentParser(description="Integração de pistas faciais e de contexto em distribuições de emoção")
    parser.add_argument("--manifest", help="Manifesto TOML da execução")
    parser.add_argument("--jobs", type=int, help="Entradas da grade executadas em paralelo")
    parser.add_argument("--seed", type=int, help="Seed raiz (sobrepõe o manifesto)")
    parser.add_argument("--cache-mode", choices=[m.value for m in CacheMode], help="Modo do cache do LLM")
    parser.add_argument("--out-dir", help="Diretório de saída (sobrepõe o manifesto)")
    parser.add_argument("--log-level", default=None, help="Nível de log (DEBUG, INFO, ...)")
    parser.add_argument("--log-file", default=None, help="Arquivo de log; vazio desativa")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="Gera um corpus sintético")
    synth.add_argument("--clips-per-outcome", type=int, default=SYNTH_CLIPS_PER_OUTCOME)
    synth.add_argument("--concentration", type=float, default=SYNTH_CONCENTRATION)
    synth.add_argument("--joy-bias", type=float, default=SYNTH_JOY_BIAS)
    synth.add_argument("--no-recognizers", action="store_true", help="Apenas human_cf, gpt4_ctx e human_cb")
    synth.add_argument("--output", help="Arquivo CSV de saída; padrão <out-dir>/synthetic_corpus.csv")
    synth.add_argument("--json", action="store_true", help="Grava também o espelho JSON do corpus")

    fuse = commands.add_parser("fuse", help="Executa a grade de integração do manifesto")
    fuse.add_argument("--corpus", help="Corpus de entrada (sobrepõe o manifesto)")

    evaluate = commands.add_parser("evaluate", help="Avalia fontes previstas contra a verdade")
    evaluate.add_argument("--corpus", help="Corpus avaliado; padrão <out-dir>/fused_corpus.csv")
    evaluate.add_argument("--truth", help="Fonte de verdade; padrão a do manifesto")
    evaluate.add_argument("--face-truth", help="Verdade dos métodos só de face (ex.: human_cf)")
    evaluate.add_argument("pred_sources", nargs="*", help="Fontes previstas; padrão as saídas da grade")

    nni = commands.add_parser("train-nni", help="Treina o integrador neural com validação cruzada")
    nni.add_argument("--corpus", help="Corpus de treino (sobrepõe o manifesto)")
    nni.add_argument("--face", default="lstm")
    nni.add_argument("--context", default="gpt4_ctx")
    nni.add_argument("--truth", help="Fonte alvo; padrão a do manifesto")
    nni.add_argument("--epochs", type=int)
    nni.add_argument("--folds", type=int)
    nni.add_argument("--stratify", action="store_true", help="Folds estratificados pelo resultado")

    prompt = commands.add_parser("prompt", help="Imprime o prompt do LLM para inspeção")
    prompt.add_argument("outcome", help="Resultado da rodada: CC, DC, CD ou DD")
    prompt.add_argument("--face-file", help="JSON com a distribuição P(e|f)")
    prompt.add_argument("--face-model", default="lstm", choices=sorted(FACE_MODEL_PHRASES))
    prompt.add_argument("--template-version", default=PROMPT_TEMPLATE_VERSION)

    record = commands.add_parser("llm-record", help="Anexa ao corpus a pista de contexto consultada no LLM")
    record.add_argument("--corpus", help="Corpus de entrada (sobrepõe o manifesto)")
    record.add_argument("--context", default="gpt4_ctx", choices=["gpt4_ctx", "gpt3_ctx"])
    record.add_argument("--model-id", help="Modelo consultado; padrão o associado à fonte")
    record.add_argument("--output", help="Arquivo CSV de saída; padrão <out-dir>/context_corpus.csv")
    return parser


def resolve_manifest(args):
    """Manifesto do arquivo (ou padrão) com as flags globais aplicadas."""
    manifest = load_manifest(args.manifest) if args.manifest else RunManifest()
    return manifest.with_overrides(
        seed=args.seed,
        jobs=args.jobs,
        output_dir=args.out_dir,
        cache_mode=CacheMode.parse(args.cache_mode) if args.cache_mode else None,
        corpus=getattr(args, "corpus", None),
    )


def cmd_synth(args, manifest):
    seed = derive_seed(manifest.seed, "synth")
    config = SynthConfig(
        n_clips_per_outcome=args.clips_per_outcome,
        dirichlet_concentration=args.concentration,
        joy_bias=args.joy_bias,
        seed=seed,
        include_recognizers=not args.no_recognizers,
    )
    corpus = generate_synthetic(config)
    output = args.output or os.path.join(manifest.output_dir, "synthetic_corpus.csv")
    directory = os.path.dirname(output)
    if directory:
        os.makedirs(directory, exist_ok=True)
    save_corpus(corpus, output)
    if args.json:
        save_corpus_json(corpus, os.path.splitext(output)[0] + ".json")
    return EXIT_OK


def cmd_fuse(args, manifest):
    path = run_fuse(manifest, args.jobs)
    logger.info(f"Corpus fundido gravado em {path}")
    return EXIT_OK


def cmd_evaluate(args, manifest):
    corpus = load_corpus(args.corpus or manifest.fused_corpus_path)
    truth = SourceId.parse(args.truth) if args.truth else manifest.truth_source
    preds = [SourceId.parse(code) for code in args.pred_sources]
    if not preds:
        preds = [entry.output_source for entry in manifest.grid]
    face_truth = SourceId.parse(args.face_truth) if args.face_truth else None
    write_evaluation(corpus, truth, preds, manifest.output_dir, face_truth)
    return EXIT_OK


def cmd_train_nni(args, manifest):
    if not manifest.corpus:
        raise ValidationError("Nenhum corpus informado (manifesto ou --corpus)")
    config = TrainConfig(
        epochs=args.epochs or manifest.nni_epochs,
        folds=args.folds or manifest.nni_folds,
        seed=derive_seed(manifest.seed, "nni"),
        stratify=args.stratify,
    )
    corpus = load_corpus(manifest.corpus)
    truth = SourceId.parse(args.truth) if args.truth else manifest.truth_source
    train_and_report(corpus, SourceId.parse(args.face), SourceId.parse(args.context), truth, config,
                     manifest.output_dir, manifest.jobs)
    return EXIT_OK


def cmd_prompt(args, manifest):
    outcome = GameOutcome.parse(args.outcome)
    face = None
    if args.face_file:
        with open(args.face_file, encoding="utf-8") as handle:
            face = EmotionDataConverter.json_to_distribution(handle.read())
    bundle = build_prompt(outcome, face, face_model=args.face_model, template_version=args.template_version)
    print(bundle.text)
    return EXIT_OK


def cmd_llm_record(args, manifest):
    if not manifest.corpus:
        raise ValidationError("Nenhum corpus informado (manifesto ou --corpus)")
    corpus = load_corpus(manifest.corpus)
    handler = EmotionPipelineHandler(manifest)
    try:
        updated = handler.record_context(corpus, SourceId.parse(args.context), args.model_id)
    finally:
        handler.close()
    output = args.output or os.path.join(manifest.output_dir, "context_corpus.csv")
    directory = os.path.dirname(output)
    if directory:
        os.makedirs(directory, exist_ok=True)
    save_corpus(updated, output)
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "fuse": cmd_fuse,
    "evaluate": cmd_evaluate,
    "train-nni": cmd_train_nni,
    "prompt": cmd_prompt,
    "llm-record": cmd_llm_record,
}


def exit_code_for(error):
    """Código de saída estável para cada família de erro."""
    if isinstance(error, PipelineError):
        return exit_code_for(error.cause)
    if isinstance(error, CacheMissError):
        return EXIT_CACHE_MISS
    if isinstance(error, ValidationError):
        return EXIT_VALIDATION_ERROR
    return EXIT_RUNTIME_ERROR


def main(argv=None):
    """Função principal do programa."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_file)

    logger.info(f"Iniciando comando {args.command}")
    try:
        manifest = resolve_manifest(args)
        code = COMMANDS[args.command](args, manifest)
    except (ValidationError, ComputationError, LlmError, PipelineError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except EmotionIntegrationError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME_ERROR
    except OSError as e:
        logger.error(f"Erro de E/S: {e}")
        return EXIT_RUNTIME_ERROR
    except Exception as e:
        logger.exception(f"Erro durante a execução: {e}")
        return EXIT_RUNTIME_ERROR

    logger.info("Aplicação encerrada")
    return code


if __name__ == "__main__":
    sys.exit(main())
