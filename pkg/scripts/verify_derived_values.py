#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Recalcula, só com a biblioteca math, as constantes derivadas usadas nos testes:
KLD e RMSE de [0.4, 0.1 x 6] contra a uniforme e o exemplo resolvido da fusão BCI.

Uso: python scripts/verify_derived_values.py  (código de saída 1 se algo divergir)
"""

import logging
import math
import sys

logger = logging.getLogger(__name__)

EPSILON = 1e-6

CHECKS = []


def check(name, got, expected, tolerance):
    ok = all(abs(g - e) <= tolerance for g, e in zip(got, expected))
    CHECKS.append(ok)
    level = logging.INFO if ok else logging.ERROR
    logger.log(level, f"{name}: {[round(g, 6) for g in got]} (esperado {expected} ± {tolerance})")


def kld(truth, pred):
    return math.fsum(t * math.log(t / p) for t, p in zip(truth, pred) if t > 0.0)


def rmse(truth, pred):
    return math.sqrt(math.fsum((t - p) ** 2 for t, p in zip(truth, pred)) / len(truth))


def bci(face, context):
    scale = 1.0 + len(face) * EPSILON
    product = [((f + EPSILON) / scale) * ((c + EPSILON) / scale) for f, c in zip(face, context)]
    total = math.fsum(product)
    return [p / total for p in product]


def main():
    truth = [0.4] + [0.1] * 6
    uniform = [1.0 / 7] * 7
    check("kld", [kld(truth, uniform)], [0.197843], 1e-5)
    check("kld fechado", [kld(truth, uniform)], [0.4 * math.log(2.8) + 0.6 * math.log(0.7)], 1e-12)
    check("rmse", [rmse(truth, uniform)], [0.10498], 1e-5)
    check("kld one-hot x uniforme", [kld([1.0] + [0.0] * 6, uniform)], [1.945910], 1e-6)

    face = [0.6, 0.2, 0.1, 0.05, 0.02, 0.02, 0.01]
    context = [0.1, 0.1, 0.5, 0.1, 0.1, 0.05, 0.05]
    check("bci", bci(face, context), [0.4332, 0.1444, 0.3610, 0.0361, 0.0144, 0.0072, 0.0036], 1e-4)

    failed = CHECKS.count(False)
    if failed:
        logger.error(f"{failed} valor(es) divergente(s)")
        return 1
    logger.info(f"{len(CHECKS)} valor(es) conferido(s)")
    return 0


if __name__ == "__main__":
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    sys.exit(main())
