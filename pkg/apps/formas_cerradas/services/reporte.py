"""Reporte de una fórmula cerrada evaluada sobre una malla de tiempos."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import inf
from typing import Callable, Optional, Sequence

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClosedFormReport:
    """`ventana` es el t máximo en que vale el resto citado por la fórmula
    (inf si es exacta o uniforme en t)."""

    formula: str
    entradas: dict
    tiempos: tuple
    valores: np.ndarray = field(repr=False)
    ventana: float = inf

    def __post_init__(self):
        if not np.all(np.isfinite(self.valores)):
            raise ValueError(f"La fórmula {self.formula} dio valores no finitos")

    def filas(self):
        for t, valor in zip(self.tiempos, self.valores):
            yield t, complex(valor), t < self.ventana


def construir_reporte(
    formula: str,
    funcion: Callable[[float], complex],
    tiempos: Sequence[float],
    entradas: Optional[dict] = None,
    ventana: float = inf,
    hilos: Optional[int] = None,
) -> ClosedFormReport:
    """Evalúa `funcion` en cada t (en paralelo, en el orden de entrada)."""
    tiempos = tuple(float(t) for t in tiempos)
    hilos = hilos or int(getattr(settings, "MFD_HILOS", 1))
    if hilos > 1 and len(tiempos) > 1:
        with ThreadPoolExecutor(max_workers=hilos) as pool:
            valores = list(pool.map(funcion, tiempos))
    else:
        valores = [funcion(t) for t in tiempos]
    logger.debug("Fórmula %s evaluada en %s tiempos", formula, len(tiempos))
    return ClosedFormReport(formula, dict(entradas or {}), tiempos, np.asarray(valores, dtype=complex), ventana)
