"""Desarrollo de multiconmutadores [V_r, [V_{r−1}, … [V_1, A]…]] en productos ordenados.

Cada nivel k aporta V_k por la izquierda (+) o por la derecha (−). En el
producto final los factores izquierdos quedan en k decreciente y los derechos
en k creciente:
    (Π_{k∈izq, decreciente} V_k) · A · (Π_{k∈der, creciente} V_k),  signo (−1)^{|der|}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np
from django.conf import settings

from apps.base.excepciones import ErrorDimension

logger = logging.getLogger(__name__)

IZQUIERDA = "L"
DERECHA = "R"


@dataclass(frozen=True)
class PlantillaConmutador:
    sign: int
    izquierda: tuple[int, ...]
    derecha: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.izquierda) + len(self.derecha)

    def instanciar(self, tupla: Sequence[int]) -> "CommutatorTerm":
        """Asigna la partícula j_k a cada nivel; el tiempo del nivel k es t_k."""
        if len(tupla) != self.r:
            raise ErrorDimension(f"La plantilla tiene {self.r} niveles, la tupla {len(tupla)}")
        return CommutatorTerm(
            self.sign,
            tuple((int(tupla[k - 1]), k) for k in self.izquierda),
            tuple((int(tupla[k - 1]), k) for k in self.derecha),
        )


@dataclass(frozen=True)
class CommutatorTerm:
    """Término con signo: (Π izquierda)·A(t)·(Π derecha), etiquetas (j, k)
    con j la partícula y k el índice del tiempo t_k."""

    sign: int
    left_ops: tuple[tuple[int, int], ...]
    right_ops: tuple[tuple[int, int], ...]

    @property
    def r(self) -> int:
        return len(self.left_ops) + len(self.right_ops)

    def particulas(self) -> set[int]:
        return {j for j, _ in self.left_ops + self.right_ops}


def expand_multicommutator(r: int) -> tuple[PlantillaConmutador, ...]:
    """Las 2^r plantillas del multiconmutador de orden r."""
    tope = int(getattr(settings, "MFD_R_MAXIMO", 8))
    if r < 1:
        raise ValueError("El orden del multiconmutador debe ser ≥ 1")
    if r > tope:
        raise ValueError(f"Orden r={r} por encima del tope configurado ({tope})")
    return _plantillas(r)


@lru_cache(maxsize=None)
def _plantillas(r: int) -> tuple[PlantillaConmutador, ...]:
    plantillas = []
    for lados in product((IZQUIERDA, DERECHA), repeat=r):
        derecha = tuple(k for k in range(1, r + 1) if lados[k - 1] == DERECHA)
        izquierda = tuple(k for k in range(r, 0, -1) if lados[k - 1] == IZQUIERDA)
        plantillas.append(PlantillaConmutador((-1) ** len(derecha), izquierda, derecha))
    logger.debug("Multiconmutador r=%s desarrollado en %s plantillas", r, len(plantillas))
    return tuple(plantillas)


def evaluar_plantillas(plantillas, operadores: Sequence[np.ndarray], A: np.ndarray) -> np.ndarray:
    """Suma de productos ordenados con matrices V_1..V_r explícitas."""
    total = np.zeros_like(np.asarray(A, dtype=complex))
    for plantilla in plantillas:
        termino = np.asarray(A, dtype=complex)
        for k in reversed(plantilla.izquierda):
            termino = operadores[k - 1] @ termino
        for k in plantilla.derecha:
            termino = termino @ operadores[k - 1]
        total = total + plantilla.sign * termino
    return total


def conmutador_anidado(operadores: Sequence[np.ndarray], A: np.ndarray) -> np.ndarray:
    """[V_r, [V_{r−1}, … [V_1, A]…]] evaluado nivel a nivel."""
    resultado = np.asarray(A, dtype=complex)
    for V in operadores:
        resultado = V @ resultado - resultado @ V
    return resultado
