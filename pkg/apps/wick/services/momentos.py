"""Momentos de reservorio por el teorema de Wick.

Los emparejamientos se enumeran por recursión sobre el primer elemento,
(r−1)!! términos, con el par (i, j) evaluado en el orden original de los
operadores (i antes que j). Con medias no nulas (estados coherentes) cada
operador puede además quedar suelto y aportar su media.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from apps.reservorio.services.gaussiano import (
    EXCLUIDO,
    IDENTIDAD,
    CampoGaussiano,
    CorrelationFunction,
    FormaLineal,
    ObservableCampo,
)

logger = logging.getLogger(__name__)


def suma_emparejamientos(
    n: int,
    par: Callable[[int, int], np.ndarray],
    media: Optional[Callable[[int], np.ndarray]] = None,
):
    """Σ sobre emparejamientos (y singletes si hay medias) de Π par(i, j)·Π media(i)."""
    if n == 0:
        return 1.0
    if media is None and n % 2:
        return 0.0
    pares: dict = {}
    medias: dict = {}
    memo: dict = {}

    def _par(i, j):
        if (i, j) not in pares:
            pares[(i, j)] = par(i, j)
        return pares[(i, j)]

    def _media(i):
        if i not in medias:
            medias[i] = media(i)
        return medias[i]

    def recursion(restantes):
        if not restantes:
            return 1.0
        if media is None and len(restantes) % 2:
            return 0.0
        if restantes in memo:
            return memo[restantes]
        primero, resto = restantes[0], restantes[1:]
        total = _media(primero) * recursion(resto) if media is not None else 0.0
        for posicion, otro in enumerate(resto):
            total = total + _par(primero, otro) * recursion(resto[:posicion] + resto[posicion + 1:])
        memo[restantes] = total
        return total

    return recursion(tuple(range(n)))


def numero_emparejamientos(r: int) -> int:
    """r!/(2^{r/2}(r/2)!) para r par, 0 para r impar."""
    if r % 2:
        return 0
    total = 1
    for k in range(r - 1, 0, -2):
        total *= k
    return total


def momento_gaussiano(estado: CampoGaussiano, formas: Sequence[FormaLineal], forma=()):
    """μ(L₁ L₂ … L_n) en un estado cuasilibre, vectorizado sobre nodos."""
    media = None if estado.invariante_gauge else (lambda i: estado.media(formas[i]))
    valor = suma_emparejamientos(
        len(formas), lambda i, j: estado.conexo(formas[i], formas[j]), media
    )
    return np.zeros(forma, dtype=complex) + valor


def wick_moment(
    times,
    posicion: int,
    C: CorrelationFunction,
    A_r_spec: Optional[ObservableCampo] = None,
    t_obs: float = 0.0,
):
    """μ_r(B(t₁)…B(t_j) A_r(t_obs) B(t_{j+1})…B(t_r)) con A_r en la posición `posicion`.

    `times` puede ser (r,) o (m, r). Con identidad y una correlación sin
    campo asociado se usan directamente los valores C(t_i, t_j); en otro caso
    se trabaja con las formas lineales del campo (correlaciones cruzadas con
    los campos sondeados, medias coherentes).
    """
    A_r_spec = A_r_spec or ObservableCampo.identidad()
    if A_r_spec.tipo == EXCLUIDO:
        raise ValueError("El observable excluido solo entra en las cotas de β_r")
    tiempos = np.asarray(times, dtype=float)
    lote = tiempos.ndim == 2
    tiempos = np.atleast_2d(tiempos)
    r = tiempos.shape[1]
    if not 0 <= posicion <= r:
        raise ValueError(f"Posición de inserción {posicion} fuera de 0..{r}")
    forma = (tiempos.shape[0],)

    if C.estado is None:
        if A_r_spec.tipo != IDENTIDAD:
            raise ValueError("Una correlación sin campo asociado solo admite A_r = identidad")
        valor = suma_emparejamientos(r, lambda i, j: C(tiempos[:, i], tiempos[:, j]))
        resultado = np.zeros(forma, dtype=complex) + valor
        return resultado if lote else complex(resultado[0])

    acoplamientos = [C.forma_acoplamiento(tiempos[:, k]) for k in range(r)]
    resultado = np.zeros(forma, dtype=complex)
    for coeficiente, insertadas in A_r_spec.terminos(t_obs, C.estado.frecuencias):
        formas = acoplamientos[:posicion] + insertadas + acoplamientos[posicion:]
        resultado = resultado + coeficiente * momento_gaussiano(C.estado, formas, forma)
    return resultado if lote else complex(resultado[0])
