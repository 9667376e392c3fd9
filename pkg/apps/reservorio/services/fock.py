"""Modos bosónicos truncados: operadores de campo, número, Weyl y estados.

Convención de fase (única en todo el proyecto):
    φ(f) = (conj(f)·a + f·a†)/√2,   W(f) = e^{iφ(f)},
de modo que W(f)† a W(f) = a + i f/√2 y el vacío cumple ⟨φ(f)²⟩ = |f|²/2.
El estado coherente con a|ψ⟩ = α|ψ⟩ es W(−i√2 α)|0⟩.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import isfinite
from typing import Sequence

import numpy as np
import scipy.linalg as la
from django.conf import settings

from apps.base.excepciones import ErrorDimension, ErrorTruncamiento
from apps.base.services.operadores import OperatorMatrix, embed, partial_trace

logger = logging.getLogger(__name__)

TOL_WEYL = 1e-8


@dataclass(frozen=True)
class FockMode:
    cutoff: int
    frequency: float = 0.0

    def __post_init__(self):
        if int(self.cutoff) < 1:
            raise ErrorDimension("El corte de Fock debe ser ≥ 1")
        if not isfinite(self.frequency) or self.frequency < 0:
            raise ValueError("La frecuencia del modo debe ser finita y ≥ 0")

    @property
    def dim(self) -> int:
        return int(self.cutoff) + 1


@dataclass(frozen=True)
class OperadoresFock:
    a: OperatorMatrix
    a_dag: OperatorMatrix
    phi: OperatorMatrix
    numero: OperatorMatrix
    hamiltoniano: OperatorMatrix


def _aniquilacion(mode: FockMode) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, mode.dim)), k=1).astype(complex)


def fock_operators(mode: FockMode) -> OperadoresFock:
    a = _aniquilacion(mode)
    dims = (mode.dim,)
    numero = np.diag(np.arange(mode.dim)).astype(complex)
    return OperadoresFock(
        a=OperatorMatrix(dims, a),
        a_dag=OperatorMatrix(dims, a.conj().T),
        phi=OperatorMatrix(dims, (a + a.conj().T) / np.sqrt(2.0), hermitian=True),
        numero=OperatorMatrix(dims, numero, hermitian=True),
        hamiltoniano=OperatorMatrix(dims, mode.frequency * numero, hermitian=True),
    )


def campo(mode: FockMode, f: complex) -> OperatorMatrix:
    """φ(f) sobre un solo modo."""
    a = _aniquilacion(mode)
    return OperatorMatrix(
        (mode.dim,), (np.conj(f) * a + f * a.conj().T) / np.sqrt(2.0), hermitian=True
    )


def weyl(mode: FockMode, f: complex) -> OperatorMatrix:
    """W(f) = e^{iφ(f)} por diagonalización de φ(f).

    Falla si W(f)|0⟩ deja más de 1e−8 de población en los dos niveles
    superiores: ahí domina el truncamiento."""
    if f == 0:
        return OperatorMatrix.identidad((mode.dim,))
    valores, vectores = la.eigh(campo(mode, f).entries)
    W = (vectores * np.exp(1j * valores)) @ vectores.conj().T
    desplazado = W[:, 0]
    poblacion = float(np.sum(np.abs(desplazado[-2:]) ** 2))
    if poblacion > TOL_WEYL:
        raise ErrorTruncamiento(
            f"W({f}) con corte {mode.cutoff}: población superior {poblacion:.2e}"
        )
    return OperatorMatrix((mode.dim,), W)


def estado_vacio(mode: FockMode) -> OperatorMatrix:
    rho = np.zeros((mode.dim, mode.dim), dtype=complex)
    rho[0, 0] = 1.0
    return OperatorMatrix((mode.dim,), rho, density=True)


def estado_gibbs(mode: FockMode, beta: float) -> OperatorMatrix:
    """Gibbs truncado ∝ e^{−βωn}; β = ∞ da el vacío."""
    if np.isinf(beta):
        return estado_vacio(mode)
    if beta <= 0:
        raise ValueError("β debe ser positivo")
    pesos = np.exp(-beta * mode.frequency * np.arange(mode.dim))
    return OperatorMatrix.de_arreglo(np.diag(pesos / pesos.sum()), density=True)


def estado_coherente(mode: FockMode, alpha: complex) -> OperatorMatrix:
    """|α⟩⟨α| como vacío desplazado: a|α⟩ = α|α⟩."""
    W = weyl(mode, -1j * np.sqrt(2.0) * alpha)
    psi = W.entries[:, 0]
    return OperatorMatrix((mode.dim,), np.outer(psi, psi.conj()), density=True)


def campo_multimodo(modos: Sequence[FockMode], amplitudes: Sequence[complex]) -> OperatorMatrix:
    """φ(f) = Σ_k φ_k(f_k) sobre el producto de modos."""
    dims = tuple(m.dim for m in modos)
    if len(amplitudes) != len(modos):
        raise ErrorDimension("Se espera una amplitud por modo")
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for k, (modo, f) in enumerate(zip(modos, amplitudes)):
        if f != 0:
            total += embed(campo(modo, f), k, dims).entries
    return OperatorMatrix(dims, total, hermitian=True)


def weyl_multimodo(modos: Sequence[FockMode], amplitudes: Sequence[complex]) -> OperatorMatrix:
    """W(f) = Π_k W_k(f_k): los modos conmutan."""
    entradas = np.ones((1, 1), dtype=complex)
    for modo, f in zip(modos, amplitudes):
        entradas = np.kron(entradas, weyl(modo, f).entries)
    return OperatorMatrix(tuple(m.dim for m in modos), entradas)


def numero_total(modos: Sequence[FockMode]) -> OperatorMatrix:
    dims = tuple(m.dim for m in modos)
    total = sum(embed(fock_operators(m).numero, k, dims).entries for k, m in enumerate(modos))
    return OperatorMatrix(dims, total, hermitian=True)


def hamiltoniano_libre(modos: Sequence[FockMode]) -> OperatorMatrix:
    dims = tuple(m.dim for m in modos)
    total = sum(embed(fock_operators(m).hamiltoniano, k, dims).entries for k, m in enumerate(modos))
    return OperatorMatrix(dims, total, hermitian=True)


def poblacion_superior(rho_modo: OperatorMatrix) -> float:
    """Población de los dos niveles de Fock más altos de un modo."""
    return float(np.real(np.diag(rho_modo.entries)[-2:]).sum())


def certificar_truncamiento(rho: OperatorMatrix, slots: Sequence[int], tolerancia=None) -> float:
    """Máxima población superior sobre los modos `slots` de una densidad;
    falla si supera la tolerancia (por defecto MFD_TOLERANCIA_TRUNCAMIENTO)."""
    if tolerancia is None:
        tolerancia = getattr(settings, "MFD_TOLERANCIA_TRUNCAMIENTO", 1e-6)
    peor = 0.0
    for slot in slots:
        peor = max(peor, poblacion_superior(partial_trace(rho, {slot})))
    if peor > tolerancia:
        raise ErrorTruncamiento(f"Población en los niveles superiores {peor:.2e} > {tolerancia:.1e}")
    return peor
