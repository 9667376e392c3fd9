"""Matrices con nombre que pueden citarse desde las configuraciones."""

import numpy as np
import scipy.linalg as la

from apps.base.excepciones import ErrorDimension
from apps.base.services.operadores import OperatorMatrix

# Base de espín: índice 0 = |↑⟩ (energía +ω₀/2 con h = ω₀σ_z/2), índice 1 = |↓⟩
_PAULI = {
    "identidad-2": np.eye(2),
    "pauli-x": np.array([[0, 1], [1, 0]]),
    "pauli-y": np.array([[0, -1j], [1j, 0]]),
    "pauli-z": np.array([[1, 0], [0, -1]]),
}
_NO_HERMITICAS = {
    "sigma-mas": np.array([[0, 1], [0, 0]]),
    "sigma-menos": np.array([[0, 0], [1, 0]]),
}

PRESETS = tuple(sorted(_PAULI) + sorted(_NO_HERMITICAS))


def matriz_preset(nombre: str) -> OperatorMatrix:
    if nombre in _PAULI:
        return OperatorMatrix.de_arreglo(_PAULI[nombre], hermitian=True)
    if nombre in _NO_HERMITICAS:
        return OperatorMatrix.de_arreglo(_NO_HERMITICAS[nombre])
    raise KeyError(f"Preset desconocido: {nombre}")


def hamiltoniano_espin(omega0: float) -> OperatorMatrix:
    """h = ω₀ σ_z / 2."""
    return OperatorMatrix.de_arreglo(0.5 * omega0 * _PAULI["pauli-z"], hermitian=True)


def estado_gibbs(h: OperatorMatrix, beta: float) -> OperatorMatrix:
    """ρ ∝ e^{−βh}, con β = ∞ permitido (proyector al fundamental)."""
    energias, vectores = la.eigh(h.entries)
    if np.isinf(beta):
        pesos = np.isclose(energias, energias[0]).astype(float)
    else:
        pesos = np.exp(-beta * (energias - energias[0]))
    pesos = pesos / pesos.sum()
    rho = (vectores * pesos) @ vectores.conj().T
    return OperatorMatrix(h.dims, rho, density=True)


def estado_mixto(dim: int) -> OperatorMatrix:
    return OperatorMatrix.de_arreglo(np.eye(dim) / dim, density=True)


def estado_diagonal(poblaciones) -> OperatorMatrix:
    """Densidad diagonal; para un espín, p|↑⟩⟨↑| + (1−p)|↓⟩⟨↓| es [p, 1−p]."""
    poblaciones = np.asarray(poblaciones, dtype=float)
    if np.any(poblaciones < 0):
        raise ErrorDimension("Poblaciones negativas")
    return OperatorMatrix.de_arreglo(np.diag(poblaciones / poblaciones.sum()), density=True)


def estado_puro(vector) -> OperatorMatrix:
    vector = np.asarray(vector, dtype=complex)
    vector = vector / np.linalg.norm(vector)
    return OperatorMatrix.de_arreglo(np.outer(vector, vector.conj()), density=True)


def tridiagonal(energias, saltos) -> tuple[OperatorMatrix, OperatorMatrix]:
    """h diagonal con niveles `energias` y G tridiagonal real con `saltos`
    en las diagonales vecinas (cumple la condición de momentos impares
    nulos con cualquier estado diagonal en la base de h)."""
    energias = np.asarray(energias, dtype=float)
    saltos = np.asarray(saltos, dtype=float)
    if saltos.size != energias.size - 1:
        raise ErrorDimension("Se esperan d−1 saltos para d niveles")
    h = OperatorMatrix.de_arreglo(np.diag(energias), hermitian=True)
    G = OperatorMatrix.de_arreglo(np.diag(saltos, 1) + np.diag(saltos, -1), hermitian=True)
    return h, G
