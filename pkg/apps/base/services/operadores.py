"""Álgebra lineal densa sobre productos tensoriales pequeños.

Todas las matrices (hamiltonianos, observables, densidades) se representan
con `OperatorMatrix`: un arreglo complejo inmutable más la lista de
dimensiones de los factores. La evolución de Heisenberg usa la
descomposición espectral del hamiltoniano, calculada una sola vez por
hamiltoniano y compartida entre hilos.
"""

from __future__ import annotations

import logging
import threading
import weakref
from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np
import scipy.linalg as la

from apps.base.excepciones import ErrorDimension, ErrorHermiticidad

logger = logging.getLogger(__name__)

TOL_HERMITICA = 1e-12
TOL_TRAZA = 1e-12
TOL_POSITIVIDAD = 1e-10
TOL_UNITARIA = 1e-10


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Matriz compleja cuadrada con metadatos de factores tensoriales.

    `hermitian` y `density` se validan al construir; violarlos es un error.
    La tolerancia hermítica es relativa a la escala de la matriz (con piso 1)
    para que los hamiltonianos con entradas grandes no fallen por redondeo.
    """

    dims: tuple[int, ...]
    entries: np.ndarray = field(repr=False)
    hermitian: bool = False
    density: bool = False

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise ErrorDimension(f"Dimensiones no positivas: {dims}")
        total = prod(dims)
        entradas = np.array(self.entries, dtype=complex)
        if entradas.shape != (total, total):
            raise ErrorDimension(
                f"Se esperaban {total}x{total} entradas para dims {dims}, llegaron {entradas.shape}"
            )
        if self.hermitian or self.density:
            escala = max(1.0, float(np.max(np.abs(entradas))) if entradas.size else 1.0)
            desvio = float(np.max(np.abs(entradas - entradas.conj().T))) if entradas.size else 0.0
            if desvio > TOL_HERMITICA * escala:
                raise ErrorHermiticidad(f"Matriz marcada hermítica con |M − M†| = {desvio:.3e}")
            entradas = 0.5 * (entradas + entradas.conj().T)
        if self.density:
            traza = np.trace(entradas)
            if abs(traza - 1.0) > TOL_TRAZA:
                raise ErrorHermiticidad(f"Densidad con traza {traza:.15g}")
            minimo = float(np.linalg.eigvalsh(entradas)[0])
            if minimo < -TOL_POSITIVIDAD:
                raise ErrorHermiticidad(f"Densidad con autovalor mínimo {minimo:.3e}")
        entradas.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", entradas)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.dims, self.entries.conj().T, hermitian=self.hermitian)

    def __matmul__(self, otra: "OperatorMatrix") -> "OperatorMatrix":
        _mismas_dims(self, otra)
        return OperatorMatrix(self.dims, self.entries @ otra.entries)

    def __add__(self, otra: "OperatorMatrix") -> "OperatorMatrix":
        _mismas_dims(self, otra)
        return OperatorMatrix(
            self.dims, self.entries + otra.entries, hermitian=self.hermitian and otra.hermitian
        )

    def __sub__(self, otra: "OperatorMatrix") -> "OperatorMatrix":
        _mismas_dims(self, otra)
        return OperatorMatrix(
            self.dims, self.entries - otra.entries, hermitian=self.hermitian and otra.hermitian
        )

    def escalar(self, c: complex) -> "OperatorMatrix":
        real = np.isreal(c)
        return OperatorMatrix(self.dims, c * self.entries, hermitian=self.hermitian and bool(real))

    def conmutador(self, otra: "OperatorMatrix") -> "OperatorMatrix":
        _mismas_dims(self, otra)
        return OperatorMatrix(self.dims, self.entries @ otra.entries - otra.entries @ self.entries)

    def kron(self, otra: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(
            self.dims + otra.dims,
            np.kron(self.entries, otra.entries),
            hermitian=self.hermitian and otra.hermitian,
        )

    def traza(self) -> complex:
        return complex(np.trace(self.entries))

    def norma(self) -> float:
        """Norma de operador (mayor valor singular)."""
        if self.dim == 0:
            return 0.0
        return float(np.linalg.norm(self.entries, ord=2))

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    @classmethod
    def identidad(cls, dims: Sequence[int]) -> "OperatorMatrix":
        dims = tuple(dims)
        return cls(dims, np.eye(prod(dims)), hermitian=True)

    @classmethod
    def de_arreglo(cls, arreglo, dims=None, hermitian=False, density=False) -> "OperatorMatrix":
        arreglo = np.asarray(arreglo, dtype=complex)
        return cls(tuple(dims or (arreglo.shape[0],)), arreglo, hermitian=hermitian, density=density)


def _mismas_dims(a: OperatorMatrix, b: OperatorMatrix):
    if a.dims != b.dims:
        raise ErrorDimension(f"Dimensiones incompatibles: {a.dims} vs {b.dims}")


def embed_slots(op: OperatorMatrix, slots: Sequence[int], dims: Sequence[int]) -> OperatorMatrix:
    """Sumerge `op`, que actúa sobre los factores `slots` (en ese orden),
    en el espacio completo de dimensiones `dims`."""
    dims = tuple(int(d) for d in dims)
    slots = tuple(int(s) for s in slots)
    if len(set(slots)) != len(slots):
        raise ErrorDimension(f"Slots repetidos: {slots}")
    if any(s < 0 or s >= len(dims) for s in slots):
        raise ErrorDimension(f"Slot fuera de rango en {slots} para {len(dims)} factores")
    if tuple(dims[s] for s in slots) != tuple(op.dims):
        raise ErrorDimension(
            f"El operador tiene dims {op.dims} pero los slots {slots} tienen {[dims[s] for s in slots]}"
        )
    resto = [k for k in range(len(dims)) if k not in slots]
    orden = list(slots) + resto
    grande = np.kron(op.entries, np.eye(prod(dims[k] for k in resto)))
    if orden == list(range(len(dims))):
        return OperatorMatrix(dims, grande, hermitian=op.hermitian)
    n = len(dims)
    tensor = grande.reshape([dims[k] for k in orden] * 2)
    inversa = np.argsort(orden)
    permutacion = list(inversa) + [n + i for i in inversa]
    total = prod(dims)
    entradas = tensor.transpose(permutacion).reshape(total, total)
    return OperatorMatrix(dims, entradas, hermitian=op.hermitian)


def embed(op: OperatorMatrix, slot: int, dims: Sequence[int]) -> OperatorMatrix:
    """I⊗…⊗op⊗…⊗I con `op` en la posición `slot`."""
    if len(op.dims) != 1:
        raise ErrorDimension(f"embed espera un operador de un solo factor, llegó dims {op.dims}")
    return embed_slots(op, (slot,), dims)


class Propagador:
    """Descomposición espectral de un hamiltoniano, reutilizable en muchos t.

    H = V diag(E) V†; entonces e^{itH} A e^{−itH} = V (e^{it(E_m − E_n)} ∘ V†AV) V†.
    """

    def __init__(self, H: OperatorMatrix):
        if not H.hermitian:
            raise ErrorHermiticidad("El propagador requiere un hamiltoniano marcado hermítico")
        self.H = H
        try:
            energias, vectores = la.eigh(H.entries)
        except la.LinAlgError:
            logger.exception("Falló la diagonalización de un hamiltoniano %s", H.dims)
            raise
        desvio = float(np.max(np.abs(vectores.conj().T @ vectores - np.eye(H.dim)))) if H.dim else 0.0
        if desvio > TOL_UNITARIA:
            raise np.linalg.LinAlgError(f"Autovectores no ortonormales: desvío {desvio:.3e}")
        self.energias = energias
        self.vectores = vectores

    def _fases(self, t):
        return np.exp(1j * t * (self.energias[:, None] - self.energias[None, :]))

    def en_base_propia(self, A: OperatorMatrix) -> np.ndarray:
        return self.vectores.conj().T @ A.entries @ self.vectores

    def heisenberg(self, A: OperatorMatrix, t: float) -> OperatorMatrix:
        _mismas_dims(self.H, A)
        evolucionado = self.vectores @ (self._fases(t) * self.en_base_propia(A)) @ self.vectores.conj().T
        return OperatorMatrix(A.dims, evolucionado, hermitian=A.hermitian)

    def schrodinger(self, rho: OperatorMatrix, t: float) -> OperatorMatrix:
        """e^{−itH} ρ e^{itH}, la densidad evolucionada."""
        _mismas_dims(self.H, rho)
        evolucionada = self.vectores @ (self._fases(-t) * self.en_base_propia(rho)) @ self.vectores.conj().T
        return OperatorMatrix(rho.dims, evolucionada, hermitian=True)


_PROPAGADORES: "weakref.WeakKeyDictionary[OperatorMatrix, Propagador]" = weakref.WeakKeyDictionary()
_CANDADO = threading.Lock()


def propagador_para(H: OperatorMatrix) -> Propagador:
    """Propagador en caché por hamiltoniano (identidad del objeto)."""
    propagador = _PROPAGADORES.get(H)
    if propagador is None:
        with _CANDADO:
            propagador = _PROPAGADORES.get(H)
            if propagador is None:
                logger.debug("Diagonalizando hamiltoniano de dimensión %s", H.dim)
                propagador = Propagador(H)
                _PROPAGADORES[H] = propagador
    return propagador


def heisenberg(H: OperatorMatrix, A: OperatorMatrix, t: float) -> OperatorMatrix:
    """τ^t(A) = e^{itH} A e^{−itH}."""
    return propagador_para(H).heisenberg(A, t)


@dataclass(frozen=True, eq=False)
class ProductState:
    factors: tuple[OperatorMatrix, ...]

    def __post_init__(self):
        factores = tuple(self.factors)
        for k, factor in enumerate(factores):
            if not factor.density or len(factor.dims) != 1:
                raise ErrorDimension(f"El factor {k} no es una densidad de un solo factor")
        object.__setattr__(self, "factors", factores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dims[0] for f in self.factors)

    def densidad(self) -> OperatorMatrix:
        entradas = np.ones((1, 1), dtype=complex)
        for factor in self.factors:
            entradas = np.kron(entradas, factor.entries)
        return OperatorMatrix(self.dims, entradas, hermitian=True)


def expectation(state, A: OperatorMatrix) -> complex:
    """Tr(ρ A) para un ProductState o una densidad OperatorMatrix."""
    rho = state.densidad() if isinstance(state, ProductState) else state
    if tuple(rho.dims) != tuple(A.dims):
        raise ErrorDimension(f"Estado con dims {rho.dims} y observable con dims {A.dims}")
    return complex(np.einsum("ij,ji->", rho.entries, A.entries))


def partial_trace(A: OperatorMatrix, keep) -> OperatorMatrix:
    """Traza parcial sobre los factores fuera de `keep`.

    Si `keep` es vacío devuelve una matriz 1×1 con dims () que contiene Tr(A)."""
    conservar = sorted(set(int(k) for k in keep))
    n = len(A.dims)
    if any(k < 0 or k >= n for k in conservar):
        raise ErrorDimension(f"Slots {conservar} fuera de rango para {n} factores")
    tensor = A.entries.reshape(list(A.dims) * 2)
    m = n
    for slot in reversed(range(n)):
        if slot in conservar:
            continue
        tensor = np.trace(tensor, axis1=slot, axis2=slot + m)
        m -= 1
    dims = tuple(A.dims[k] for k in conservar)
    total = prod(dims)
    return OperatorMatrix(dims, np.asarray(tensor).reshape(total, total), hermitian=A.hermitian)
