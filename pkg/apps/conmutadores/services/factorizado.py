"""Valor esperado factorizado de los términos de un multiconmutador.

Sobre el estado producto μ_1⊗…⊗μ_N⊗μ_r un término
(Π izq V)·A(t)·(Π der V), con V = G_j(t_k)⊗B_j(t_k), se factoriza en
    bloque de las partículas 1..n (con A_S(t) en medio)
  × Π_{j>n} μ_j(producto ordenado de sus G_j)
  × momento de reservorio (con A_r(t) en medio).

Todo se evalúa vectorizado sobre un bloque de nodos (m, r). Los momentos se
guardan en memorias por bloque, porque muchos términos comparten factores.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from functools import lru_cache
from math import prod
from typing import Iterable, Optional, Sequence

import numpy as np

from apps.base.excepciones import ErrorDimension, ErrorModelo
from apps.base.services.operadores import propagador_para
from apps.base.utils import SumaCompensada
from apps.conmutadores.services.plantillas import CommutatorTerm, expand_multicommutator
from apps.modelo.services.sistema import Observable, ParticleSpec, SystemModel
from apps.reservorio.services.gaussiano import EXCLUIDO, forma_campo
from apps.wick.services.momentos import momento_gaussiano

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def datos_particula(spec: ParticleSpec):
    """(energías, G y μ en la base propia de h, autovectores)."""
    propagador = propagador_para(spec.h)
    V = propagador.vectores
    G = V.conj().T @ spec.G.entries @ V
    rho = V.conj().T @ spec.mu.entries @ V
    return propagador.energias, G, rho, V


def _evolucion_libre(energias, M, tiempos):
    """M(s)_{ab} = M_{ab} e^{is(E_a − E_b)} para cada s de `tiempos` (m,)."""
    diferencias = energias[:, None] - energias[None, :]
    return M[None] * np.exp(1j * np.multiply.outer(tiempos, diferencias))


def _sumergir_lote(X, slot, dims):
    """I⊗X[m]⊗I para un lote (m, d, d) en el factor `slot`."""
    L = prod(dims[:slot])
    R = prod(dims[slot + 1:])
    d = dims[slot]
    grande = np.einsum("ij,mab,kl->miakjbl", np.eye(L), X, np.eye(R))
    return grande.reshape(X.shape[0], L * d * R, L * d * R)


def _traza_lote(rho, producto):
    return np.einsum("ab,mba->m", rho, producto)


def _producto_lote(matrices, m, dim):
    if not matrices:
        return np.broadcast_to(np.eye(dim, dtype=complex), (m, dim, dim))
    resultado = matrices[0]
    for M in matrices[1:]:
        resultado = np.matmul(resultado, M)
    return resultado


class ProveedorReservorio(ABC):
    """Momentos μ_r(B(t_{k₁})…A_r(t)…B(t_{k_s})) sobre un bloque de nodos.

    Las etiquetas son (b, k): b el índice del operador de acoplamiento y k la
    columna del tiempo."""

    nombre = ""

    def __init__(self, model: SystemModel, A: Observable, t: float):
        self.model = model
        self.A = A
        self.t = float(t)

    @classmethod
    def admite(cls, model: SystemModel, A: Observable) -> bool:
        return True

    @abstractmethod
    def momento(self, izquierda, derecha, nodos: np.ndarray) -> np.ndarray:
        ...


class ProveedorWick(ProveedorReservorio):
    """Campo gaussiano exacto (sin truncamiento) por el teorema de Wick."""

    nombre = "wick"

    def __init__(self, model, A, t):
        super().__init__(model, A, t)
        reservorio = model.reservoir
        self.estado = reservorio.estado_gaussiano()
        self.frecuencias = reservorio.frecuencias
        self.amplitudes = reservorio.acoplamientos or (reservorio.campo.amplitudes,)
        self.insertados = A.campo_efectivo.terminos(self.t, self.frecuencias)

    @classmethod
    def admite(cls, model, A):
        campo = A.campo_efectivo
        return model.reservoir.gaussiano and campo is not None and campo.tipo != EXCLUIDO

    def momento(self, izquierda, derecha, nodos):
        formas_cache = {}

        def forma(b, k):
            if (b, k) not in formas_cache:
                formas_cache[(b, k)] = forma_campo(self.amplitudes[b], nodos[:, k - 1], self.frecuencias)
            return formas_cache[(b, k)]

        izq = [forma(b, k) for b, k in izquierda]
        der = [forma(b, k) for b, k in derecha]
        total = np.zeros(nodos.shape[0], dtype=complex)
        for coeficiente, insertadas in self.insertados:
            total = total + coeficiente * momento_gaussiano(
                self.estado, izq + insertadas + der, (nodos.shape[0],)
            )
        return total


class ProveedorFock(ProveedorReservorio):
    """Matrices del reservorio (truncado o acotado) en la base propia de H_r."""

    nombre = "fock"

    def __init__(self, model, A, t):
        super().__init__(model, A, t)
        reservorio = model.reservoir
        propagador = propagador_para(reservorio.hamiltoniano())
        V = propagador.vectores
        self.energias = propagador.energias
        self.rho = V.conj().T @ reservorio.densidad().entries @ V
        self.Bs = []
        j = 1
        while True:
            b = reservorio.indice_B(j)
            if b < len(self.Bs):
                break
            self.Bs.append(V.conj().T @ reservorio.operador_B(j).entries @ V)
            j += 1
        A_r = propagador.en_base_propia(A.matriz_reservorio(reservorio))
        self.A_r = _evolucion_libre(self.energias, A_r, np.array([self.t]))[0]

    def momento(self, izquierda, derecha, nodos):
        m = nodos.shape[0]
        cache = {}

        def op(b, k):
            if (b, k) not in cache:
                cache[(b, k)] = _evolucion_libre(self.energias, self.Bs[b], nodos[:, k - 1])
            return cache[(b, k)]

        matrices = [op(b, k) for b, k in izquierda] + [np.broadcast_to(self.A_r, (m,) + self.A_r.shape)]
        matrices += [op(b, k) for b, k in derecha]
        return _traza_lote(self.rho, _producto_lote(matrices, m, self.rho.shape[0]))


_REGISTRO = {
    ProveedorWick.nombre: ProveedorWick,
    ProveedorFock.nombre: ProveedorFock,
}


def proveedor_para(model: SystemModel, A: Observable, t: float, preferencia: Optional[str] = None):
    """Wick si el reservorio es gaussiano y A_r tiene descripción de campo;
    si no, matrices de Fock."""
    if preferencia is not None:
        clase = _REGISTRO.get(preferencia)
        if clase is None:
            raise ValueError(f"Proveedor de momentos desconocido: {preferencia}")
        if not clase.admite(model, A):
            raise ErrorModelo(f"El proveedor '{preferencia}' no admite este reservorio/observable")
        return clase(model, A, t)
    for clase in _REGISTRO.values():
        if clase.admite(model, A):
            return clase(model, A, t)
    raise ErrorModelo("Ningún proveedor de momentos admite el observable")


class EvaluadorFactorizado:
    """Evalúa términos ω_N(T_t) factorizados para (modelo, N, A, t) fijos."""

    def __init__(
        self,
        model: SystemModel,
        N: int,
        A: Observable,
        t: float,
        proveedor: Optional[ProveedorReservorio] = None,
    ):
        n = A.n
        if N < max(n, 1):
            raise ErrorDimension(f"El observable usa {n} partículas y el sistema tiene N={N}")
        if not model.admite(N):
            raise ErrorDimension(f"El modelo no define {N} partículas")
        self.model = model
        self.N = N
        self.n = n
        self.t = float(t)
        self.A = A
        self.proveedor = proveedor or proveedor_para(model, A, t)
        self.simetrico = model.symmetric
        self._preparar_bloque()

    def _preparar_bloque(self):
        """A_S(t), ρ_S y las bases propias de las partículas 1..n."""
        if self.n == 0:
            self.dims_S = ()
            self.rho_S = np.ones((1, 1), dtype=complex)
            self.A_S = np.asarray(self.A.matriz_sistema.entries, dtype=complex)
            return
        datos = [datos_particula(self.model.particula(j)) for j in range(1, self.n + 1)]
        self.dims_S = tuple(d[1].shape[0] for d in datos)
        V = np.ones((1, 1), dtype=complex)
        rho = np.ones((1, 1), dtype=complex)
        energias = np.zeros(1)
        for E, _, r, Vj in datos:
            V = np.kron(V, Vj)
            rho = np.kron(rho, r)
            energias = np.add.outer(energias, E).ravel()
        if self.A.sistema.dims != self.dims_S:
            raise ErrorDimension(f"A_S tiene dims {self.A.sistema.dims}, las partículas {self.dims_S}")
        A_S = V.conj().T @ self.A.sistema.entries @ V
        self.rho_S = rho
        self.A_S = _evolucion_libre(energias, A_S, np.array([self.t]))[0]

    def _clave_particula(self, j):
        return 0 if self.simetrico else j

    def integrando(self, tuplas: Iterable[tuple[Sequence[int], float]], r: int):
        """f(nodos) = Σ peso·Σ_plantillas signo·ω_N(término), nodos (m, r)."""
        tuplas = list(tuplas)
        plantillas = expand_multicommutator(r)

        def f(nodos):
            memoria = _MemoriaBloque(self, nodos)
            acumulado = SumaCompensada((nodos.shape[0],))
            for tupla, peso in tuplas:
                for plantilla in plantillas:
                    valor = memoria.termino(plantilla.instanciar(tupla))
                    if valor is not None:
                        acumulado.agregar(peso * valor)
            return acumulado.valor

        return f

    def termino(self, term: CommutatorTerm, nodos: np.ndarray) -> np.ndarray:
        valor = _MemoriaBloque(self, np.atleast_2d(nodos)).termino(term)
        return np.zeros(np.atleast_2d(nodos).shape[0], dtype=complex) if valor is None else valor

    def base(self) -> complex:
        """ω_n(A_S(t))·μ_r(A_r(t))."""
        nodos = np.zeros((1, 0))
        memoria = _MemoriaBloque(self, nodos)
        return complex(memoria.bloque((), ())[0] * memoria.reservorio((), ())[0])


class _MemoriaBloque:
    """Momentos en caché para un bloque de nodos."""

    def __init__(self, evaluador: EvaluadorFactorizado, nodos: np.ndarray):
        self.e = evaluador
        self.nodos = nodos
        self.m = nodos.shape[0]
        self._particulas = {}
        self._bloques = {}
        self._reservorio = {}
        self._G = {}
        self._G_S = {}

    def _G_evolucionado(self, j, k):
        clave = (self.e._clave_particula(j), k)
        if clave not in self._G:
            E, G, _, _ = datos_particula(self.e.model.particula(j))
            self._G[clave] = _evolucion_libre(E, G, self.nodos[:, k - 1])
        return self._G[clave]

    def particula(self, j, posiciones):
        clave = (self.e._clave_particula(j), posiciones)
        if clave not in self._particulas:
            _, G, rho, _ = datos_particula(self.e.model.particula(j))
            producto = _producto_lote([self._G_evolucionado(j, k) for k in posiciones], self.m, G.shape[0])
            self._particulas[clave] = _traza_lote(rho, producto)
        return self._particulas[clave]

    def _G_sumergido(self, j, k):
        if (j, k) not in self._G_S:
            self._G_S[(j, k)] = _sumergir_lote(self._G_evolucionado(j, k), j - 1, self.e.dims_S)
        return self._G_S[(j, k)]

    def bloque(self, izquierda, derecha):
        clave = (izquierda, derecha)
        if clave not in self._bloques:
            dim = self.e.rho_S.shape[0]
            matrices = [self._G_sumergido(j, k) for j, k in izquierda]
            matrices.append(np.broadcast_to(self.e.A_S, (self.m, dim, dim)))
            matrices += [self._G_sumergido(j, k) for j, k in derecha]
            self._bloques[clave] = _traza_lote(self.e.rho_S, _producto_lote(matrices, self.m, dim))
        return self._bloques[clave]

    def reservorio(self, izquierda, derecha):
        clave = (izquierda, derecha)
        if clave not in self._reservorio:
            self._reservorio[clave] = self.e.proveedor.momento(izquierda, derecha, self.nodos)
        return self._reservorio[clave]

    def termino(self, term: CommutatorTerm):
        """Valor con signo del término, o None si se anula idénticamente."""
        n = self.e.n
        valor = float(term.sign)
        externas = {}
        for j, k in term.left_ops + term.right_ops:
            if j > n:
                externas.setdefault(j, []).append(k)
        for j, posiciones in externas.items():
            factor = self.particula(j, tuple(posiciones))
            if not np.any(factor):
                return None
            valor = valor * factor
        bloque = self.bloque(
            tuple((j, k) for j, k in term.left_ops if j <= n),
            tuple((j, k) for j, k in term.right_ops if j <= n),
        )
        if not np.any(bloque):
            return None
        reservorio_B = self.e.model.reservoir.indice_B
        momento = self.reservorio(
            tuple((reservorio_B(j), k) for j, k in term.left_ops),
            tuple((reservorio_B(j), k) for j, k in term.right_ops),
        )
        return valor * bloque * momento


def factorized_expectation(
    term: CommutatorTerm,
    tiempos: Sequence[float],
    model: SystemModel,
    N: int,
    A: Observable,
    t: float,
    proveedor: Optional[str] = None,
) -> complex:
    """ω_N(término) con los tiempos t_k dados (columna k−1 de `tiempos`)."""
    tiempos = np.asarray(tiempos, dtype=float).reshape(1, -1)
    if tiempos.shape[1] < max((k for _, k in term.left_ops + term.right_ops), default=0):
        raise ErrorDimension("Faltan tiempos para las etiquetas del término")
    evaluador = EvaluadorFactorizado(model, N, A, t, proveedor_para(model, A, t, proveedor))
    return complex(evaluador.termino(term, tiempos)[0])
