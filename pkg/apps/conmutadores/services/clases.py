"""Clases de índices C_r(p₁,…,p_N) y clases límite D_r / E_r.

Una tupla (j₁,…,j_r) pertenece a la clase del perfil (p₁,…,p_N) si la
partícula j aparece exactamente p_j veces. Las clases límite fijan el perfil
de las partículas 1..n y exigen que las demás apariciones formen pares
exactos sobre partículas nuevas n+1, n+2, …
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import factorial
from typing import Iterator, Sequence

from sympy.utilities.iterables import multiset_permutations

logger = logging.getLogger(__name__)

LIMITE_X = "D"
LIMITE_Y = "E"


def multinomial(partes: Sequence[int]) -> int:
    total = factorial(sum(partes))
    for p in partes:
        total //= factorial(p)
    return total


@dataclass(frozen=True)
class IndexClass:
    profile: tuple[int, ...]

    def __post_init__(self):
        perfil = tuple(int(p) for p in self.profile)
        if any(p < 0 for p in perfil):
            raise ValueError(f"Perfil con entradas negativas: {perfil}")
        object.__setattr__(self, "profile", perfil)

    @property
    def r(self) -> int:
        return sum(self.profile)

    @property
    def miembros(self) -> int:
        return multinomial(self.profile)


def enumerate_class(clase: IndexClass) -> Iterator[tuple[int, ...]]:
    """Tuplas de la clase en orden lexicográfico, sin repetir."""
    if clase.r == 0:
        yield ()
        return
    multiconjunto = [j for j, p in enumerate(clase.profile, start=1) for _ in range(p)]
    for tupla in multiset_permutations(multiconjunto):
        yield tuple(tupla)


def composiciones(total: int, partes: int, paso: int = 1) -> Iterator[tuple[int, ...]]:
    """Tuplas de `partes` enteros ≥ 0, múltiplos de `paso`, que suman `total`."""
    if partes == 0:
        if total == 0:
            yield ()
        return
    for valor in range(0, total + 1, paso):
        for resto in composiciones(total - valor, partes - 1, paso):
            yield (valor,) + resto


def perfiles(r: int, N: int) -> Iterator[IndexClass]:
    for perfil in composiciones(r, N):
        yield IndexClass(perfil)


def pares_nuevos(kind: str, r: int, nu: int) -> int:
    """Número de partículas nuevas m (cada una aparece dos veces)."""
    if kind == LIMITE_X:
        m2 = r - 2 * nu
    elif kind == LIMITE_Y:
        m2 = r - 2 * nu - 1
    else:
        raise ValueError(f"Clase límite desconocida: {kind}")
    if m2 < 0 or m2 % 2:
        raise ValueError(f"Restricciones inconsistentes: r={r}, ν={nu}, clase {kind}")
    return m2 // 2


def enumerate_limit_classes(kind: str, r: int, n: int, perfil: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Tuplas con el perfil dado en 1..n y pares exactos en n+1..n+m."""
    perfil = tuple(int(p) for p in perfil)
    if len(perfil) != n:
        raise ValueError(f"El perfil debe tener n={n} entradas")
    suma = sum(perfil)
    if (kind == LIMITE_X and suma % 2) or (kind == LIMITE_Y and suma % 2 == 0):
        raise ValueError(f"Paridad de Σp={suma} incompatible con la clase {kind}")
    nu = suma // 2
    m = pares_nuevos(kind, r, nu)
    yield from enumerate_class(IndexClass(perfil + (2,) * m))


def conteo_limite(r: int, perfil: Sequence[int], m: int) -> int:
    return multinomial(tuple(perfil) + (2,) * m)


def canonica(tupla: Sequence[int], n: int) -> tuple[int, ...]:
    """Reetiqueta las partículas > n por orden de primera aparición.

    En un modelo simétrico todas las tuplas con la misma forma canónica dan
    el mismo valor esperado."""
    nuevas: dict[int, int] = {}
    resultado = []
    for j in tupla:
        if j <= n:
            resultado.append(j)
            continue
        if j not in nuevas:
            nuevas[j] = n + len(nuevas) + 1
        resultado.append(nuevas[j])
    return tuple(resultado)


def agrupar_canonicas(tuplas, n: int) -> list[tuple[tuple[int, ...], int]]:
    """(representante, multiplicidad) en orden de primera aparición."""
    pesos: dict[tuple[int, ...], int] = {}
    for tupla in tuplas:
        clave = canonica(tupla, n)
        pesos[clave] = pesos.get(clave, 0) + 1
    return list(pesos.items())


def _cadenas_crecimiento(q: int, solo_pares: bool, exactamente_pares: bool):
    """Particiones de q posiciones como cadenas de crecimiento restringido,
    con bloques de tamaño par (o exactamente 2)."""

    def recursion(prefijo, tamanos):
        if len(prefijo) == q:
            if solo_pares and any(c % 2 for c in tamanos):
                return
            yield tuple(prefijo), len(tamanos)
            return
        faltan = q - len(prefijo)
        impares = sum(c % 2 for c in tamanos)
        if solo_pares and impares > faltan:
            return
        for bloque in range(len(tamanos) + 1):
            if exactamente_pares and bloque < len(tamanos) and tamanos[bloque] >= 2:
                continue
            nuevos = list(tamanos) + ([0] if bloque == len(tamanos) else [])
            nuevos[bloque] += 1
            yield from recursion(prefijo + [bloque], nuevos)

    yield from recursion([], [])


def factorial_descendente(a: int, b: int) -> int:
    """a(a−1)…(a−b+1), 0 si b > a."""
    if b > a:
        return 0
    total = 1
    for k in range(b):
        total *= a - k
    return total


def formas_canonicas(
    r: int, n: int, perfil: Sequence[int], N: int | None = None, exactamente_pares: bool = False
) -> Iterator[tuple[tuple[int, ...], int]]:
    """(tupla canónica, peso) de las tuplas con perfil fijo en 1..n y
    apariciones de tamaño par en las partículas restantes.

    Con N dado el peso cuenta las asignaciones de etiquetas en n+1..N; con
    `exactamente_pares` (clases límite) el peso es 1 y cada forma representa
    m! tuplas de la clase D_r o E_r."""
    perfil = tuple(int(p) for p in perfil)
    q = r - sum(perfil)
    if q < 0 or (exactamente_pares and q % 2):
        return
    marcas = [j for j, p in enumerate(perfil, start=1) for _ in range(p)] + [0] * q
    particiones = list(_cadenas_crecimiento(q, True, exactamente_pares))
    for colocacion in multiset_permutations(marcas):
        libres = [i for i, j in enumerate(colocacion) if j == 0]
        for cadena, bloques in particiones:
            if exactamente_pares and bloques != q // 2:
                continue
            peso = 1 if N is None else factorial_descendente(N - n, bloques)
            if peso == 0:
                continue
            tupla = list(colocacion)
            for posicion, bloque in zip(libres, cadena):
                tupla[posicion] = n + 1 + bloque
            yield tuple(tupla), peso
