"""Construcción de modelos a partir de configuraciones validadas y despacho
de las tareas de una corrida."""

from __future__ import annotations

import logging
from copy import deepcopy
from dataclasses import dataclass, field
from functools import reduce
from math import inf, isfinite, sqrt
from typing import Callable, Optional, Union

import numpy as np
from django.conf import settings
from rest_framework import serializers

from apps.base.excepciones import ErrorModelo
from apps.base.services.cuadratura import QuadratureSpec
from apps.base.services.operadores import OperatorMatrix
from apps.base.services.presets import matriz_preset
from apps.corridas.serializers.serializer_config import (
    TAREA_CERTIFICADO,
    TAREA_COMPARAR,
    TAREA_DYSON,
    TAREA_FLUCTUACIONES,
    TAREA_FORMA_CERRADA,
    TAREA_LIMITES,
    TAREA_ORACULO,
)
from apps.expansion.services.ensamblado import assemble, serie_fluctuaciones
from apps.formas_cerradas.services.conservativo import (
    energy_conserving_limit,
    kappa,
    number_limit,
    weyl_limit,
)
from apps.formas_cerradas.services.dicke import dicke_number_leading
from apps.formas_cerradas.services.fluctuaciones import fluctuation_closed
from apps.formas_cerradas.services.orden_principal import leading_order
from apps.formas_cerradas.services.reporte import construir_reporte
from apps.modelo.services.oraculo import dyson_direct, evolve_expectation
from apps.modelo.services.sistema import (
    COHERENTE,
    TERMICO,
    Observable,
    ParticleSpec,
    ReservoirSpec,
    ReservorioAcotado,
    SystemModel,
    modelo_defasaje,
    modelo_dicke,
    modelo_espin,
    modelo_tridiagonal,
)
from apps.reservorio.services.gaussiano import DiscretizedField, ObservableCampo
from apps.wick.services.cotas import certify

logger = logging.getLogger(__name__)

TOL_HERMITICA_CONFIG = 1e-12


def complejo(par) -> complex:
    return complex(par[0], par[1])


def complejos(pares) -> np.ndarray:
    return np.array([complejo(p) for p in pares], dtype=complex)


# --- Modelos -----------------------------------------------------------------


def construir_matriz(datos: dict, hermitian: Optional[bool] = None, density: bool = False) -> OperatorMatrix:
    """Matriz desde un preset o desde entradas aplanadas.

    Con `hermitian=None` la bandera se detecta numéricamente."""
    if "preset" in datos:
        matriz = matriz_preset(datos["preset"])
        dims, entradas = matriz.dims, matriz.entries
    else:
        dims = tuple(datos["dims"])
        total = int(np.prod(dims))
        entradas = complejos(datos["entradas"]).reshape(total, total)
    if hermitian is None:
        hermitian = bool(np.allclose(entradas, entradas.conj().T, atol=TOL_HERMITICA_CONFIG))
    return OperatorMatrix(dims, entradas, hermitian=hermitian or density, density=density)


def construir_reservorio(datos: dict):
    if datos["tipo"] == "acotado":
        return ReservorioAcotado(
            construir_matriz(datos["H_r"], hermitian=True),
            tuple(construir_matriz(b, hermitian=True) for b in datos["B"]),
            construir_matriz(datos["rho"], density=True),
        )
    campo = DiscretizedField(
        np.asarray(datos["frecuencias"], dtype=float),
        complejos(datos["form_factor"]),
        None if "pesos" not in datos else np.asarray(datos["pesos"], dtype=float),
    )
    acoplamientos = datos.get("acoplamientos")
    return ReservoirSpec(
        campo,
        tuple(datos["cortes"]),
        estado=datos["estado"],
        beta=datos.get("beta") if datos["estado"] == TERMICO else None,
        alfas=tuple(complejos(datos["alfas"])) if datos["estado"] == COHERENTE else (),
        acoplamientos=None if acoplamientos is None else tuple(complejos(f) for f in acoplamientos),
    )


def construir_modelo(datos: dict) -> SystemModel:
    reservorio = construir_reservorio(datos["reservorio"])
    lam = datos["acoplamiento"]
    preset = datos.get("preset")
    if preset == "espin":
        return modelo_espin(datos["omega0"], datos["beta"], reservorio, lam, G=datos.get("G", "pauli-x"))
    if preset == "dicke":
        return modelo_dicke(datos["omega0"], datos["p"], reservorio, lam)
    if preset == "defasaje":
        return modelo_defasaje(datos["omega0"], reservorio, lam)
    if preset == "tridiagonal":
        return modelo_tridiagonal(datos["energias"], datos["saltos"], datos["beta"], reservorio, lam)
    particulas = tuple(
        ParticleSpec(
            construir_matriz(p["h"], hermitian=True),
            construir_matriz(p["G"], hermitian=True),
            construir_matriz(p["mu"], density=True),
        )
        for p in datos["particulas"]
    )
    return SystemModel(particulas, reservorio, lam)


def construir_observable(datos: dict) -> Observable:
    factores = [construir_matriz(m) for m in datos.get("sistema") or ()]
    sistema = reduce(lambda a, b: a.kron(b), factores) if factores else None
    campo = None
    if "campo" in datos:
        campo = ObservableCampo(
            datos["campo"]["tipo"],
            tuple(complejos(h) for h in datos["campo"]["amplitudes"]),
            datos["campo"].get("norma"),
        )
    reservorio = construir_matriz(datos["matriz_reservorio"]) if "matriz_reservorio" in datos else None
    return Observable(sistema=sistema, reservorio=reservorio, campo=campo)


def construir_cuadratura(numerico: dict) -> QuadratureSpec:
    cuadratura = numerico["cuadratura"]
    semilla = cuadratura.get("semilla", numerico.get("semilla"))
    return QuadratureSpec(
        method=cuadratura["metodo"],
        order=cuadratura.get("orden"),
        samples=cuadratura.get("muestras"),
        seed=semilla,
        tolerance=cuadratura["tolerancia"],
        max_refinements=cuadratura["refinamientos"],
    )


# --- Filas y corridas ----------------------------------------------------------


@dataclass(frozen=True)
class Fila:
    """Una fila del CSV. `N` es inf para los límites y None si no aplica;
    `error_bound` None deja la celda vacía."""

    task: str
    N: Optional[Union[int, float]]
    t: float
    value: complex
    error_bound: Optional[float]
    certified: bool
    r_max: Optional[int] = None
    nu_max: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "task": self.task,
            "N": self.N,
            "t": self.t,
            "value_re": float(np.real(self.value)),
            "value_im": float(np.imag(self.value)),
            "error_bound": self.error_bound,
            "certified": self.certified,
            "r_max": self.r_max,
            "nu_max": self.nu_max,
        }

    @classmethod
    def desde_dict(cls, datos: dict) -> "Fila":
        return cls(
            task=datos["task"],
            N=datos["N"],
            t=datos["t"],
            value=complex(datos["value_re"], datos["value_im"]),
            error_bound=datos["error_bound"],
            certified=datos["certified"],
            r_max=datos["r_max"],
            nu_max=datos["nu_max"],
        )


@dataclass
class Corrida:
    """Configuración validada ya convertida en objetos del dominio."""

    datos: dict
    model: SystemModel
    A: Observable
    tiempos: tuple
    Ns: tuple
    r_max: int
    nu_max: int
    quad: QuadratureSpec
    hilos: int = 1

    @classmethod
    def desde_datos(cls, datos: dict, hilos: Optional[int] = None) -> "Corrida":
        numerico = datos["numerico"]
        nu_max = numerico.get("nu_max")
        return cls(
            datos=datos,
            model=construir_modelo(datos["modelo"]),
            A=construir_observable(datos["observable"]),
            tiempos=tuple(float(t) for t in numerico["tiempos"]),
            Ns=tuple(int(N) for N in numerico["N"]),
            r_max=numerico["r_max"],
            nu_max=int(getattr(settings, "MFD_NU_MAXIMO", 2)) if nu_max is None else nu_max,
            quad=construir_cuadratura(numerico),
            hilos=hilos or int(getattr(settings, "MFD_HILOS", 1)),
        )

    @property
    def tarea(self) -> dict:
        return self.datos["tarea"]


@dataclass
class ResultadoCorrida:
    filas: list
    reporte: dict = field(default_factory=dict)


def _oraculo(corrida: Corrida) -> ResultadoCorrida:
    filas = []
    for N in corrida.Ns:
        valores = evolve_expectation(corrida.model, N, corrida.A, corrida.tiempos, corrida.hilos)
        filas.extend(Fila(TAREA_ORACULO, N, t, v, 0.0, True) for t, v in zip(corrida.tiempos, valores))
    return ResultadoCorrida(filas, {"dimensiones": {str(N): corrida.model.dimension(N) for N in corrida.Ns}})


def _dyson(corrida: Corrida) -> ResultadoCorrida:
    filas = []
    for N in corrida.Ns:
        for t in corrida.tiempos:
            resultado = dyson_direct(
                corrida.model, N, corrida.A, t, corrida.r_max, corrida.quad, corrida.tarea.get("proveedor")
            )
            error = resultado.error_bound
            filas.append(
                Fila(TAREA_DYSON, N, t, resultado.value, error, resultado.a1_ok and isfinite(error), corrida.r_max)
            )
    return ResultadoCorrida(filas)


def _ensamblar(corrida: Corrida, t: float, N: Optional[int]):
    return assemble(
        corrida.model,
        corrida.A,
        t,
        nu_max=corrida.nu_max,
        r_max=corrida.r_max,
        quad=corrida.quad,
        N=N,
        proveedor=corrida.tarea.get("proveedor"),
        hilos=corrida.hilos,
    )


def _limites(corrida: Corrida) -> ResultadoCorrida:
    filas, coeficientes = [], {}
    for t in corrida.tiempos:
        resultado = _ensamblar(corrida, t, None)
        filas.append(
            Fila(TAREA_LIMITES, inf, t, resultado.value, resultado.remainder, resultado.certified,
                 corrida.r_max, corrida.nu_max)
        )
        coeficientes[f"t={t:.17g}"] = resultado.as_dict()["coefficients"]
    return ResultadoCorrida(filas, {"coeficientes": coeficientes})


def _comparar(corrida: Corrida) -> ResultadoCorrida:
    filas, veredictos = [], []
    for N in corrida.Ns:
        exactos = evolve_expectation(corrida.model, N, corrida.A, corrida.tiempos, corrida.hilos)
        for t, exacto in zip(corrida.tiempos, exactos):
            resultado = _ensamblar(corrida, t, N)
            filas.append(Fila(TAREA_ORACULO, N, t, exacto, 0.0, True))
            filas.append(
                Fila("expansion", N, t, resultado.value, resultado.remainder, resultado.certified,
                     corrida.r_max, corrida.nu_max)
            )
            diferencia = abs(exacto - resultado.value)
            dentro = diferencia <= resultado.remainder
            veredictos.append(
                f"N={N} t={t:.17g} |oráculo − desarrollo|={diferencia:.3e} "
                f"resto={resultado.remainder:.3e} {'OK' if dentro else 'FUERA'}"
            )
            if not dentro:
                logger.warning("Desarrollo fuera de su cota en N=%s, t=%s (%.3e)", N, t, diferencia)
    return ResultadoCorrida(filas, {"comparacion": veredictos})


def _fluctuaciones(corrida: Corrida) -> ResultadoCorrida:
    filas = []
    for t in corrida.tiempos:
        valor = serie_fluctuaciones(
            corrida.model, corrida.A, t, corrida.r_max, corrida.quad, corrida.tarea.get("proveedor")
        )
        # La serie no trae cota de cola: la fila nunca se declara certificada
        filas.append(Fila(TAREA_FLUCTUACIONES, inf, t, valor.value, valor.quadrature_error, False, corrida.r_max))
    return ResultadoCorrida(filas)


def _certificado(corrida: Corrida) -> ResultadoCorrida:
    filas, certificados = [], {}
    for t in corrida.tiempos:
        cert = certify(corrida.model, corrida.A, lam=corrida.model.coupling, t=t, n=corrida.A.n,
                       nu_max=corrida.nu_max)
        filas.append(
            Fila(TAREA_CERTIFICADO, None, t, complex(cert.A1_margin), cert.cota_X(0), cert.certified,
                 None, corrida.nu_max)
        )
        certificados[f"t={t:.17g}"] = cert.as_dict()
        logger.info("Certificado t=%s: margen (A1) %.4f, certificado=%s", t, cert.A1_margin, cert.certified)
    return ResultadoCorrida(filas, {"certificados": certificados})


# --- Fórmulas cerradas -------------------------------------------------------


def _campo_gaussiano(model: SystemModel) -> ReservoirSpec:
    if not isinstance(model.reservoir, ReservoirSpec):
        raise ErrorModelo("La fórmula necesita un reservorio bosónico")
    return model.reservoir


def _numero_inicial(reservorio: ReservoirSpec) -> float:
    estado = reservorio.estado_gaussiano()
    medias = 0.0 if estado.medias is None else float(np.sum(np.abs(estado.medias) ** 2))
    return float(np.sum(estado.ocupaciones)) + medias


def _formula_fluctuaciones(corrida: Corrida) -> Callable[[float], complex]:
    modelo = corrida.datos["modelo"]
    reservorio = _campo_gaussiano(corrida.model)
    if len(reservorio.campo) != 1 or reservorio.estado != COHERENTE:
        raise ErrorModelo("La fórmula de fluctuaciones usa un único modo en estado coherente")
    if abs(reservorio.amplitud(1)[0] - 1.0) > TOL_HERMITICA_CONFIG:
        raise ErrorModelo("La fórmula de fluctuaciones supone B = φ(1)")
    if modelo.get("preset") != "espin":
        raise ErrorModelo("La fórmula de fluctuaciones necesita el preset espin (estado de Gibbs de h)")
    T = inf if modelo["beta"] == 0 else 1.0 / modelo["beta"]
    # Inversa de alfa_modo: α = conj(α_a)/√2
    alpha = np.conj(reservorio.alfas[0]) / sqrt(2.0)
    omega_r = float(reservorio.frecuencias[0])
    forma = corrida.tarea["forma"]
    return lambda t: fluctuation_closed(
        alpha, corrida.A.matriz_sistema, modelo["omega0"], omega_r, T, corrida.model.coupling, t, forma
    )


def _formas_cerradas(corrida: Corrida) -> ResultadoCorrida:
    formula = corrida.tarea["formula"]
    tarea = corrida.tarea
    model = corrida.model
    modelo = corrida.datos["modelo"]
    exacta = formula in ("energy-conserving", "weyl", "number")
    Ns = (inf,)
    entradas = {"lambda": model.coupling}

    if formula == "energy-conserving":
        A_r = Observable(reservorio=corrida.A.reservorio, campo=corrida.A.campo)
        corte = corrida.datos["numerico"].get("corte_ancilla")
        funciones = {inf: lambda t: energy_conserving_limit(model, A_r, t, tarea["convencion"], corte)}
    elif formula == "weyl":
        reservorio = _campo_gaussiano(model)
        k = kappa(model)
        h = complejos(tarea["h"])
        entradas["kappa"] = k
        funciones = {
            inf: lambda t: weyl_limit(reservorio.campo, h, k, t, reservorio.estado_gaussiano(), tarea["convencion"])
        }
    elif formula == "number":
        reservorio = _campo_gaussiano(model)
        k = kappa(model)
        N0 = _numero_inicial(reservorio)
        entradas.update(kappa=k, N0=N0)
        funciones = {inf: lambda t: number_limit(reservorio.campo, k, t, N0, tarea["convencion"])}
    elif formula == "dicke":
        if modelo.get("preset") != "dicke":
            raise ErrorModelo("La fórmula de Dicke necesita el preset dicke")
        reservorio = _campo_gaussiano(model)
        entradas.update(p=modelo["p"], omega0=modelo["omega0"])
        funciones = {
            inf: lambda t: dicke_number_leading(reservorio.campo, modelo["p"], modelo["omega0"], model.coupling, t)
        }
    elif formula == "fluctuations":
        funciones = {inf: _formula_fluctuaciones(corrida)}
    else:
        Ns = corrida.Ns
        funciones = {
            N: (lambda t, N=N: leading_order(model, corrida.A, N, t, corrida.quad, tarea["limite"],
                                             tarea.get("proveedor")))
            for N in Ns
        }

    filas = []
    for N in Ns:
        reporte = construir_reporte(formula, funciones[N], corrida.tiempos, entradas, hilos=corrida.hilos)
        for t, valor, en_ventana in reporte.filas():
            certificada = exacta and en_ventana
            filas.append(Fila(f"{TAREA_FORMA_CERRADA}:{formula}", N, t, valor, 0.0 if certificada else None,
                              certificada))
    return ResultadoCorrida(filas, {"formula": formula, "entradas": entradas})


_REGISTRO: dict[str, Callable[[Corrida], ResultadoCorrida]] = {
    TAREA_ORACULO: _oraculo,
    TAREA_DYSON: _dyson,
    TAREA_LIMITES: _limites,
    TAREA_FORMA_CERRADA: _formas_cerradas,
    TAREA_CERTIFICADO: _certificado,
    TAREA_FLUCTUACIONES: _fluctuaciones,
    TAREA_COMPARAR: _comparar,
}


def ejecutar(datos: dict, hilos: Optional[int] = None) -> ResultadoCorrida:
    """Corre la tarea de una configuración ya validada."""
    corrida = Corrida.desde_datos(datos, hilos)
    tipo = corrida.tarea["tipo"]
    logger.info("Inicio de la tarea %s (%s tiempos, N=%s)", tipo, len(corrida.tiempos), list(corrida.Ns))
    resultado = _REGISTRO[tipo](corrida)
    logger.info("Fin de la tarea %s: %s filas", tipo, len(resultado.filas))
    return resultado


# --- Barridos ------------------------------------------------------------------


def aplicar_eje(datos: dict, eje: str, valor: float) -> dict:
    """Copia de la configuración con el parámetro del eje reemplazado."""
    datos = deepcopy(datos)
    if eje == "N":
        datos["numerico"]["N"] = [int(valor)]
    elif eje == "lambda":
        datos["modelo"]["acoplamiento"] = float(valor)
    elif eje == "t":
        datos["numerico"]["tiempos"] = [float(valor)]
    elif eje == "cutoff":
        if datos["modelo"]["reservorio"]["tipo"] != "fock":
            raise serializers.ValidationError({"axis": "El eje cutoff necesita un reservorio de Fock."})
        datos["modelo"]["reservorio"]["cortes"] = [int(valor)]
    else:
        raise serializers.ValidationError({"axis": f"Eje desconocido: {eje}"})
    return datos


def evaluar_punto(datos: dict, eje: str, valor: float, hilos: int = 1) -> list[dict]:
    """Filas (como diccionarios) de un punto del barrido."""
    logger.info("Punto del barrido %s=%s", eje, valor)
    return [fila.as_dict() for fila in ejecutar(aplicar_eje(datos, eje, valor), hilos).filas]
