"""Artefactos de una corrida: CSV, reporte legible y resumen de barridos.

Fuera de la línea `# generado:` la salida solo depende de la configuración,
así que dos corridas iguales producen archivos idénticos.
"""

from __future__ import annotations

import csv
import json
import logging
from math import inf
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from django.utils import timezone

from apps.base.utils import pendiente_loglog
from apps.corridas.serializers.serializer_config import TAREA_COMPARAR, TAREA_ORACULO
from apps.corridas.services.tareas import Fila

logger = logging.getLogger(__name__)

COLUMNAS = ("task", "N", "t", "value_re", "value_im", "error_bound", "certified", "r_max", "nu_max")
TOL_CORTE = 1e-6


def _flotante(x: float) -> str:
    if x == inf:
        return "inf"
    return "%.17g" % x


def _celda_N(N) -> str:
    if N is None:
        return ""
    return "inf" if N == inf else str(int(N))


def _opcional(valor) -> str:
    return "" if valor is None else str(valor)


def celdas(fila: Fila) -> list[str]:
    return [
        fila.task,
        _celda_N(fila.N),
        _flotante(fila.t),
        _flotante(float(np.real(fila.value))),
        _flotante(float(np.imag(fila.value))),
        "" if fila.error_bound is None else _flotante(fila.error_bound),
        "true" if fila.certified else "false",
        _opcional(fila.r_max),
        _opcional(fila.nu_max),
    ]


def _cabecera(archivo):
    archivo.write(f"# generado: {timezone.now().isoformat()}\n")


def escribir_csv(ruta: Path, filas: Iterable[Fila]) -> Path:
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    with ruta.open("w", newline="", encoding="utf-8") as archivo:
        _cabecera(archivo)
        escritor = csv.writer(archivo, lineterminator="\n")
        escritor.writerow(COLUMNAS)
        total = 0
        for fila in filas:
            escritor.writerow(celdas(fila))
            total += 1
    logger.info("CSV escrito en %s (%s filas)", ruta, total)
    return ruta


def _texto(valor) -> str:
    if isinstance(valor, (dict, list)):
        return json.dumps(valor, indent=2, sort_keys=True, ensure_ascii=False, default=str)
    return str(valor)


def escribir_reporte(ruta: Path, titulo: str, secciones: dict) -> Path:
    """Texto clave: valor, una sección por entrada de `secciones`."""
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    with ruta.open("w", encoding="utf-8") as archivo:
        _cabecera(archivo)
        archivo.write(f"{titulo}\n{'=' * len(titulo)}\n")
        for nombre, contenido in secciones.items():
            archivo.write(f"\n[{nombre}]\n")
            if isinstance(contenido, dict):
                for clave, valor in contenido.items():
                    archivo.write(f"{clave}: {_texto(valor)}\n")
            elif isinstance(contenido, list):
                for linea in contenido:
                    archivo.write(f"- {_texto(linea)}\n")
            else:
                archivo.write(f"{_texto(contenido)}\n")
    return ruta


def resumen_certificacion(filas: Sequence[Fila]) -> dict:
    certificadas = sum(1 for f in filas if f.certified)
    return {"filas": len(filas), "certificadas": certificadas, "no_certificadas": len(filas) - certificadas}


def _brecha(filas: Sequence[Fila], tarea: str, referencia: Optional[complex]) -> float:
    """Magnitud comparada en un punto del barrido (máximo sobre sus filas)."""
    if tarea == TAREA_COMPARAR:
        exactos = [f for f in filas if f.task == TAREA_ORACULO]
        desarrollos = [f for f in filas if f.task != TAREA_ORACULO]
        return max((abs(a.value - b.value) for a, b in zip(exactos, desarrollos)), default=0.0)
    if referencia is not None:
        return max((abs(f.value - referencia) for f in filas), default=0.0)
    return max((abs(f.value) for f in filas), default=0.0)


def resumen_barrido(
    eje: str,
    valores: Sequence[float],
    filas_por_valor: Sequence[Sequence[Fila]],
    tarea: str,
    referencia: Optional[complex] = None,
) -> dict:
    """Pendiente log-log de la brecha contra el eje y, para el eje cutoff,
    el veredicto de convergencia del truncamiento."""
    brechas = [_brecha(filas, tarea, referencia) for filas in filas_por_valor]
    if tarea == TAREA_COMPARAR:
        magnitud = "|oráculo − desarrollo|"
    elif referencia is not None:
        magnitud = "|valor − referencia|"
    else:
        magnitud = "|valor|"
    resumen = {
        "eje": eje,
        "magnitud": magnitud,
        "valores": list(valores),
        "brechas": brechas,
        "pendiente_loglog": pendiente_loglog(valores, brechas),
    }
    if eje == "cutoff" and len(filas_por_valor) >= 2:
        cambios = [
            max((abs(a.value - b.value) for a, b in zip(previas, actuales)), default=0.0)
            for previas, actuales in zip(filas_por_valor, filas_por_valor[1:])
        ]
        resumen["cambios"] = cambios
        resumen["truncamiento_convergido"] = cambios[-1] < TOL_CORTE
    logger.info("Resumen del barrido %s: pendiente %s", eje, resumen["pendiente_loglog"])
    return resumen
