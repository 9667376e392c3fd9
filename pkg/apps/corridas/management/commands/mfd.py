"""Corridas por lotes del desarrollo de campo medio.

    python manage.py mfd run <config.json> [--out DIR] [--threads K] [--seed S]
    python manage.py mfd sweep <config.json> --axis N|lambda|t|cutoff --values 2,4,8
    python manage.py mfd certify <config.json>

Códigos de salida: 2 configuración inválida, 3 condición (A0) violada,
4 fallo numérico o de dominio.
"""

import json
import logging
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from apps.base.excepciones import CondicionA0Violada
from apps.corridas.serializers import RunConfigSerializer
from apps.corridas.serializers.serializer_config import EJES, TAREA_CERTIFICADO
from apps.corridas.services import salida, tareas
from apps.corridas.tasks import barrer

logger = logging.getLogger(__name__)

SALIDA_CONFIG = 2
SALIDA_A0 = 3
SALIDA_NUMERICA = 4


def _lista_valores(texto):
    try:
        valores = [float(v) for v in texto.split(",") if v.strip()]
    except ValueError:
        raise CommandError(f"Valores de barrido inválidos: {texto}", returncode=SALIDA_CONFIG)
    if not valores:
        raise CommandError("El barrido necesita al menos un valor", returncode=SALIDA_CONFIG)
    return valores


class Command(BaseCommand):
    help = "Ejecuta, barre o certifica una configuración de corrida (JSON)."

    def add_arguments(self, parser):
        acciones = parser.add_subparsers(dest="accion", required=True)
        for nombre, ayuda in (
            ("run", "Corre la tarea de la configuración"),
            ("sweep", "Barre un parámetro y resume pendientes log-log"),
            ("certify", "Emite el certificado de convergencia"),
        ):
            sub = acciones.add_parser(nombre, help=ayuda)
            sub.add_argument("config", help="Ruta del documento JSON")
            sub.add_argument("--out", help="Directorio de salida (por defecto el de la configuración)")
            sub.add_argument("--threads", type=int, help="Hilos del pool de trabajo")
            sub.add_argument("--seed", type=int, help="Semilla que reemplaza la de la configuración")
            if nombre == "sweep":
                sub.add_argument("--axis", required=True, choices=EJES)
                sub.add_argument("--values", required=True)

    def handle(self, *args, **options):
        datos = self._cargar(options["config"])
        if options.get("seed") is not None:
            datos["numerico"]["semilla"] = options["seed"]
            datos["numerico"]["cuadratura"]["semilla"] = options["seed"]
        directorio = Path(options.get("out") or datos["salida"]["directorio"])
        hilos = options.get("threads")

        try:
            if options["accion"] == "sweep":
                rutas = self._barrer(datos, options["axis"], _lista_valores(options["values"]), directorio, hilos)
            else:
                if options["accion"] == "certify":
                    datos["tarea"]["tipo"] = TAREA_CERTIFICADO
                rutas = self._correr(datos, directorio, hilos)
        except serializers.ValidationError as exc:
            raise CommandError(f"Configuración inválida: {exc.detail}", returncode=SALIDA_CONFIG)
        except CondicionA0Violada as exc:
            logger.exception("Condición (A0) violada")
            raise CommandError(str(exc), returncode=SALIDA_A0)
        except (ValueError, RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
            logger.exception("Fallo numérico en la corrida")
            raise CommandError(f"Fallo numérico: {exc}", returncode=SALIDA_NUMERICA)

        for ruta in rutas:
            self.stdout.write(self.style.SUCCESS(f"Escrito {ruta}"))

    def _cargar(self, ruta):
        try:
            with open(ruta, encoding="utf-8") as archivo:
                crudo = json.load(archivo)
        except (OSError, json.JSONDecodeError) as exc:
            raise CommandError(f"No se pudo leer la configuración: {exc}", returncode=SALIDA_CONFIG)
        serializer = RunConfigSerializer(data=crudo)
        if not serializer.is_valid():
            raise CommandError(f"Configuración inválida: {serializer.errors}", returncode=SALIDA_CONFIG)
        # Tipos nativos de JSON para poder enviarla a los workers
        return json.loads(json.dumps(serializer.validated_data))

    def _secciones(self, datos, filas):
        tarea, numerico = datos["tarea"], datos["numerico"]
        return {
            "configuracion": {
                "tarea": tarea["tipo"],
                "formula": tarea.get("formula", ""),
                "lambda": datos["modelo"]["acoplamiento"],
                "N": numerico["N"],
                "tiempos": numerico["tiempos"],
                "r_max": numerico["r_max"],
                "nu_max": numerico.get("nu_max", ""),
            },
            "certificacion": salida.resumen_certificacion(filas),
        }

    def _correr(self, datos, directorio, hilos):
        resultado = tareas.ejecutar(datos, hilos)
        prefijo = datos["salida"]["prefijo"]
        if datos["tarea"]["tipo"] == TAREA_CERTIFICADO and prefijo != TAREA_CERTIFICADO:
            prefijo = f"{prefijo}-{TAREA_CERTIFICADO}"
        secciones = self._secciones(datos, resultado.filas)
        secciones.update(resultado.reporte)
        return [
            salida.escribir_csv(directorio / f"{prefijo}.csv", resultado.filas),
            salida.escribir_reporte(directorio / f"{prefijo}.txt", f"Corrida {datos['tarea']['tipo']}", secciones),
        ]

    def _barrer(self, datos, eje, valores, directorio, hilos):
        por_valor = barrer(datos, eje, valores, hilos)
        referencia = datos["numerico"].get("referencia")
        resumen = salida.resumen_barrido(
            eje, valores, por_valor, datos["tarea"]["tipo"],
            None if referencia is None else tareas.complejo(referencia),
        )
        filas = [fila for filas in por_valor for fila in filas]
        prefijo = f"{datos['salida']['prefijo']}-barrido-{eje}"
        secciones = self._secciones(datos, filas)
        secciones["barrido"] = resumen
        return [
            salida.escribir_csv(directorio / f"{prefijo}.csv", filas),
            salida.escribir_reporte(directorio / f"{prefijo}.txt", f"Barrido en {eje}", secciones),
        ]
