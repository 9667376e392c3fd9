import csv
import json
from copy import deepcopy
from pathlib import Path

CONFIG_ORACULO = {
    "modelo": {
        "preset": "espin",
        "omega0": 1.0,
        "beta": 1.0,
        "acoplamiento": 0.1,
        "reservorio": {"frecuencias": [1.0], "cortes": [8]},
    },
    "observable": {"sistema": [{"preset": "pauli-z"}]},
    "tarea": {"tipo": "oracle"},
    "numerico": {"tiempos": [0.5, 1.0], "N": [2]},
    "salida": {"prefijo": "prueba"},
}


def configuracion(**cambios):
    """Copia de la configuración base con bloques reemplazados."""
    datos = deepcopy(CONFIG_ORACULO)
    for bloque, valor in cambios.items():
        datos[bloque] = valor
    return datos


def escribir_config(directorio, datos, nombre="config.json"):
    ruta = Path(directorio) / nombre
    ruta.write_text(json.dumps(datos), encoding="utf-8")
    return str(ruta)


def leer_csv(ruta):
    """(línea de cabecera, filas como diccionarios)."""
    with open(ruta, encoding="utf-8", newline="") as archivo:
        cabecera = archivo.readline()
        return cabecera, list(csv.DictReader(archivo))
