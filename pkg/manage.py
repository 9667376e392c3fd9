#!/usr/bin/env python
"""Punto de entrada de Django: `mfd`, `test` y los demás comandos de gestión."""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "CampoMedio.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "No se pudo importar Django; instale requirements.txt en el entorno activo."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
