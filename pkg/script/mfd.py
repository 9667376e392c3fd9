#!/usr/bin/env python
"""Atajo de línea de comandos: `mfd run|sweep|certify ...`.

Equivale a `python manage.py mfd ...` y conserva sus códigos de salida.
"""

import os
import sys
from pathlib import Path


def main(argv=None):
    raiz = Path(__file__).resolve().parent.parent
    sys.path.insert(0, str(raiz))
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "CampoMedio.settings")
    from django.core.management import execute_from_command_line

    execute_from_command_line(["mfd", "mfd", *(sys.argv[1:] if argv is None else argv)])


if __name__ == "__main__":
    main()
