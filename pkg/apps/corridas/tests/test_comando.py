import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from apps.corridas.services.salida import COLUMNAS
from apps.corridas.tests.utils import configuracion, escribir_config, leer_csv


class ComandoMfdTests(SimpleTestCase):
    def setUp(self):
        temporal = tempfile.TemporaryDirectory()
        self.addCleanup(temporal.cleanup)
        self.dir = Path(temporal.name)

    def _correr(self, *args, datos=None):
        ruta = escribir_config(self.dir, datos or configuracion())
        salida = StringIO()
        call_command("mfd", args[0], ruta, "--out", str(self.dir / "out"), "--threads", "1", *args[1:], stdout=salida)
        return salida.getvalue()

    def test_run_escribe_csv_y_reporte(self):
        mensaje = self._correr("run")
        self.assertIn("Escrito", mensaje)
        cabecera, filas = leer_csv(self.dir / "out" / "prueba.csv")
        self.assertTrue(cabecera.startswith("# generado: "))
        self.assertEqual(tuple(filas[0].keys()), COLUMNAS)
        self.assertEqual(len(filas), 2)
        self.assertEqual({f["task"] for f in filas}, {"oracle"})
        self.assertEqual([f["N"] for f in filas], ["2", "2"])
        self.assertEqual([f["certified"] for f in filas], ["true", "true"])
        reporte = (self.dir / "out" / "prueba.txt").read_text(encoding="utf-8")
        self.assertIn("[configuracion]", reporte)
        self.assertIn("[certificacion]", reporte)

    def test_sin_acoplamiento_da_la_base(self):
        datos = configuracion()
        datos["modelo"]["acoplamiento"] = 0.0
        self._correr("run", datos=datos)
        _, filas = leer_csv(self.dir / "out" / "prueba.csv")
        for fila in filas:
            self.assertAlmostEqual(float(fila["value_re"]), -np.tanh(0.5), places=12)

    def test_corridas_repetidas_son_identicas(self):
        datos = configuracion(tarea={"tipo": "dyson"}, numerico={"tiempos": [0.7], "N": [2], "r_max": 2})
        ruta = escribir_config(self.dir, datos)
        call_command("mfd", "run", ruta, "--out", str(self.dir / "a"), "--threads", "1", stdout=StringIO())
        call_command("mfd", "run", ruta, "--out", str(self.dir / "b"), "--threads", "1", stdout=StringIO())
        primera = (self.dir / "a" / "prueba.csv").read_text(encoding="utf-8").splitlines()
        segunda = (self.dir / "b" / "prueba.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(primera[1:], segunda[1:])

    def test_certify(self):
        self._correr("certify")
        _, filas = leer_csv(self.dir / "out" / "prueba-certify.csv")
        self.assertEqual({f["task"] for f in filas}, {"certify"})
        self.assertEqual(filas[0]["N"], "")
        # λ = 0.1, t = 0.5 en el vacío: margen (A1) = 2λt
        self.assertAlmostEqual(float(filas[0]["value_re"]), 0.1, places=12)

    def test_sweep_en_N(self):
        datos = configuracion(tarea={"tipo": "compare"}, numerico={"tiempos": [1.0], "N": [2], "nu_max": 1, "r_max": 2})
        self._correr("sweep", "--axis", "N", "--values", "2,3", datos=datos)
        _, filas = leer_csv(self.dir / "out" / "prueba-barrido-N.csv")
        self.assertEqual([(f["task"], f["N"]) for f in filas], [("oracle", "2"), ("expansion", "2"), ("oracle", "3"), ("expansion", "3")])
        reporte = (self.dir / "out" / "prueba-barrido-N.txt").read_text(encoding="utf-8")
        self.assertIn("[barrido]", reporte)
        self.assertIn("pendiente_loglog", reporte)

    def test_sweep_en_cutoff_converge(self):
        self._correr("sweep", "--axis", "cutoff", "--values", "6,10,14")
        reporte = (self.dir / "out" / "prueba-barrido-cutoff.txt").read_text(encoding="utf-8")
        self.assertIn("truncamiento_convergido: True", reporte)

    def test_tiempos_vacios(self):
        datos = configuracion(numerico={"tiempos": [], "N": [2]})
        with self.assertRaises(CommandError) as contexto:
            self._correr("run", datos=datos)
        self.assertEqual(contexto.exception.returncode, 2)

    def test_json_ilegible(self):
        ruta = self.dir / "rota.json"
        ruta.write_text("{modelo:", encoding="utf-8")
        with self.assertRaises(CommandError) as contexto:
            call_command("mfd", "run", str(ruta), stdout=StringIO())
        self.assertEqual(contexto.exception.returncode, 2)

    def test_valores_de_barrido_invalidos(self):
        with self.assertRaises(CommandError) as contexto:
            self._correr("sweep", "--axis", "N", "--values", "dos,tres")
        self.assertEqual(contexto.exception.returncode, 2)

    def test_cutoff_sobre_reservorio_acotado(self):
        datos = configuracion()
        datos["modelo"]["reservorio"] = {
            "tipo": "acotado",
            "H_r": {"preset": "pauli-z"},
            "B": [{"preset": "pauli-x"}],
            "rho": {"dims": [2], "entradas": [0.5, 0, 0, 0.5]},
        }
        with self.assertRaises(CommandError) as contexto:
            self._correr("sweep", "--axis", "cutoff", "--values", "4", datos=datos)
        self.assertEqual(contexto.exception.returncode, 2)

    def test_condicion_A0_violada(self):
        datos = configuracion(tarea={"tipo": "compare"}, numerico={"tiempos": [1.0], "N": [2], "nu_max": 0, "r_max": 2})
        datos["modelo"] = {
            "particulas": [{
                "h": {"preset": "pauli-z"},
                "G": {"preset": "pauli-z"},
                "mu": {"dims": [2], "entradas": [0.9, 0, 0, 0.1]},
            }],
            "acoplamiento": 0.1,
            "reservorio": {"frecuencias": [1.0], "cortes": [6]},
        }
        with self.assertRaises(CommandError) as contexto:
            self._correr("run", datos=datos)
        self.assertEqual(contexto.exception.returncode, 3)
        self.assertIn("partícula 1", str(contexto.exception))

    @override_settings(MFD_DIMENSION_MAXIMA=4)
    def test_fallo_numerico(self):
        with self.assertRaises(CommandError) as contexto:
            self._correr("run")
        self.assertEqual(contexto.exception.returncode, 4)
