"""Esquema de las configuraciones de corrida (documentos JSON).

Los datos validados quedan en tipos nativos de JSON (los complejos como
pares [re, im]) para poder reenviarlos tal cual a los workers de Celery.
"""

from math import isfinite, prod

from django.conf import settings
from rest_framework import serializers

from apps.base.services.cuadratura import METODOS, MONTE_CARLO, NESTED_GAUSS
from apps.base.services.presets import PRESETS
from apps.modelo.services.sistema import ESTADOS_RESERVORIO, TERMICO, VACIO
from apps.reservorio.services.gaussiano import IDENTIDAD, PRODUCTO_CAMPOS, TIPOS_OBSERVABLE

TAREA_ORACULO = "oracle"
TAREA_DYSON = "dyson"
TAREA_LIMITES = "limits"
TAREA_FORMA_CERRADA = "closed-form"
TAREA_CERTIFICADO = "certify"
TAREA_FLUCTUACIONES = "fluctuations"
TAREA_COMPARAR = "compare"
TAREAS = (
    TAREA_ORACULO,
    TAREA_DYSON,
    TAREA_LIMITES,
    TAREA_FORMA_CERRADA,
    TAREA_CERTIFICADO,
    TAREA_FLUCTUACIONES,
    TAREA_COMPARAR,
)

FORMULAS = (
    "energy-conserving",
    "weyl",
    "number",
    "dicke",
    "fluctuations",
    "leading-order",
)

PRESETS_MODELO = ("espin", "dicke", "defasaje", "tridiagonal")

# Parámetros obligatorios por preset de modelo
_PARAMETROS_PRESET = {
    "espin": ("omega0", "beta"),
    "dicke": ("omega0", "p"),
    "defasaje": ("omega0",),
    "tridiagonal": ("energias", "saltos", "beta"),
}

EJES = ("N", "lambda", "t", "cutoff")


class FinitoField(serializers.FloatField):
    """Flotante que rechaza inf y nan (JSON de Python los acepta)."""

    default_error_messages = {"no_finito": "Los parámetros físicos deben ser finitos."}

    def to_internal_value(self, data):
        valor = super().to_internal_value(data)
        if not isfinite(valor):
            self.fail("no_finito")
        return valor


class ComplejoField(serializers.Field):
    """Número complejo escrito como real, como [re, im] o como {"re", "im"}."""

    default_error_messages = {
        "invalido": "Se esperaba un número, un par [re, im] o {{re, im}}.",
        "no_finito": "Los parámetros físicos deben ser finitos.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail("invalido")
        if isinstance(data, (int, float)):
            par = [float(data), 0.0]
        elif isinstance(data, (list, tuple)) and len(data) == 2:
            par = data
        elif isinstance(data, dict) and set(data) <= {"re", "im"}:
            par = [data.get("re", 0.0), data.get("im", 0.0)]
        else:
            self.fail("invalido")
        try:
            par = [float(x) for x in par]
        except (TypeError, ValueError):
            self.fail("invalido")
        if not all(isfinite(x) for x in par):
            self.fail("no_finito")
        return par

    def to_representation(self, value):
        return [float(value[0]), float(value[1])]


class MatrizSerializer(serializers.Serializer):
    """Matriz por preset con nombre o por entradas aplanadas (fila mayor)."""

    preset = serializers.ChoiceField(choices=PRESETS, required=False)
    dims = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, min_length=1)
    entradas = serializers.ListField(child=ComplejoField(), required=False)

    def validate(self, data):
        if ("preset" in data) == ("entradas" in data):
            raise serializers.ValidationError("Indique un preset o las entradas, no ambos.")
        if "entradas" in data:
            dims = data.get("dims")
            if not dims:
                raise serializers.ValidationError({"dims": "Las entradas necesitan dims declaradas."})
            if len(data["entradas"]) != prod(dims) ** 2:
                raise serializers.ValidationError(
                    {"entradas": f"Se esperaban {prod(dims) ** 2} entradas para dims {dims}."}
                )
        return data


class ParticulaSerializer(serializers.Serializer):
    h = MatrizSerializer()
    G = MatrizSerializer()
    mu = MatrizSerializer()


class ReservorioSerializer(serializers.Serializer):
    tipo = serializers.ChoiceField(choices=("fock", "acotado"), default="fock")
    # fock
    frecuencias = serializers.ListField(child=FinitoField(), required=False, min_length=1)
    form_factor = serializers.ListField(child=ComplejoField(), required=False)
    pesos = serializers.ListField(child=FinitoField(min_value=0.0), required=False)
    cortes = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, min_length=1)
    estado = serializers.ChoiceField(choices=ESTADOS_RESERVORIO, default=VACIO)
    beta = FinitoField(required=False)
    alfas = serializers.ListField(child=ComplejoField(), required=False)
    acoplamientos = serializers.ListField(
        child=serializers.ListField(child=ComplejoField(), min_length=1), required=False, min_length=1
    )
    # acotado
    H_r = MatrizSerializer(required=False)
    B = MatrizSerializer(many=True, required=False)
    rho = MatrizSerializer(required=False)

    def validate(self, data):
        if data["tipo"] == "acotado":
            faltan = [clave for clave in ("H_r", "B", "rho") if clave not in data]
            if faltan:
                raise serializers.ValidationError(f"Un reservorio acotado necesita {', '.join(faltan)}.")
            return data
        for clave in ("frecuencias", "cortes"):
            if clave not in data:
                raise serializers.ValidationError({clave: "Campo obligatorio para un reservorio de Fock."})
        K = len(data["frecuencias"])
        data.setdefault("form_factor", [[1.0, 0.0]] * K)
        for clave in ("form_factor", "pesos", "alfas"):
            if clave in data and len(data[clave]) != K:
                raise serializers.ValidationError({clave: f"Se esperaba un valor por modo ({K})."})
        if len(data["cortes"]) not in (1, K):
            raise serializers.ValidationError({"cortes": "Un corte común o uno por modo."})
        if data["estado"] == TERMICO and not data.get("beta", 0) > 0:
            raise serializers.ValidationError({"beta": "El estado térmico necesita β > 0."})
        return data


class CampoObservableSerializer(serializers.Serializer):
    tipo = serializers.ChoiceField(choices=TIPOS_OBSERVABLE, default=IDENTIDAD)
    amplitudes = serializers.ListField(
        child=serializers.ListField(child=ComplejoField(), min_length=1), required=False, default=list
    )
    norma = FinitoField(required=False, min_value=0.0)

    def validate(self, data):
        if data["tipo"] == PRODUCTO_CAMPOS and not data["amplitudes"]:
            raise serializers.ValidationError({"amplitudes": "El producto de campos necesita amplitudes."})
        return data


class ModeloSerializer(serializers.Serializer):
    preset = serializers.ChoiceField(choices=PRESETS_MODELO, required=False)
    omega0 = FinitoField(required=False)
    beta = FinitoField(required=False, min_value=0.0)
    p = FinitoField(required=False, min_value=0.0, max_value=1.0)
    G = serializers.ChoiceField(choices=PRESETS, required=False)
    energias = serializers.ListField(child=FinitoField(), required=False)
    saltos = serializers.ListField(child=FinitoField(), required=False)
    particulas = ParticulaSerializer(many=True, required=False)
    reservorio = ReservorioSerializer()
    acoplamiento = FinitoField(default=0.0)

    def validate(self, data):
        if ("preset" in data) == ("particulas" in data):
            raise serializers.ValidationError("Indique un preset de modelo o la lista de partículas.")
        if "preset" in data:
            faltan = [p for p in _PARAMETROS_PRESET[data["preset"]] if p not in data]
            if faltan:
                raise serializers.ValidationError(
                    f"El preset {data['preset']} necesita {', '.join(faltan)}."
                )
        elif not data["particulas"]:
            raise serializers.ValidationError({"particulas": "Se necesita al menos una partícula."})
        return data


class ObservableSerializer(serializers.Serializer):
    """A = A_S ⊗ A_r. `sistema` es la lista de factores por partícula (o una
    sola matriz con dims de varias partículas)."""

    sistema = MatrizSerializer(many=True, required=False)
    campo = CampoObservableSerializer(required=False)
    matriz_reservorio = MatrizSerializer(required=False)

    def validate(self, data):
        if "campo" in data and "matriz_reservorio" in data:
            raise serializers.ValidationError("A_r va como campo o como matriz, no ambos.")
        return data


class CuadraturaSerializer(serializers.Serializer):
    metodo = serializers.ChoiceField(choices=METODOS, default=NESTED_GAUSS)
    orden = serializers.IntegerField(min_value=2, required=False)
    muestras = serializers.IntegerField(min_value=1000, required=False)
    semilla = serializers.IntegerField(min_value=0, required=False)
    tolerancia = FinitoField(min_value=0.0, default=1e-6)
    refinamientos = serializers.IntegerField(min_value=0, default=1)


class TareaSerializer(serializers.Serializer):
    tipo = serializers.ChoiceField(choices=TAREAS)
    formula = serializers.ChoiceField(choices=FORMULAS, required=False)
    proveedor = serializers.ChoiceField(choices=("wick", "fock"), required=False)
    convencion = serializers.ChoiceField(choices=("ancilla", "literal"), default="ancilla")
    forma = serializers.ChoiceField(choices=("derivada", "literal"), default="derivada")
    limite = serializers.BooleanField(default=False)
    h = serializers.ListField(child=ComplejoField(), required=False)

    def validate(self, data):
        if data["tipo"] == TAREA_FORMA_CERRADA and "formula" not in data:
            raise serializers.ValidationError({"formula": "La tarea closed-form necesita la fórmula."})
        if data.get("formula") == "weyl" and "h" not in data:
            raise serializers.ValidationError({"h": "weyl_limit necesita las amplitudes h."})
        return data


class NumericoSerializer(serializers.Serializer):
    tiempos = serializers.ListField(child=FinitoField(min_value=0.0), min_length=1)
    N = serializers.ListField(child=serializers.IntegerField(min_value=1), default=lambda: [2], min_length=1)
    nu_max = serializers.IntegerField(min_value=0, required=False)
    r_max = serializers.IntegerField(min_value=0, default=4)
    cuadratura = CuadraturaSerializer(required=False)
    semilla = serializers.IntegerField(min_value=0, required=False)
    corte_ancilla = serializers.IntegerField(min_value=1, required=False)
    referencia = ComplejoField(required=False)

    def validate_r_max(self, value):
        tope = int(getattr(settings, "MFD_R_MAXIMO", 8))
        if value > tope:
            raise serializers.ValidationError(f"r_max supera el tope configurado ({tope}).")
        return value

    def validate(self, data):
        cuadratura = data.setdefault("cuadratura", {"metodo": NESTED_GAUSS, "tolerancia": 1e-6, "refinamientos": 1})
        if cuadratura["metodo"] == MONTE_CARLO and "semilla" not in cuadratura and "semilla" not in data:
            raise serializers.ValidationError({"semilla": "Monte Carlo necesita semilla explícita."})
        return data


class SalidaSerializer(serializers.Serializer):
    directorio = serializers.CharField(default="resultados")
    prefijo = serializers.RegexField(r"^[\w.-]+$", required=False)


class RunConfigSerializer(serializers.Serializer):
    modelo = ModeloSerializer()
    observable = ObservableSerializer(required=False, default=dict)
    tarea = TareaSerializer()
    numerico = NumericoSerializer()
    salida = SalidaSerializer(required=False, default=dict)

    def validate(self, data):
        salida = data["salida"] or {}
        salida.setdefault("directorio", "resultados")
        salida.setdefault("prefijo", data["tarea"]["tipo"])
        data["salida"] = salida
        if data["tarea"]["tipo"] == TAREA_FLUCTUACIONES and len(data["observable"].get("sistema") or []) != 1:
            raise serializers.ValidationError(
                {"observable": "Las fluctuaciones miden un observable de una sola partícula."}
            )
        return data
