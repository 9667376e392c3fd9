"""Errores de dominio del motor numérico.

Heredan de las excepciones estándar para que el código cliente pueda
capturarlas de forma genérica (ValueError / RuntimeError).
"""


class ErrorDimension(ValueError):
    """Dimensiones incompatibles, slot fuera de rango o tope denso superado."""


class ErrorHermiticidad(ValueError):
    """Una matriz marcada hermítica o densidad no cumple la tolerancia."""


class ErrorModelo(ValueError):
    """El modelo no cumple una precondición (simétrico, conservativo, ...)."""


class CondicionA0Violada(ValueError):
    """Algún momento impar libre de G_j no se anula en el estado inicial."""

    def __init__(self, particula, valor):
        self.particula = particula
        self.valor = valor
        super().__init__(
            f"Momento impar no nulo en la partícula {particula}: |μ| = {valor:.3e}"
        )


class ErrorTruncamiento(RuntimeError):
    """La población de los dos niveles de Fock superiores supera la tolerancia."""


class ErrorCuadratura(RuntimeError):
    """La cuadratura no alcanzó la tolerancia pedida tras refinar."""
