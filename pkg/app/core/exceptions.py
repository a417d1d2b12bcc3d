"""
Jerarquía de errores del toolkit.

Las librerías lanzan; solo la CLI traduce a códigos de salida.
"""
from typing import Optional


class ToolkitError(Exception):
    """Error en tiempo de ejecución (código de salida 2)."""

    exit_code = 2


class InvalidInputError(ToolkitError, ValueError):
    """Entrada o parámetro que viola una precondición (código de salida 1)."""

    exit_code = 1


class ConfigurationError(InvalidInputError):
    """Configuración ausente o inválida."""


class PrivacyParameterError(InvalidInputError):
    """Parámetro de privacidad fuera de rango (ε, escala, sensibilidad)."""


class DatasetError(InvalidInputError):
    """Error de ingesta o de validación de un dataset, con su ubicación."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"fila {row}")
        if column is not None:
            location.append(f"columna '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column


class InsufficientDataError(ToolkitError):
    """Los datos auxiliares no alcanzan para el protocolo pedido."""


class EmptyFocalPointsError(ToolkitError):
    """El modelado sombra no produjo focal-points por encima del umbral."""
