"""
Formateadores de salida para el toolkit.
"""
import json
from typing import Any, Dict, List, Sequence


def format_json(data: Any, indent: int = 2) -> str:
    """
    Formatear datos como JSON legible y estable.

    Args:
        data: Datos a formatear
        indent: Indentación del JSON

    Returns:
        String JSON con claves ordenadas y salto de línea final
    """
    return json.dumps(data, indent=indent, sort_keys=True, ensure_ascii=False, default=str) + "\n"


def format_table(rows: Sequence[Dict[str, Any]], columns: List[str]) -> str:
    """
    Formatear filas como tabla de texto alineada.

    Args:
        rows: Filas como diccionarios
        columns: Columnas a mostrar, en orden

    Returns:
        Tabla lista para imprimir en consola
    """
    if not rows:
        return ""

    def cell(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    rendered = [[cell(row.get(column, "")) for column in columns] for row in rows]
    widths = [
        max(len(column), *(len(line[i]) for line in rendered))
        for i, column in enumerate(columns)
    ]
    header = "  ".join(column.ljust(widths[i]) for i, column in enumerate(columns))
    separator = "  ".join("-" * width for width in widths)
    body = ["  ".join(value.ljust(widths[i]) for i, value in enumerate(line)) for line in rendered]
    return "\n".join([header, separator, *body])
