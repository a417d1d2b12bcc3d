"""
Fuente de aleatoriedad reproducible con flujos independientes por nombre.
"""
from typing import Any, Optional, Tuple, Union

import numpy as np

from app.utils.helpers import stable_int

_MASK_64 = (1 << 64) - 1


class RandomSource:
    """
    Generador con semilla y flujo de 64 bits.

    El par (seed, stream) determina la secuencia completa: usa un Philox
    (basado en contador) sembrado con ``SeedSequence(seed, spawn_key=(stream,))``.
    Una instancia tiene un único dueño; los flujos distintos pueden consumirse
    en paralelo.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK_64
        self.stream = int(stream) & _MASK_64
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def derive(self, *labels: Any) -> "RandomSource":
        """Flujo hijo identificado por etiquetas (p. ej. ``"shadow", 3``)."""
        return RandomSource(self.seed, stable_int(self.stream, *labels))

    def uniform(self, size: Optional[Union[int, Tuple[int, ...]]] = None) -> Union[float, np.ndarray]:
        """Uniformes en el intervalo abierto (0, 1)."""
        draws = self.generator.random(size)
        # random() puede devolver 0.0 exacto
        tiny = np.nextafter(0.0, 1.0)
        if size is None:
            return float(draws) if draws > 0.0 else float(tiny)
        return np.where(draws > 0.0, draws, tiny)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, stream={self.stream})"
