"""
Persistencia de artefactos de ejecución.
"""
from .file_storage import ArtifactStore, build_manifest, load_members, load_model, load_predictions, load_weights

__all__ = ["ArtifactStore", "build_manifest", "load_members", "load_model", "load_predictions", "load_weights"]
