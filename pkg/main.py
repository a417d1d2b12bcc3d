#!/usr/bin/env python3
"""
Punto de entrada principal del toolkit de inferencia de pertenencia.
"""
import sys

from app.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
