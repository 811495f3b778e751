"""Mod-p Hecke operators on definite quaternion algebras."""

from ._qhecke import (
    algebra,
    class_set,
    eigensystems,
    hecke_level1,
    hecke_weight,
)

__all__ = ["algebra", "class_set", "eigensystems", "hecke_level1", "hecke_weight"]
