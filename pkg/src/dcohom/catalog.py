"""Named space catalog with golden de Rham dimensions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .spaces import SpaceSpec, affine, localized, product, torus


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: SpaceSpec
    expected: tuple[int, ...] | None = None


CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry("affine1", affine(1), (1, 0)),
    CatalogEntry("affine2", affine(2), (1, 0, 0)),
    CatalogEntry("torus1", torus(1), (1, 1)),
    CatalogEntry("torus2", torus(2), (1, 2, 1)),
    CatalogEntry("localized_x2p1", localized({2: Fraction(1), 0: Fraction(1)}), (1, 2)),
    CatalogEntry("torus1_x_affine1", product(torus(1), affine(1)), (1, 1, 0)),
)


def catalog_entry(name: str) -> CatalogEntry | None:
    for entry in CATALOG:
        if entry.name == name:
            return entry
    return None
