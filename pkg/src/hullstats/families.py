"""Map families and their perimeter/volume normalization constants."""

from __future__ import annotations

import enum
from fractions import Fraction


class Family(enum.Enum):
    """The three map families, with constants ``c`` (perimeter) and ``f`` (volume)."""

    QUADRANGULATION = ("i", Fraction(1, 3), 36)
    TRIANGULATION = ("ii", Fraction(1, 2), 192)
    EULERIAN_TRIANGULATION = ("iii", Fraction(1, 4), 16)

    def __init__(self, roman: str, c: Fraction, f: int):
        self.roman = roman
        self.c_exact = c
        self.f_exact = Fraction(f)

    @property
    def c(self) -> float:
        return float(self.c_exact)

    @property
    def f(self) -> float:
        return float(self.f_exact)

    @classmethod
    def parse(cls, text: "str | Family") -> "Family":
        if isinstance(text, Family):
            return text
        key = str(text).strip().lower()
        for fam in cls:
            if key in (fam.roman, fam.name.lower(), fam.name.lower().replace("_", "")):
                return fam
        aliases = {"quad": cls.QUADRANGULATION, "tri": cls.TRIANGULATION,
                   "euler": cls.EULERIAN_TRIANGULATION, "eulerian": cls.EULERIAN_TRIANGULATION,
                   "1": cls.QUADRANGULATION, "2": cls.TRIANGULATION, "3": cls.EULERIAN_TRIANGULATION}
        if key in aliases:
            return aliases[key]
        raise ValueError(f"unknown map family {text!r}; use i, ii or iii")


QUAD = Family.QUADRANGULATION
