from __future__ import annotations

import enum


class LanguageMode(enum.Enum):
    C = "c"
    FORTRAN = "fortran"

    @classmethod
    def parse(cls, text: str | "LanguageMode") -> "LanguageMode":
        if isinstance(text, LanguageMode):
            return text
        key = text.strip().lower()
        aliases = {"c": cls.C, "cmode": cls.C, "fortran": cls.FORTRAN, "f": cls.FORTRAN, "fortranmode": cls.FORTRAN}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown language mode {text!r}") from None

    def __str__(self) -> str:
        return self.value
