"""Case files: INI text with a single ``[case]`` section.

    [case]
    p = 2
    s = 1
    r = 1
    pbasis = b
    precision = 64
    embedding = t^2*(1+b*t)
    character = t^-3
    trials = 20
    seed = 0

``character`` lists the components a_{s-1}, ..., a_0 separated by commas,
written in the uniformizer t of K.  ``embedding`` is the image of pi_K in
l((t)).  Every field except ``p`` is optional.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import InputError
from .extfield import CharacterSpec, EmbeddingSpec, parse_breaks
from .parser import as_series, parse_expr
from .scalars import ResidueField, default_names
from .series import DEFAULT_MIN_PRECISION, default_precision, precision as precision_context
from .witt import WittVec

SECTION = "case"
_KNOWN = {"p", "s", "r", "pbasis", "precision", "embedding", "character", "breaks", "trials", "seed"}


@dataclass
class CaseFile:
    p: int
    s: int = 1
    r: int = 0
    pbasis: tuple = ()
    precision: int = field(default_factory=default_precision)
    embedding: str | None = None
    character: tuple | None = None
    breaks: str | None = None
    trials: int = 0
    seed: int = 0
    name: str = "case"

    def __post_init__(self):
        if not self.pbasis:
            self.pbasis = default_names(self.r)
        self.pbasis = tuple(self.pbasis)
        if len(self.pbasis) != self.r:
            raise InputError(f"pbasis lists {len(self.pbasis)} names but r = {self.r}")
        if self.precision < DEFAULT_MIN_PRECISION:
            raise InputError(f"precision must be at least {DEFAULT_MIN_PRECISION}")
        if self.character is not None and len(self.character) != self.s:
            raise InputError(f"character has {len(self.character)} components but s = {self.s}")
        if self.s < 1 or self.trials < 0:
            raise InputError("s must be positive and trials nonnegative")

    def field_k(self):
        return ResidueField(self.p)

    def field_l(self):
        return ResidueField(self.p, self.pbasis)

    def embedding_spec(self):
        if self.embedding is None:
            return None
        L = self.field_l()
        with precision_context(self.precision):
            f = as_series(parse_expr(self.embedding, field=L), L)
        return EmbeddingSpec(f)

    def character_spec(self):
        if self.character is None:
            return None
        K = self.field_k()
        with precision_context(self.precision):
            comps = [as_series(parse_expr(c, field=K), K) for c in self.character]
        return CharacterSpec(WittVec(self.p, comps))

    def psi_breaks(self):
        return None if self.breaks is None else parse_breaks(self.breaks)


def _int(section, key, default):
    try:
        return section.getint(key, fallback=default)
    except ValueError:
        raise InputError(f"{key} must be an integer") from None


def parse_case(text, name="case"):
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InputError(f"malformed case file: {exc}") from None
    if not cp.has_section(SECTION):
        raise InputError(f"case file needs a [{SECTION}] section")
    sec = cp[SECTION]
    unknown = set(sec) - _KNOWN
    if unknown:
        raise InputError(f"unknown case fields: {', '.join(sorted(unknown))}")
    if "p" not in sec:
        raise InputError("case file must set p")
    pbasis = tuple(n.strip() for n in sec.get("pbasis", "").split(",") if n.strip())
    r = _int(sec, "r", len(pbasis))
    character = sec.get("character")
    return CaseFile(
        p=_int(sec, "p", None),
        s=_int(sec, "s", len(character.split(",")) if character else 1),
        r=r,
        pbasis=pbasis,
        precision=_int(sec, "precision", default_precision()),
        embedding=sec.get("embedding"),
        character=tuple(c.strip() for c in character.split(",")) if character else None,
        breaks=sec.get("breaks"),
        trials=_int(sec, "trials", 0),
        seed=_int(sec, "seed", 0),
        name=name,
    )


def bundled_names():
    root = resources.files("swanlab") / "data" / "cases"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def bundled_text(name):
    return (resources.files("swanlab") / "data" / "cases" / f"{name}.ini").read_text()


def load_case(ref):
    """Load a case from a path, or a bundled case by name."""
    path = Path(ref)
    if path.is_file():
        return parse_case(path.read_text(), name=path.stem)
    if ref in bundled_names():
        return parse_case(bundled_text(ref), name=ref)
    raise InputError(f"no case file or bundled case named {ref!r}")
