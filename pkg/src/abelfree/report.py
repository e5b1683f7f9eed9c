"""Machine-readable decision reports.

A report is a plain dict-like record that serialises to JSON and back.
Witnesses are stored as words plus block boundaries so that a loaded report
can be rechecked with the brute-force oracle without any other state.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import oracle

AVOIDED = "AVOIDED"
REALIZED = "REALIZED"
INAPPLICABLE = "INAPPLICABLE"
RESOURCE_EXCEEDED = "RESOURCE_EXCEEDED"
CLEAN = "CLEAN"           # oracle scan found nothing
FOUND = "FOUND"           # oracle scan found a power

EXIT_CODES = {AVOIDED: 0, CLEAN: 0, REALIZED: 1, FOUND: 1, INAPPLICABLE: 2, RESOURCE_EXCEEDED: 4}
EXIT_PARSE_ERROR = 3

SCHEMA_VERSION = 1


def exit_code(verdict: str) -> int:
    return EXIT_CODES[verdict]


@dataclass
class Witness:
    """``word[boundaries[j]:boundaries[j+1]]`` are the ``k`` blocks of a power.

    ``letters`` decodes the word; ``mode`` selects the equivalence
    (``abelian``, ``modulo`` with matrix ``F`` and ``uniform``, or
    ``kabelian`` with ``window``).  ``template`` describes the realized
    template when the witness comes from the template procedure.
    """

    word: str
    letters: list
    boundaries: list
    k: int
    mode: str = oracle.ABELIAN
    F: list | None = None
    uniform: bool = False
    window: int = 1
    template: str | None = None
    borders: list = field(default_factory=list)   # positions of letter borders, if any

    def encoded(self) -> list:
        index = {a: i for i, a in enumerate(self.letters)}
        if all(len(a) == 1 for a in self.letters):
            return [index[c] for c in self.word]
        return [index[t] for t in self.word.split()]

    def check(self) -> bool:
        """Recheck the blocks from scratch with the oracle's definition."""
        w = self.encoded()
        b = tuple(self.boundaries)
        period = b[1] - b[0] if len(b) > 1 else 0
        wit = oracle.PowerWitness(b[0], period, self.k, self.mode, self.window, cuts=b)
        return oracle.validate(w, wit, F=self.F, uniform=self.uniform)


@dataclass
class DecisionReport:
    command: str
    verdict: str
    morphism: dict
    k: int
    certificate: dict = field(default_factory=dict)
    witness: Witness | None = None
    reason: str = ""
    timings: dict = field(default_factory=dict)
    schema: int = SCHEMA_VERSION

    @property
    def exit_code(self) -> int:
        return exit_code(self.verdict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["exit_code"] = self.exit_code
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionReport":
        d = dict(d)
        d.pop("exit_code", None)
        w = d.get("witness")
        if w is not None:
            d["witness"] = Witness(**w)
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "DecisionReport":
        return cls.from_dict(json.loads(text))

    def validate(self) -> bool:
        """Structural check: REALIZED carries a valid witness, AVOIDED a full certificate."""
        if self.verdict in (REALIZED, FOUND):
            return self.witness is not None and self.witness.check()
        if self.verdict == AVOIDED:
            return all(self.certificate.get(key) is not None for key in AVOIDED_FIELDS.get(self.command, ()))
        return True


AVOIDED_FIELDS = {
    "check-abelian": ("bounds", "power", "parents_of_seed", "closure_size", "threshold", "factors_scanned"),
    "check-additive": ("bounds", "power", "candidates", "closure_size", "threshold", "factors_scanned"),
    "check-long-abelian": ("bounds", "power", "candidates", "closure_size", "threshold", "factors_scanned",
                           "short_periods"),
}


def fraction_str(x: Fraction) -> str:
    return str(Fraction(x))


def bounds_entry(profile) -> dict:
    """Per contracting index: eigenvalue estimate and the exact template bound."""
    sd = profile.spectral
    out = {}
    for i in profile.indices:
        lam = sd.eigenvalue(i).approx
        out[str(i)] = {
            "eigenvalue": [lam.real, lam.imag],
            "factor_bound": fraction_str(profile.m[i]),
            "rstar": fraction_str(profile.rstar[i]),
            "rstar_float": float(profile.rstar[i]),
        }
    return out


def morphism_entry(h) -> dict:
    return {
        "name": h.name,
        "alphabet": list(h.source.letters),
        "target": list(h.target.letters),
        "images": {a: h.image_str(i) for i, a in enumerate(h.source.letters)},
    }
