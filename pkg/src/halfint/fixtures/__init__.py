"""Expansions transcribed from published examples, shipped as package data.

=====================  ===================================================
name                   contents
=====================  ===================================================
level8_f               weight 7/2, level 8, trivial character
theta                  Theta to O(q^12)
level8_fTheta          level8_f * theta, weight 4, level 8
ex364_f1, ex364_f2     basis of S_{3/2}(364, triv, F), F of level 91
ex52_f1, ex52_f2       basis of S_{5/2}(52, chi_13, G) over Q(b), b^2 = b + 4
newform91_F            newform of weight 2, level 91
newform13_G            newform of weight 4, level 13 over Q(b)
=====================  ===================================================
"""

from importlib import resources

from ..io import parse_qexp, parse_coeff


def names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir()
                  if p.name.endswith(".qexp"))


def text(name: str) -> str:
    return resources.files(__name__).joinpath(name + ".qexp").read_text(encoding="utf-8")


def path(name: str):
    return resources.files(__name__).joinpath(name + ".qexp")


def load(name: str):
    return parse_qexp(text(name))


def eigenvalues(name: str) -> dict:
    """Hecke eigenvalue table {p: lambda_p} shipped next to a newform fixture."""
    F = load(name)
    table = resources.files(__name__).joinpath(name + ".eigenvalues").read_text(encoding="utf-8")
    out = {}
    for lineno, line in enumerate(table.splitlines(), 1):
        if not line or line.startswith("#"):
            continue
        p, value = line.split("\t")
        out[int(p)] = parse_coeff(value, F.field, lineno)
    return out
