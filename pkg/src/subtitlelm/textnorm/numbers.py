"""Dutch cardinal and ordinal verbalization in split form.

Numbers are written as separate tokens rather than one agglutinated word,
e.g. 274 -> ``twee honderd vier-en zeventig`` instead of
``tweehonderdvierenzeventig``.  Splitting keeps the vocabulary small and
lets a language model generalize to numbers it never saw.
"""

from __future__ import annotations

import re

UNITS = [
    "nul", "een", "twee", "drie", "vier", "vijf", "zes", "zeven", "acht",
    "negen", "tien", "elf", "twaalf", "dertien", "veertien", "vijftien",
    "zestien", "zeventien", "achttien", "negentien",
]
TENS = {
    2: "twintig", 3: "dertig", 4: "veertig", 5: "vijftig",
    6: "zestig", 7: "zeventig", 8: "tachtig", 9: "negentig",
}

# (value, word) from large to small; 10**3 handled by the same loop
SCALES = [(10**9, "miljard"), (10**6, "miljoen"), (10**3, "duizend")]

MAX_NUMBER = 10**12  # exclusive

# ordinal forms that are not simply word + "de"/"ste"
_IRREGULAR_ORDINALS = {"een": "eerste", "drie": "derde", "acht": "achtste"}
_STE_ENDINGS = ("tig", "honderd", "duizend", "miljoen", "miljard")

ORDINAL_RE = re.compile(r"^(\d+)(e|de|ste)$")
DECIMAL_RE = re.compile(r"^\d+(,\d+)+$")
THOUSANDS_RE = re.compile(r"^\d{1,3}(\.\d{3})+$")
DOTTED_RE = re.compile(r"^\d+(\.\d+)+$")


class NumberTooLarge(ValueError):
    """Raised for numbers outside the supported magnitude."""

    def __init__(self, value: int):
        super().__init__(f"{value} is not below {MAX_NUMBER}")
        self.value = value


def _below_100(n: int) -> list[str]:
    if n < 20:
        return [UNITS[n]]
    tens, unit = divmod(n, 10)
    if unit == 0:
        return [TENS[tens]]
    return [UNITS[unit] + "-en", TENS[tens]]


def _below_1000(n: int) -> list[str]:
    hundreds, rest = divmod(n, 100)
    words: list[str] = []
    if hundreds == 1:
        words.append("honderd")
    elif hundreds > 1:
        words += [UNITS[hundreds], "honderd"]
    if rest:
        words += _below_100(rest)
    return words


def cardinal(n: int) -> list[str]:
    """Return the split Dutch cardinal for ``0 <= n < 10**12``."""
    if n < 0:
        raise ValueError("negative numbers are not verbalized")
    if n >= MAX_NUMBER:
        raise NumberTooLarge(n)
    if n == 0:
        return ["nul"]
    words: list[str] = []
    for value, name in SCALES:
        q, n = divmod(n, value)
        if not q:
            continue
        if q == 1 and value == 1000:
            # "duizend", not "een duizend"
            words.append(name)
        else:
            words += _below_1000(q) + [name]
    if n:
        words += _below_1000(n)
    return words


def ordinal(n: int) -> list[str]:
    words = cardinal(n)
    stem = words[-1]
    if stem in _IRREGULAR_ORDINALS:
        words[-1] = _IRREGULAR_ORDINALS[stem]
    elif stem.endswith(_STE_ENDINGS):
        words[-1] = stem + "ste"
    else:
        words[-1] = stem + "de"
    return words


def digits(s: str) -> list[str]:
    """Read a digit string one digit at a time."""
    return [UNITS[int(c)] for c in s]


def integer(s: str) -> list[str]:
    # leading zeros mark codes/phone numbers, read digit by digit
    if len(s) > 1 and s[0] == "0":
        return digits(s)
    return cardinal(int(s))


def verbalize(token: str) -> list[str] | None:
    """Verbalize a numeric token, or return None if it is not one.

    Handles plain cardinals, ordinals with a suffix (``2e``, ``1ste``,
    ``3de``), comma decimals (``3,5`` -> ``drie komma vijf``), dotted
    thousands (``1.000``) and other dotted digit groups (``1.2`` ->
    ``een punt twee``).  Raises NumberTooLarge for magnitudes >= 10**12.
    """
    if token.isdigit() and token.isascii():
        return integer(token)
    m = ORDINAL_RE.match(token)
    if m:
        return ordinal(int(m.group(1)))
    if DECIMAL_RE.match(token):
        out: list[str] = []
        for i, group in enumerate(token.split(",")):
            if i:
                out.append("komma")
            out += integer(group)
        return out
    if THOUSANDS_RE.match(token):
        return cardinal(int(token.replace(".", "")))
    if DOTTED_RE.match(token):
        out = []
        for i, group in enumerate(token.split(".")):
            if i:
                out.append("punt")
            out += integer(group)
        return out
    return None
