"""Free-group word arithmetic over a fixed finite alphabet.

Words are kept freely reduced at all times: every constructor and every
operation reduces eagerly, so downstream code may assume reduced form.
All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import AlphabetMismatch, InputError

Letter = tuple[int, int]  # (generator index, sign in {+1, -1})

_FORBIDDEN_IN_NAMES = set("^-,*() \t\n") | set("0123456789")


@dataclass(frozen=True)
class Alphabet:
    """Generator names of a free group; equality is structural."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.names) < 1:
            raise InputError("an alphabet needs at least one generator")
        if len(set(self.names)) != len(self.names):
            raise InputError("generator names must be pairwise distinct")
        for nm in self.names:
            if not nm or any(c in _FORBIDDEN_IN_NAMES for c in nm):
                raise InputError(f"unusable generator name: {nm!r}")

    @classmethod
    def of(cls, *names: str) -> "Alphabet":
        return cls(tuple(names))

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown generator {name!r}") from None


#: default rank-2 alphabet used by `power_word` and most fixtures
XY = Alphabet.of("x", "y")


def _reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for idx, sg in letters:
        if sg not in (1, -1):
            raise InputError(f"letter sign must be +1 or -1, got {sg}")
        if out and out[-1][0] == idx and out[-1][1] == -sg:
            out.pop()
        else:
            out.append((idx, sg))
    return tuple(out)


class Word:
    """A freely reduced word; letters are (generator index, sign) pairs."""

    __slots__ = ("alphabet", "letters", "_hash")

    def __init__(self, alphabet: Alphabet, letters: Iterable[Letter] = ()):
        self.alphabet = alphabet
        self.letters = _reduce(letters)
        for idx, _ in self.letters:
            if not 0 <= idx < alphabet.size:
                raise InputError(f"letter index {idx} out of range")
        self._hash = None

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Word":
        return cls(alphabet)

    @classmethod
    def gen(cls, alphabet: Alphabet, index: int, sign: int = 1) -> "Word":
        return cls(alphabet, [(index, sign)])

    def is_identity(self) -> bool:
        return not self.letters

    def is_cyclically_reduced(self) -> bool:
        if len(self.letters) < 2:
            return True
        (i0, s0), (i1, s1) = self.letters[0], self.letters[-1]
        return not (i0 == i1 and s0 == -s1)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return Word(self.alphabet, [(i, -s) for i, s in reversed(self.letters)])

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return (~self) ** (-n)
        out = Word.identity(self.alphabet)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.alphabet == other.alphabet and self.letters == other.letters

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.alphabet, self.letters))
        return self._hash

    def __repr__(self) -> str:
        return format_word(self)


def _require_same_alphabet(a: Word, b: Word) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(
            f"words over different alphabets: {a.alphabet.names} vs {b.alphabet.names}"
        )


def multiply(a: Word, b: Word) -> Word:
    """Freely reduced concatenation."""
    _require_same_alphabet(a, b)
    # only the junction can cancel since both factors are reduced
    la, lb = list(a.letters), b.letters
    j = 0
    while la and j < len(lb) and la[-1][0] == lb[j][0] and la[-1][1] == -lb[j][1]:
        la.pop()
        j += 1
    w = Word.__new__(Word)
    w.alphabet = a.alphabet
    w.letters = tuple(la) + lb[j:]
    w._hash = None
    return w


def conjugate(w: Word, g: Word) -> Word:
    """Reduced form of g^-1 w g."""
    _require_same_alphabet(w, g)
    return multiply(multiply(~g, w), g)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Strip matching "l ... l^-1" outer pairs.

    Returns (core, conjugator) with core cyclically reduced and
    w == conjugate(core, conjugator).
    """
    letters = w.letters
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i][0] == letters[j - 1][0] and letters[i][1] == -letters[j - 1][1]:
        i += 1
        j -= 1
    core = Word(w.alphabet, letters[i:j])
    conjugator = ~Word(w.alphabet, letters[:i])
    return core, conjugator


def substitute(w: Word, images: Mapping[str, Word]) -> Word:
    """Extend a generator assignment to a homomorphism and apply it to w."""
    for nm in w.alphabet.names:
        if nm not in images:
            raise InputError(f"missing image for generator {nm!r}")
    vals = [images[nm] for nm in w.alphabet.names]
    target = vals[0].alphabet
    for v in vals[1:]:
        if v.alphabet != target:
            raise AlphabetMismatch("substitution images live over different alphabets")
    out: list[Letter] = []
    for idx, sg in w.letters:
        img = vals[idx].letters if sg > 0 else (~vals[idx]).letters
        for lt in img:
            if out and out[-1][0] == lt[0] and out[-1][1] == -lt[1]:
                out.pop()
            else:
                out.append(lt)
    return Word(target, out)


def power_word(n: int, base: int = 1, alphabet: Alphabet = XY) -> Word:
    """The word a^b b'^b a^b over the first two generators, with b = base * 2^n."""
    if alphabet.size < 2:
        raise InputError("power_word needs an alphabet with at least two generators")
    if n < 0 or base < 0:
        raise InputError("power_word takes natural arguments")
    b = base * (2**n)
    block_x = [(0, 1)] * b
    block_y = [(1, 1)] * b
    return Word(alphabet, block_x + block_y + block_x)


# ---------------------------------------------------------------------------
# text syntax: generators by name, inverses as name^-1 (or uppercase variant),
# powers as name^k; parse(format(w)) == w exactly.
# ---------------------------------------------------------------------------


def parse_word(alphabet: Alphabet, text: str, upper_inverse: bool | None = None) -> Word:
    """Parse a word; `upper_inverse` defaults to on iff no name is uppercase."""
    if upper_inverse is None:
        upper_inverse = all(nm == nm.lower() for nm in alphabet.names)
    by_len = sorted(range(alphabet.size), key=lambda i: -len(alphabet.names[i]))
    letters: list[Letter] = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t*":
            pos += 1
            continue
        if ch == "1":  # identity token, as printed by format_word
            pos += 1
            continue
        idx = sign = None
        for i in by_len:
            nm = alphabet.names[i]
            if text.startswith(nm, pos):
                idx, sign, pos = i, 1, pos + len(nm)
                break
            if upper_inverse and text.startswith(nm.upper(), pos) and nm != nm.upper():
                idx, sign, pos = i, -1, pos + len(nm)
                break
        if idx is None:
            raise InputError(f"cannot read a generator at position {pos} of {text!r}")
        exp = 1
        if pos < n and text[pos] == "^":
            pos += 1
            m = pos
            if pos < n and text[pos] == "-":
                pos += 1
            while pos < n and text[pos].isdigit():
                pos += 1
            if pos == m or text[m:pos] == "-":
                raise InputError(f"bad exponent at position {m} of {text!r}")
            exp = int(text[m:pos])
        total = sign * exp
        if total:
            letters.extend([(idx, 1 if total > 0 else -1)] * abs(total))
    return Word(alphabet, letters)


def format_word(w: Word) -> str:
    """Canonical text form; round-trips exactly through parse_word."""
    if w.is_identity():
        return "1"
    parts = []
    run_idx, run_sign, run_len = None, 0, 0
    for idx, sg in list(w.letters) + [(-1, 0)]:
        if idx == run_idx and sg == run_sign:
            run_len += 1
            continue
        if run_idx is not None and run_idx >= 0:
            k = run_sign * run_len
            nm = w.alphabet.names[run_idx]
            parts.append(nm if k == 1 else f"{nm}^{k}")
        run_idx, run_sign, run_len = idx, sg, 1
    return "".join(parts)


def parse_generators(alphabet: Alphabet, text: str, upper_inverse: bool | None = None) -> list[Word]:
    """Parse a comma-separated list of words (subgroup generators)."""
    items = [part.strip() for part in text.split(",")]
    return [parse_word(alphabet, part, upper_inverse) for part in items if part]
