"""Finite words, eventually periodic sequences and digit streams over {0, ..., M}.

Sequences are indexed from 1, as in d_1 d_2 d_3 ...  Everything here is exact:
two eventually periodic sequences are compared by unrolling a bounded number of
digits, never by a heuristic cutoff.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, Union

__all__ = [
    "Alphabet",
    "Word",
    "EventuallyPeriodicWord",
    "DigitStream",
    "Order",
    "reflect",
    "plus_one",
    "minus_one",
    "lex_compare",
    "compare_prefix",
    "shift",
    "metric_rho",
    "is_alpha_admissible",
    "parse_sequence",
    "format_sequence",
]

_DIGIT_CHARS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class Order(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    # streams only: no difference found within the requested depth
    TIED_TO_DEPTH = 2

    def __neg__(self) -> "Order":
        if self is Order.LESS:
            return Order.GREATER
        if self is Order.GREATER:
            return Order.LESS
        return self


@dataclass(frozen=True)
class Alphabet:
    """The digit set {0, 1, ..., M}."""

    M: int

    def __post_init__(self):
        if not isinstance(self.M, int) or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M!r}")

    @property
    def digits(self) -> range:
        return range(self.M + 1)


def _check_M(M) -> int:
    if isinstance(M, Alphabet):
        return M.M
    if not isinstance(M, int) or isinstance(M, bool) or M < 1:
        raise ValueError(f"M must be a positive integer, got {M!r}")
    return M


def _check_digits(digits: Iterable[int], M: int) -> tuple[int, ...]:
    out = tuple(int(d) for d in digits)
    for d in out:
        if d < 0 or d > M:
            raise ValueError(f"digit {d} outside alphabet {{0,...,{M}}}")
    return out


@dataclass(frozen=True)
class Word:
    """A finite word c_1 ... c_n; the empty word is allowed."""

    digits: tuple[int, ...]
    M: int = 1

    def __post_init__(self):
        M = _check_M(self.M)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "digits", _check_digits(self.digits, M))

    @classmethod
    def from_str(cls, text: str, M: int = 1) -> "Word":
        return cls(tuple(_char_digit(c) for c in text), M)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.M)

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.digits[item], self.M)
        return self.digits[item]

    def __add__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        _same_alphabet(self, other)
        return Word(self.digits + other.digits, self.M)

    def __mul__(self, k: int) -> "Word":
        return Word(self.digits * k, self.M)

    def __str__(self) -> str:
        return "".join(_DIGIT_CHARS[d] for d in self.digits)

    def infinite(self) -> "EventuallyPeriodicWord":
        """The sequence c 0^infinity."""
        return EventuallyPeriodicWord(self.digits, (0,), self.M)

    def periodic(self) -> "EventuallyPeriodicWord":
        """The periodic sequence c^infinity."""
        if not self.digits:
            raise ValueError("the empty word has no periodic extension")
        return EventuallyPeriodicWord((), self.digits, self.M)


def _primitive_root(period: tuple[int, ...]) -> tuple[int, ...]:
    n = len(period)
    for p in range(1, n + 1):
        if n % p == 0 and period[:p] * (n // p) == period:
            return period[:p]
    return period


@dataclass(frozen=True)
class EventuallyPeriodicWord:
    """The sequence preperiod + period^infinity, kept in canonical form.

    Canonical form means the period is primitive and the preperiod cannot be
    shortened by rotating the period, so equal sequences compare equal as
    dataclasses too.
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...]
    M: int = 1

    def __post_init__(self):
        M = _check_M(self.M)
        pre = _check_digits(self.preperiod, M)
        per = _check_digits(self.period, M)
        if not per:
            raise ValueError("period must be nonempty")
        per = _primitive_root(per)
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def from_str(cls, text: str, M: int = 1) -> "EventuallyPeriodicWord":
        return parse_sequence(text, M)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.M)

    def __getitem__(self, i: int) -> int:
        """Digit d_i, 1-based."""
        if i < 1:
            raise IndexError("sequence indices start at 1")
        L = len(self.preperiod)
        if i <= L:
            return self.preperiod[i - 1]
        return self.period[(i - L - 1) % len(self.period)]

    def prefix(self, n: int) -> Word:
        L = len(self.preperiod)
        if n <= L:
            return Word(self.preperiod[:n], self.M)
        p = len(self.period)
        reps = (n - L) // p + 1
        return Word((self.preperiod + self.period * reps)[:n], self.M)

    def digits(self) -> Iterator[int]:
        yield from self.preperiod
        while True:
            yield from self.period

    @property
    def ends_with_zeros(self) -> bool:
        return self.period == (0,)

    def to_stream(self) -> "DigitStream":
        return DigitStream(self.__getitem__, self.M)

    def __str__(self) -> str:
        return format_sequence(self)


class DigitStream:
    """An infinite digit sequence given by a function of the 1-based index."""

    def __init__(self, generator: Callable[[int], int], M: int = 1, *, offset: int = 0):
        self.generator = generator
        self.M = _check_M(M)
        self.offset = offset

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.M)

    def __getitem__(self, i: int) -> int:
        if i < 1:
            raise IndexError("sequence indices start at 1")
        d = self.generator(i + self.offset)
        if d < 0 or d > self.M:
            raise ValueError(f"stream produced digit {d} outside {{0,...,{self.M}}}")
        return d

    def prefix(self, n: int) -> Word:
        return Word(tuple(self[i] for i in range(1, n + 1)), self.M)

    def shifted(self, n: int) -> "DigitStream":
        return DigitStream(self.generator, self.M, offset=self.offset + n)

    def __repr__(self) -> str:
        head = "".join(_DIGIT_CHARS[self[i]] for i in range(1, 13))
        return f"DigitStream({head}..., M={self.M})"


Sequence_ = Union[EventuallyPeriodicWord, DigitStream]


def _same_alphabet(a, b) -> None:
    if a.M != b.M:
        raise ValueError(f"alphabet mismatch: M={a.M} vs M={b.M}")


def reflect(w):
    """Digitwise reflection d -> M - d."""
    if isinstance(w, Word):
        return Word(tuple(w.M - d for d in w.digits), w.M)
    if isinstance(w, EventuallyPeriodicWord):
        return EventuallyPeriodicWord(
            tuple(w.M - d for d in w.preperiod), tuple(w.M - d for d in w.period), w.M
        )
    if isinstance(w, DigitStream):
        M, g, off = w.M, w.generator, w.offset
        return DigitStream(lambda i: M - g(i + off), M)
    raise TypeError(f"cannot reflect {type(w).__name__}")


def plus_one(w: Word) -> Word:
    """c_1 ... c_{n-1}(c_n + 1); requires c_n < M."""
    if not w.digits or w.digits[-1] >= w.M:
        raise ValueError(f"plus_one needs a nonempty word with last digit < M, got {w}")
    return Word(w.digits[:-1] + (w.digits[-1] + 1,), w.M)


def minus_one(w: Word) -> Word:
    """c_1 ... c_{n-1}(c_n - 1); requires c_n > 0."""
    if not w.digits or w.digits[-1] <= 0:
        raise ValueError(f"minus_one needs a nonempty word with last digit > 0, got {w}")
    return Word(w.digits[:-1] + (w.digits[-1] - 1,), w.M)


def _sign(x: int) -> Order:
    return Order.LESS if x < 0 else Order.GREATER if x > 0 else Order.EQUAL


def _exact_depth(a: EventuallyPeriodicWord, b: EventuallyPeriodicWord) -> int:
    # past both preperiods the sequences are periodic with period lcm(pa, pb)
    return max(len(a.preperiod), len(b.preperiod)) + math.lcm(len(a.period), len(b.period))


def lex_compare(a, b, depth_hint: int = 64) -> Order:
    """Lexicographic comparison of two infinite sequences.

    Exact for two eventually periodic inputs. When a ``DigitStream`` is involved
    at most ``depth_hint`` digits are inspected and ``Order.TIED_TO_DEPTH`` is
    returned if they all agree. Finite ``Word`` arguments are read as c 0^infinity.
    """
    if isinstance(a, Word):
        a = a.infinite()
    if isinstance(b, Word):
        b = b.infinite()
    _same_alphabet(a, b)
    if isinstance(a, EventuallyPeriodicWord) and isinstance(b, EventuallyPeriodicWord):
        if a == b:
            return Order.EQUAL
        depth = _exact_depth(a, b)
        tied = Order.EQUAL
    else:
        depth = depth_hint
        tied = Order.TIED_TO_DEPTH
    for i in range(1, depth + 1):
        da, db = a[i], b[i]
        if da != db:
            return _sign(da - db)
    return tied


def compare_prefix(seq, word: Word) -> Order:
    """Compare the first len(word) digits of ``seq`` against ``word``.

    EQUAL means the prefix coincides with ``word``; nothing is said about the
    digits beyond it.
    """
    for i, d in enumerate(word.digits, start=1):
        s = seq[i]
        if s != d:
            return _sign(s - d)
    return Order.EQUAL


def shift(s, n: int):
    """The left shift sigma^n."""
    if n < 0:
        raise ValueError("shift amount must be non-negative")
    if isinstance(s, EventuallyPeriodicWord):
        L = len(s.preperiod)
        if n <= L:
            return EventuallyPeriodicWord(s.preperiod[n:], s.period, s.M)
        k = (n - L) % len(s.period)
        return EventuallyPeriodicWord((), s.period[k:] + s.period[:k], s.M)
    if isinstance(s, DigitStream):
        return s.shifted(n) if n else s
    if isinstance(s, Word):
        return Word(s.digits[n:], s.M)
    raise TypeError(f"cannot shift {type(s).__name__}")


def metric_rho(a, b, depth: int = 64) -> Fraction:
    """rho(a, b) = (M+1)^(-first index where they differ), and 0 if equal.

    Exact for eventually periodic inputs; for streams, 0 means "equal on the
    first ``depth`` digits".
    """
    if isinstance(a, Word):
        a = a.infinite()
    if isinstance(b, Word):
        b = b.infinite()
    _same_alphabet(a, b)
    if isinstance(a, EventuallyPeriodicWord) and isinstance(b, EventuallyPeriodicWord):
        if a == b:
            return Fraction(0)
        depth = _exact_depth(a, b)
    for i in range(1, depth + 1):
        if a[i] != b[i]:
            return Fraction(1, (a.M + 1) ** i)
    return Fraction(0)


def is_alpha_admissible(s, depth: int = 64) -> bool:
    """Is ``s`` of the form alpha(q) for some base q in (1, M+1]?

    That is: s does not end with 0^infinity and sigma^n(s) <= s for all n >= 0.
    For a finite ``Word`` a_1..a_N the prefix-level version is checked:
    a_{n+1}..a_N <= a_1..a_{N-n} for every n.
    """
    if isinstance(s, Word):
        a = s.digits
        if not a:
            return False
        for n in range(1, len(a)):
            tail = a[n:]
            if tail > a[: len(tail)]:
                return False
        return True
    if isinstance(s, EventuallyPeriodicWord):
        if s.ends_with_zeros:
            return False
        distinct = len(s.preperiod) + len(s.period)
        for n in range(1, distinct):
            if lex_compare(shift(s, n), s) is Order.GREATER:
                return False
        return True
    if isinstance(s, DigitStream):
        return is_alpha_admissible(s.prefix(depth))
    raise TypeError(f"unsupported type {type(s).__name__}")


def _char_digit(c: str) -> int:
    v = _DIGIT_CHARS.find(c.upper())
    if v < 0:
        raise ValueError(f"invalid digit character {c!r}")
    return v


def parse_sequence(text: str, M: int = 1) -> EventuallyPeriodicWord:
    """Parse ``pre(period)``; a bare word means that word followed by (0)."""
    text = text.strip().replace(" ", "").replace("_", "")
    if "(" in text:
        if not text.endswith(")") or text.count("(") != 1:
            raise ValueError(f"malformed sequence {text!r}; expected pre(period)")
        pre, per = text[:-1].split("(")
        if not per:
            raise ValueError(f"empty period in {text!r}")
    else:
        pre, per = text, "0"
    return EventuallyPeriodicWord(
        tuple(_char_digit(c) for c in pre), tuple(_char_digit(c) for c in per), M
    )


def format_sequence(s: EventuallyPeriodicWord) -> str:
    pre = "".join(_DIGIT_CHARS[d] for d in s.preperiod)
    per = "".join(_DIGIT_CHARS[d] for d in s.period)
    return f"{pre}({per})"
