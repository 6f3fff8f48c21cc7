"""Named four-qubit state families, reference states and a ket-expression parser.

The nine SLOCC representative families follow Verstraete, Dehaene,
De Moor and Verschelde, "Four qubits can be entangled in nine different
ways", Phys. Rev. A 65, 052112 (2002); see ``docs/families.md`` for the
transcription and ``data/family_expansions.json`` for pinned expansions.
All constructors return normalised states.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from multicorr.state import NullStateError, PureState, ValidationError, normalize

S2 = 1.0 / np.sqrt(2.0)


def _from_terms(terms, n=4) -> PureState:
    amps = np.zeros(2 ** n, dtype=np.complex128)
    for coef, bits in terms:
        amps[int(bits, 2)] += coef
    return normalize(PureState(n, amps))


def _pairs(coef, *kets):
    return [(coef, k) for k in kets]


def make_gabcd(a, b, c, d) -> PureState:
    return _from_terms(
        _pairs((a + d) / 2, "0000", "1111")
        + _pairs((a - d) / 2, "0011", "1100")
        + _pairs((b + c) / 2, "0101", "1010")
        + _pairs((b - c) / 2, "0110", "1001")
    )


def make_labc2(a, b, c) -> PureState:
    return _from_terms(
        _pairs((a + b) / 2, "0000", "1111")
        + _pairs((a - b) / 2, "0011", "1100")
        + _pairs(c, "0101", "1010")
        + [(1, "0110")]
    )


def make_la2b2(a, b) -> PureState:
    return _from_terms(
        _pairs(a, "0000", "1111") + _pairs(b, "0101", "1010") + [(1, "0110"), (1, "0011")]
    )


def make_lab3(a, b) -> PureState:
    return _from_terms(
        _pairs(a, "0000", "1111")
        + _pairs((a + b) / 2, "0101", "1010")
        + _pairs((a - b) / 2, "0110", "1001")
        + _pairs(1j * S2, "0001", "0010", "0111", "1011")
    )


def make_la4(a) -> PureState:
    return _from_terms(
        _pairs(a, "0000", "0101", "1010", "1111") + [(1j, "0001"), (1, "0110"), (-1j, "1011")]
    )


def make_la2_03p1(a) -> PureState:
    return _from_terms(_pairs(a, "0000", "1111") + _pairs(1, "0011", "0101", "0110"))


def make_l05p3() -> PureState:
    return _from_terms(_pairs(1, "0000", "0101", "1000", "1110"))


def make_l07p1() -> PureState:
    return _from_terms(_pairs(1, "0000", "1011", "1101", "1110"))


def make_l03p1_03p1bar() -> PureState:
    return _from_terms(_pairs(1, "0000", "0111"))


def make_w4(a1, a2, a3, a4) -> PureState:
    """``a1|0001> + a2|0010> + a3|0100> + a4|1000>``, normalised."""
    return _from_terms([(a1, "0001"), (a2, "0010"), (a3, "0100"), (a4, "1000")])


def make_ghz(n=4) -> PureState:
    n = int(n)
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[0] = amps[-1] = S2
    return PureState(n, amps)


_CONSTRUCTORS = {
    "Gabcd": (make_gabcd, 4),
    "Labc2": (make_labc2, 3),
    "La2b2": (make_la2b2, 2),
    "Lab3": (make_lab3, 2),
    "La4": (make_la4, 1),
    "La2_03p1": (make_la2_03p1, 1),
    "L_05p3": (make_l05p3, 0),
    "L_07p1": (make_l07p1, 0),
    "L_03p1_03p1bar": (make_l03p1_03p1bar, 0),
    "W4": (make_w4, 4),
    "GHZ_N": (make_ghz, 1),
}

FAMILY_NAMES = tuple(_CONSTRUCTORS) + ("explicit",)

# Parameters used for the nine-state monotonicity scan, and the qubit measured.
REPRESENTATIVES = (
    ("Gabcd", (1.0, 0.5, 1.0, 0.5), 0),
    ("Labc2", (2.0, 1.0, 1.0), 0),
    ("La2b2", (1.0, 1.0), 0),
    ("Lab3", (1.0, 1.5), 0),
    ("La4", (1.0,), 0),
    ("La2_03p1", (1.0,), 0),
    ("L_05p3", (), 0),
    ("L_07p1", (), 0),
    ("L_03p1_03p1bar", (), 1),
)

_ALIASES = {name.lower().replace("_", ""): name for name in FAMILY_NAMES}
_ALIASES.update({"ghz": "GHZ_N", "w": "W4", "gabcd": "Gabcd"})


def canonical_family(name: str) -> str:
    key = name.lower().replace("_", "")
    if key not in _ALIASES:
        raise ValidationError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
    return _ALIASES[key]


@dataclass(frozen=True)
class StateFamily:
    name: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "name", canonical_family(self.name))
        object.__setattr__(self, "params", tuple(self.params))
        if self.name == "explicit":
            if len(self.params) != 1 or not isinstance(self.params[0], str):
                raise ValidationError("explicit family takes one ket-expression string")
            return
        arity = _CONSTRUCTORS[self.name][1]
        if len(self.params) != arity:
            raise ValidationError(f"{self.name} takes {arity} parameter(s), got {len(self.params)}")


def make_family(family: StateFamily) -> PureState:
    if family.name == "explicit":
        return parse_ket_expression(family.params[0])
    fn, _ = _CONSTRUCTORS[family.name]
    try:
        return fn(*family.params)
    except NullStateError:
        raise NullStateError(f"{family.name}{family.params} is the null state") from None


def representative_states():
    """``[(name, state, measured qubit)]`` for the nine representative families."""
    return [(name, make_family(StateFamily(name, params)), target) for name, params, target in REPRESENTATIVES]


# ---------------------------------------------------------------- ket parser


class KetParseError(ValidationError):
    def __init__(self, message, text, position):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ket>\|[01]+(?:>|⟩))
  | (?P<sqrt>sqrt|√)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<imag>[ij])
  | (?P<op>[-+*/()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise KetParseError("unexpected character", text, pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over ``sum [ '/' factor ]`` with an optional global divisor.

    Grammar::

        expr    := '(' sum ')' [ '/' scalar ] | sum
        sum     := term (('+' | '-') term)*     (leading sign allowed)
        term    := [coef ['*']] ket
        coef    := scalar ['/' scalar]
        scalar  := atom (['*'] atom)*           (juxtaposition multiplies)
        atom    := number | 'i' | sqrt '(' scalar ')' | sqrt number | '(' complex ')'
    """

    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[self.i + offset]

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise KetParseError(f"expected {want}, found {tok[1] or 'end of input'}", self.text, tok[2])
        self.i += 1
        return tok

    def at(self, kind, value=None):
        tok = self.peek()
        return tok[0] == kind and (value is None or tok[1] == value)

    def parse(self):
        terms = None
        if self.at("op", "(") and self._paren_wraps_sum():
            self.take("op", "(")
            terms = self.sum()
            self.take("op", ")")
            if self.at("op", "/"):
                self.take()
                div = self.scalar()
                if div == 0:
                    raise KetParseError("division by zero", self.text, self.peek()[2])
                terms = [(c / div, k, p) for c, k, p in terms]
            elif self.at("op", "*"):
                self.take()
                mul = self.scalar()
                terms = [(c * mul, k, p) for c, k, p in terms]
        else:
            terms = self.sum()
        self.take("end")
        return terms

    def _paren_wraps_sum(self):
        depth = 0
        for kind, val, _ in self.tokens[self.i:]:
            if val == "(":
                depth += 1
            elif val == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif kind == "ket" and depth == 1:
                return True
        return False

    def sum(self):
        terms = []
        sign = 1.0
        if self.at("op", "+") or self.at("op", "-"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
        terms.append(self.term(sign))
        while self.at("op", "+") or self.at("op", "-"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
            terms.append(self.term(sign))
        return terms

    def term(self, sign):
        coef = 1.0 + 0j
        if not self.at("ket"):
            coef = self.scalar()
            if self.at("op", "/"):
                self.take()
                div = self.scalar()
                if div == 0:
                    raise KetParseError("division by zero", self.text, self.peek()[2])
                coef = coef / div
            if self.at("op", "*"):
                self.take()
        _, ket, pos = self.take("ket")
        bits = ket[1:-1]
        return sign * coef, bits, pos

    def scalar(self):
        value = self.atom()
        while True:
            if self.at("op", "*") and self.peek(1)[0] != "ket":
                self.take()
                value *= self.atom()
            elif self.peek()[0] in ("num", "imag", "sqrt") or self.at("op", "("):
                value *= self.atom()
            else:
                return value

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return complex(float(val))
        if kind == "imag":
            self.take()
            return 1j
        if kind == "sqrt":
            self.take()
            if self.at("op", "("):
                self.take()
                inner = self.scalar()
                self.take("op", ")")
            else:
                inner = complex(float(self.take("num")[1]))
            if inner.imag != 0 or inner.real < 0:
                raise KetParseError("sqrt needs a non-negative real argument", self.text, pos)
            return complex(np.sqrt(inner.real))
        if kind == "op" and val == "(":
            self.take()
            value = self.complex_sum()
            self.take("op", ")")
            return value
        raise KetParseError(f"expected a coefficient, found {val or 'end of input'}", self.text, pos)

    def complex_sum(self):
        sign = 1.0
        if self.at("op", "+") or self.at("op", "-"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
        value = sign * self.scalar()
        while self.at("op", "+") or self.at("op", "-"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
            value += sign * self.scalar()
        return value


def parse_ket_expression(text: str) -> PureState:
    """Parse sums like ``"(|0000>+|1111>)/sqrt(2)"`` into a normalised state.

    Coefficients may be decimals, rationals, ``p/sqrt(q)``, ``i`` factors
    or parenthesised complex numbers such as ``(0.5-0.25i)``. Repeated
    kets are summed.
    """
    terms = _Parser(text).parse()
    lengths = {len(bits) for _, bits, _ in terms}
    if len(lengths) != 1:
        pos = next(p for _, bits, p in terms if len(bits) != len(terms[0][1]))
        raise KetParseError("inconsistent ket lengths", text, pos)
    n = lengths.pop()
    if n < 2:
        raise KetParseError("need at least two qubits", text, terms[0][2])
    amps = np.zeros(2 ** n, dtype=np.complex128)
    for coef, bits, _ in terms:
        amps[int(bits, 2)] += coef
    return normalize(PureState(n, amps))


def _format_coef(z):
    re_, im = float(z.real), float(z.imag)
    if im == 0.0:
        return repr(re_)
    if re_ == 0.0:
        return f"({im!r}i)"
    sign = "+" if im >= 0 else "-"
    return f"({re_!r}{sign}{abs(im)!r}i)"


def format_ket(state: PureState, cutoff=0.0) -> str:
    """Ket expression that :func:`parse_ket_expression` reads back exactly."""
    parts = []
    for idx, amp in enumerate(state.amplitudes):
        if abs(amp) > cutoff:
            bits = format(idx, f"0{state.n_qubits}b")
            parts.append(f"{_format_coef(amp)}|{bits}>")
    if not parts:
        raise NullStateError()
    return "+".join(parts).replace("+-", "-")
