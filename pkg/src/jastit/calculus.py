"""Axiom recognition and Hilbert proof checking for the announcement system.

The system has ten axiom groups and four rules. The matcher tries the
specific announcement and justification schemes first, then the modal
bases, then plain propositional logic:

    A2  Box A -> [j]A
    A3  (Dia [j1]A1 & ... & Dia [jn]An) -> Dia ([j1]A1 & ... & [jn]An),
        agents pairwise distinct, conjuncts in the same order on both sides
    A4  s:(A -> B) -> (t:A -> (s * t):B)
    A5  t:A -> (!t:(t:A) & K A)
    A6  (s:A | t:A) -> (s + t):A
    A8  K A -> Box K Box A
    A9  Box E t -> K Box E t
    A1  the S5 base {K-distribution, T, 5} for Box and for each [j]
    A7  the S4 base {K-distribution, T, 4} for K
    A0  classical propositional logic

A0 has two modes. The default "oracle" mode accepts any formula whose
Boolean skeleton is a truth-table tautology when maximal non-Boolean
subformulas are read as atoms: any full propositional axiom set generates
exactly these under modus ponens, so the oracle is basis-agnostic. The
"strict" mode instead matches a fixed ten-scheme basis (the standard
implication, conjunction, disjunction and negation postulates plus double
negation elimination) for audits that want a concrete instance.

Rules: R1 is modus ponens; R2 is necessitation for K; the announcement
rule turns K A -> (~Box E t1 | ... | ~Box E tn | Box E s1 | ... | Box E sk)
into the same implication with the boxes stripped, matching the disjuncts
as a multiset; the specification rule introduces any member of a constant
specification. Necessitation for Box and [j] is not part of the system
and is only accepted behind an explicit flag.

Proof lines are numbered from 1, and every premise reference must point
strictly upward.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from .diagnostics import Diagnostic, ResourceBoundExceeded, VIOLATION, WARNING
from .models import ConstantSpecification
from .syntax import (
    And, Announced, App, Box, Check, Cstit, Formula, Knows, Not,
    Proves, Sum, as_dia, as_implies, as_or, flatten_and, flatten_or,
    implies, render, render_polynomial,
)

__all__ = [
    "AxiomMatch", "match_axiom", "is_tautology", "match_strict_tautology",
    "match_rd",
    "Axiom", "MP", "KNec", "RD", "RCS", "BoxNec", "CstitNec",
    "Justification", "ProofLine", "Proof",
    "LineVerdict", "ProofVerdict", "verify_proof", "check_cs",
    "SCHEME_IDS", "STRICT_BASIS",
]

SCHEME_IDS = ("A0", "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9")

Detail = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class AxiomMatch:
    """Scheme id plus a record of what the metavariables were bound to."""

    scheme: str
    detail: Detail = ()

    @property
    def bindings(self) -> dict:
        return dict(self.detail)


def _d(**kw: str) -> Detail:
    return tuple(kw.items())


# ---------------------------------------------------------------------------
# specific schemes

def _match_a2(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    if isinstance(l, Box) and isinstance(r, Cstit) and l.arg == r.arg:
        return AxiomMatch("A2", _d(A=render(l.arg), j=str(r.agent)))
    return None


def _match_a3(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    lhs, rhs = ir
    body = as_dia(rhs)
    if body is None:
        return None
    stits = flatten_and(body)
    if not all(isinstance(g, Cstit) for g in stits):
        return None
    agents = [g.agent for g in stits]
    if len(set(agents)) != len(agents):
        return None
    parts = flatten_and(lhs)
    if len(parts) != len(stits):
        return None
    for part, st in zip(parts, stits):
        if as_dia(part) != st:
            return None
    return AxiomMatch("A3", _d(n=str(len(stits)),
                               agents=",".join(str(j) for j in agents)))


def _match_a4(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    if not isinstance(l, Proves):
        return None
    ab = as_implies(l.arg)
    if not ab:
        return None
    a, b = ab
    s = l.poly
    ir2 = as_implies(r)
    if not ir2:
        return None
    ta, stb = ir2
    if not (isinstance(ta, Proves) and ta.arg == a):
        return None
    t = ta.poly
    if (isinstance(stb, Proves) and stb.poly == App(s, t) and stb.arg == b):
        return AxiomMatch("A4", _d(s=render_polynomial(s),
                                   t=render_polynomial(t),
                                   A=render(a), B=render(b)))
    return None


def _match_a5(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    if not (isinstance(l, Proves) and isinstance(r, And)):
        return None
    t, a = l.poly, l.arg
    want_left = Proves(Check(t), Proves(t, a))
    if r.left == want_left and r.right == Knows(a):
        return AxiomMatch("A5", _d(t=render_polynomial(t), A=render(a)))
    return None


def _match_a6(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    d = as_or(l)
    if not d:
        return None
    sa, ta = d
    if not (isinstance(sa, Proves) and isinstance(ta, Proves)
            and sa.arg == ta.arg):
        return None
    if (isinstance(r, Proves) and r.poly == Sum(sa.poly, ta.poly)
            and r.arg == sa.arg):
        return AxiomMatch("A6", _d(s=render_polynomial(sa.poly),
                                   t=render_polynomial(ta.poly),
                                   A=render(sa.arg)))
    return None


def _match_a8(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    if (isinstance(l, Knows)
            and r == Box(Knows(Box(l.arg)))):
        return AxiomMatch("A8", _d(A=render(l.arg)))
    return None


def _match_a9(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    if (isinstance(l, Box) and isinstance(l.arg, Announced)
            and r == Knows(l)):
        return AxiomMatch("A9", _d(t=render_polynomial(l.arg.poly)))
    return None


# ---------------------------------------------------------------------------
# modal bases: S5 for Box/[j], S4 for K
#
# Each base is expressed through a destructor that strips one layer of the
# modality or returns None. With l the antecedent and r the consequent:
#   K-distribution   l = M(A -> B),  r = MA -> MB
#   T                l = MA,         r = A
#   4                r = M(l)  with  l = MA
#   5                r = M(l)  with  l = ~M~A

def _un_box(g: Formula) -> Optional[Formula]:
    return g.arg if isinstance(g, Box) else None


def _un_knows(g: Formula) -> Optional[Formula]:
    return g.arg if isinstance(g, Knows) else None


def _un_cstit(j: int) -> Callable[[Formula], Optional[Formula]]:
    def un(g: Formula) -> Optional[Formula]:
        return g.arg if isinstance(g, Cstit) and g.agent == j else None
    return un


def _modal_kdist(l: Formula, r: Formula, un) -> Optional[Detail]:
    body = un(l)
    if body is None:
        return None
    ab = as_implies(body)
    if not ab:
        return None
    a, b = ab
    ir = as_implies(r)
    if not ir:
        return None
    ma, mb = ir
    if un(ma) == a and un(mb) == b:
        return _d(A=render(a), B=render(b))
    return None


def _modal_t(l: Formula, r: Formula, un) -> Optional[Detail]:
    body = un(l)
    if body is not None and body == r:
        return _d(A=render(body))
    return None


def _modal_4(l: Formula, r: Formula, un) -> Optional[Detail]:
    if un(l) is not None and un(r) == l:
        return _d(A=render(un(l)))
    return None


def _modal_5(l: Formula, r: Formula, un) -> Optional[Detail]:
    # l must be the possibility form ~M~A; 5 then says l -> M(l)
    if not isinstance(l, Not):
        return None
    inner = un(l.arg)
    if inner is None or not isinstance(inner, Not):
        return None
    if un(r) == l:
        return _d(A=render(inner.arg))
    return None


def _match_a1(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    candidates: list[tuple[str, Callable]] = [("Box", _un_box)]
    probe = l.arg if isinstance(l, Not) else l
    if isinstance(probe, Cstit):
        candidates.append((f"[{probe.agent}]", _un_cstit(probe.agent)))
    for name, un in candidates:
        for tag, m in (("K", _modal_kdist), ("T", _modal_t), ("5", _modal_5)):
            got = m(l, r, un)
            if got is not None:
                return AxiomMatch("A1", _d(modality=name, axiom=tag) + got)
    return None


def _match_a7(f: Formula) -> Optional[AxiomMatch]:
    ir = as_implies(f)
    if not ir:
        return None
    l, r = ir
    for tag, m in (("K", _modal_kdist), ("T", _modal_t), ("4", _modal_4)):
        got = m(l, r, _un_knows)
        if got is not None:
            return AxiomMatch("A7", _d(modality="K", axiom=tag) + got)
    return None


# ---------------------------------------------------------------------------
# A0: classical propositional logic

def _boolean_atoms(f: Formula) -> dict:
    """Maximal non-Boolean subformulas, in first-seen order."""
    atoms: dict = {}

    def walk(g: Formula) -> None:
        if isinstance(g, And):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Not):
            walk(g.arg)
        else:
            atoms.setdefault(g, len(atoms))

    walk(f)
    return atoms


def is_tautology(f: Formula, *, max_atoms: int = 20) -> bool:
    """Truth-table tautology over the Boolean skeleton of f."""
    atoms = _boolean_atoms(f)
    if len(atoms) > max_atoms:
        raise ResourceBoundExceeded(
            f"tautology check over {len(atoms)} atoms exceeds the "
            f"{max_atoms}-atom bound")

    def ev(g: Formula, row: int) -> bool:
        if isinstance(g, And):
            return ev(g.left, row) and ev(g.right, row)
        if isinstance(g, Not):
            return not ev(g.arg, row)
        return bool(row >> atoms[g] & 1)

    return all(ev(f, row) for row in range(1 << len(atoms)))


# The ten-scheme basis for strict mode: the standard postulates for ->, &,
# | and ~, with double negation elimination closing the classical gap.
# Patterns use strings as metavariables.
_P = Union[str, tuple]

STRICT_BASIS: tuple[tuple[str, str], ...] = (
    ("PC1", "A -> (B -> A)"),
    ("PC2", "(A -> B) -> ((A -> (B -> C)) -> (A -> C))"),
    ("PC3", "A -> (B -> A & B)"),
    ("PC4", "A & B -> A"),
    ("PC5", "A & B -> B"),
    ("PC6", "A -> A | B"),
    ("PC7", "B -> A | B"),
    ("PC8", "(A -> C) -> ((B -> C) -> (A | B -> C))"),
    ("PC9", "(A -> B) -> ((A -> ~B) -> ~A)"),
    ("PC10", "~~A -> A"),
)

_STRICT_PATTERNS: tuple[tuple[str, _P], ...] = (
    ("PC1", ("->", "A", ("->", "B", "A"))),
    ("PC2", ("->", ("->", "A", "B"),
             ("->", ("->", "A", ("->", "B", "C")), ("->", "A", "C")))),
    ("PC3", ("->", "A", ("->", "B", ("&", "A", "B")))),
    ("PC4", ("->", ("&", "A", "B"), "A")),
    ("PC5", ("->", ("&", "A", "B"), "B")),
    ("PC6", ("->", "A", ("|", "A", "B"))),
    ("PC7", ("->", "B", ("|", "A", "B"))),
    ("PC8", ("->", ("->", "A", "C"),
             ("->", ("->", "B", "C"), ("->", ("|", "A", "B"), "C")))),
    ("PC9", ("->", ("->", "A", "B"), ("->", ("->", "A", ("~", "B")), ("~", "A")))),
    ("PC10", ("->", ("~", ("~", "A")), "A")),
)


def _pattern_match(pat: _P, f: Formula, env: dict) -> bool:
    if isinstance(pat, str):
        if pat in env:
            return env[pat] == f
        env[pat] = f
        return True
    op = pat[0]
    if op == "->":
        ir = as_implies(f)
        return bool(ir) and _pattern_match(pat[1], ir[0], env) \
            and _pattern_match(pat[2], ir[1], env)
    if op == "|":
        d = as_or(f)
        return bool(d) and _pattern_match(pat[1], d[0], env) \
            and _pattern_match(pat[2], d[1], env)
    if op == "&":
        return isinstance(f, And) and _pattern_match(pat[1], f.left, env) \
            and _pattern_match(pat[2], f.right, env)
    if op == "~":
        return isinstance(f, Not) and _pattern_match(pat[1], f.arg, env)
    raise AssertionError(f"unknown pattern operator {op!r}")


def match_strict_tautology(f: Formula) -> Optional[AxiomMatch]:
    for pc, pat in _STRICT_PATTERNS:
        env: dict = {}
        if _pattern_match(pat, f, env):
            detail = (("basis", pc),) + tuple(
                (k, render(v)) for k, v in sorted(env.items()))
            return AxiomMatch("A0", detail)
    return None


def _match_a0(f: Formula, mode: str, max_atoms: int) -> Optional[AxiomMatch]:
    if mode == "strict":
        return match_strict_tautology(f)
    if mode != "oracle":
        raise ValueError(f"unknown tautology mode {mode!r}")
    if is_tautology(f, max_atoms=max_atoms):
        return AxiomMatch("A0", _d(atoms=str(len(_boolean_atoms(f)))))
    return None


_SPECIFIC = (_match_a2, _match_a3, _match_a4, _match_a5, _match_a6,
             _match_a8, _match_a9, _match_a1, _match_a7)


def match_axiom(f: Formula, *, tautology_mode: str = "oracle",
                max_atoms: int = 20) -> Optional[AxiomMatch]:
    """First matching scheme in the order A2..A6, A8, A9, A1, A7, A0."""
    for m in _SPECIFIC:
        got = m(f)
        if got is not None:
            return got
    return _match_a0(f, tautology_mode, max_atoms)


# ---------------------------------------------------------------------------
# the announcement rule

def _rd_parts(f: Formula, boxed: bool) -> Optional[tuple[Formula, Counter]]:
    """Split K A -> (disjunction of announcement literals) into the K part
    and a polarity-tagged multiset of polynomials."""
    ir = as_implies(f)
    if not ir:
        return None
    ka, rhs = ir
    if not isinstance(ka, Knows):
        return None
    bag: Counter = Counter()
    for disjunct in flatten_or(rhs):
        neg = isinstance(disjunct, Not)
        core = disjunct.arg if neg else disjunct
        if boxed:
            if not (isinstance(core, Box) and isinstance(core.arg, Announced)):
                return None
            bag[(neg, core.arg.poly)] += 1
        else:
            if not isinstance(core, Announced):
                return None
            bag[(neg, core.poly)] += 1
    return ka, bag


def match_rd(premise: Formula, conclusion: Formula) -> bool:
    """True iff conclusion is premise with the boxes stripped from every
    announcement disjunct, the disjuncts matched as a multiset."""
    p = _rd_parts(premise, boxed=True)
    c = _rd_parts(conclusion, boxed=False)
    return p is not None and c is not None and p == c


# ---------------------------------------------------------------------------
# proofs

@dataclass(frozen=True)
class Axiom:
    """Axiom line; scheme, when given, must agree with the matcher."""

    scheme: Optional[str] = None

    def __post_init__(self) -> None:
        if self.scheme is not None and self.scheme not in SCHEME_IDS:
            raise ValueError(f"unknown axiom scheme {self.scheme!r}")


@dataclass(frozen=True)
class MP:
    """Modus ponens: line i is the antecedent, line j the implication."""

    i: int
    j: int


@dataclass(frozen=True)
class KNec:
    """Necessitation for K from line i."""

    i: int


@dataclass(frozen=True)
class RD:
    """Announcement rule applied to line i."""

    i: int


@dataclass(frozen=True)
class RCS:
    """Introduction of a constant specification member."""


@dataclass(frozen=True)
class BoxNec:
    """Necessitation for Box from line i; needs the opt-in flag."""

    i: int


@dataclass(frozen=True)
class CstitNec:
    """Necessitation for [agent] from line i; needs the opt-in flag."""

    i: int
    agent: int


Justification = Union[Axiom, MP, KNec, RD, RCS, BoxNec, CstitNec]


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Proof:
    lines: tuple[ProofLine, ...]

    def __init__(self, lines: Iterable) -> None:
        normalized = []
        for entry in lines:
            if isinstance(entry, ProofLine):
                normalized.append(entry)
            else:
                formula, just = entry
                normalized.append(ProofLine(formula, just))
        object.__setattr__(self, "lines", tuple(normalized))

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)


@dataclass(frozen=True)
class LineVerdict:
    index: int
    ok: bool
    rule: str
    message: str
    scheme: Optional[str] = None


@dataclass(frozen=True)
class ProofVerdict:
    lines: tuple[LineVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.lines)

    def failures(self) -> tuple[LineVerdict, ...]:
        return tuple(v for v in self.lines if not v.ok)


def _premises(just: Justification) -> tuple[int, ...]:
    if isinstance(just, MP):
        return (just.i, just.j)
    if isinstance(just, (KNec, RD, BoxNec, CstitNec)):
        return (just.i,)
    return ()


def verify_proof(proof: Proof, cs: Optional[ConstantSpecification] = None,
                 *, tautology_mode: str = "oracle",
                 allow_modal_necessitation: bool = False) -> ProofVerdict:
    """Check every line of a proof; lines are numbered from 1.

    A line passes when its justification really yields its formula: axiom
    lines must match the declared scheme (or any scheme when none is
    declared), rule lines must point at earlier lines of the right shape,
    and specification lines must quote the constant specification
    verbatim. Verdicts are independent per line: a line may use the
    formula of an earlier failed line, so one bad justification does not
    cascade.
    """
    if cs is None:
        cs = ConstantSpecification(frozenset())
    verdicts: list[LineVerdict] = []
    formulas = [line.formula for line in proof.lines]

    for idx, line in enumerate(proof.lines, start=1):
        just = line.just
        rule = type(just).__name__

        def fail(message: str) -> LineVerdict:
            return LineVerdict(idx, False, rule, message)

        bad_ref = next((r for r in _premises(just)
                        if not 1 <= r < idx), None)
        if bad_ref is not None:
            verdicts.append(fail(
                f"premise reference {bad_ref} not strictly above line {idx}"))
            continue

        if isinstance(just, Axiom):
            got = match_axiom(line.formula, tautology_mode=tautology_mode)
            if got is None:
                verdicts.append(fail("no axiom scheme matches"))
            elif just.scheme is not None and just.scheme != got.scheme:
                verdicts.append(fail(
                    f"matches {got.scheme}, not the declared {just.scheme}"))
            else:
                verdicts.append(LineVerdict(
                    idx, True, rule, f"axiom {got.scheme}", got.scheme))
        elif isinstance(just, MP):
            want = implies(formulas[just.i - 1], line.formula)
            if formulas[just.j - 1] == want:
                verdicts.append(LineVerdict(
                    idx, True, rule, f"modus ponens from {just.i} and {just.j}"))
            else:
                verdicts.append(fail(
                    f"line {just.j} is not (line {just.i} -> line {idx})"))
        elif isinstance(just, KNec):
            if line.formula == Knows(formulas[just.i - 1]):
                verdicts.append(LineVerdict(
                    idx, True, rule, f"K-necessitation of {just.i}"))
            else:
                verdicts.append(fail(f"formula is not K applied to line {just.i}"))
        elif isinstance(just, RD):
            if match_rd(formulas[just.i - 1], line.formula):
                verdicts.append(LineVerdict(
                    idx, True, rule, f"announcement rule on {just.i}"))
            else:
                verdicts.append(fail(
                    f"not the box-stripped form of line {just.i}"))
        elif isinstance(just, RCS):
            if cs.contains_formula(line.formula):
                verdicts.append(LineVerdict(
                    idx, True, rule, "constant specification member"))
            else:
                verdicts.append(fail(
                    "formula is not in the constant specification"))
        elif isinstance(just, (BoxNec, CstitNec)):
            if not allow_modal_necessitation:
                verdicts.append(fail(
                    "modal necessitation is not a rule of the system; "
                    "enable it explicitly to accept this line"))
                continue
            if isinstance(just, BoxNec):
                want = Box(formulas[just.i - 1])
                name = "Box"
            else:
                want = Cstit(just.agent, formulas[just.i - 1])
                name = f"[{just.agent}]"
            if line.formula == want:
                verdicts.append(LineVerdict(
                    idx, True, rule, f"{name}-necessitation of {just.i}"))
            else:
                verdicts.append(fail(
                    f"formula is not {name} applied to line {just.i}"))
        else:
            verdicts.append(fail(f"unknown justification {rule}"))

    return ProofVerdict(tuple(verdicts))


def check_cs(cs: ConstantSpecification, *, tautology_mode: str = "oracle"
             ) -> tuple[Diagnostic, ...]:
    """Every payload must be an axiom instance; closure gaps are violations
    and auto-completed entries are flagged."""
    out: list[Diagnostic] = []
    entries = sorted(cs.entries,
                     key=lambda e: (len(e[0]), e[0], render(e[1])))
    for chain, payload in entries:
        if match_axiom(payload, tautology_mode=tautology_mode) is None:
            out.append(Diagnostic(
                VIOLATION, "cs-entry-not-axiom",
                f"{':'.join(chain)} annotates {render(payload)}, "
                "which matches no axiom scheme",
                (":".join(chain), render(payload))))
        if len(chain) > 1 and (chain[1:], payload) not in cs.entries:
            out.append(Diagnostic(
                VIOLATION, "cs-not-closed",
                f"entry {':'.join(chain)} lacks the shortened entry "
                f"{':'.join(chain[1:])} for {render(payload)}",
                (":".join(chain), render(payload))))
    for chain, payload in cs.auto_added:
        out.append(Diagnostic(
            WARNING, "cs-closure-added",
            f"closure added {':'.join(chain)} : {render(payload)}",
            (":".join(chain), render(payload))))
    return tuple(out)
