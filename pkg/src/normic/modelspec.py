"""Line-oriented text format for probability models, with diagnostics.

A model document looks like::

    # the seven-state two-cell example
    states: 1 2 3 4 5 6 7
    evidence low = {1, 2, 3}
    evidence high = {4, 5, 6, 7}
    prior: 1=0.2 2=0.2 3=0.1 4=0.2 5=0.1 6=0.1 7=0.1
    question: finest
    threshold: 0.5
    rule: sufficiency
    variant: stalnaker

Numbers are exact rationals: either ``a/b`` or a decimal literal, which is
converted exactly (``.9999999`` is 9999999/10^7, never a float).  The
question section may be ``finest`` (every state its own answer),
``single`` (one big answer), or an explicit ``state=label`` map.  Omitting
it means ``finest``.

Infinite scenarios cannot be written out state by state; they are reached
through named generators instead::

    states: generator geometric depth=64
    states: generator racing coins=10
    states: generator decay measuring=log

Parsing never raises on bad input: it returns a result whose diagnostics
carry line/column positions, and a document only when there were no errors.
`render` produces a canonical text that reparses to an equal document.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .genprob import ModelError, ProbabilityStructure, Question

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"

RULES = ("sufficiency", "sufficiency-plus")
VARIANTS = ("stalnaker", "williamson")
GENERATORS = ("geometric", "racing", "decay")

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?$")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    severity: str = SEVERITY_ERROR

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass
class ModelDocument:
    states: tuple = ()
    generator: dict | None = None
    evidence: dict = field(default_factory=dict)
    prior: dict = field(default_factory=dict)
    question: dict | str = "finest"
    threshold: Fraction = Fraction(1, 2)
    rule: str = "sufficiency"
    variant: str = "stalnaker"

    def __eq__(self, other):
        if not isinstance(other, ModelDocument):
            return NotImplemented
        return (self.states, self.generator, self.evidence, self.prior,
                self.question, self.threshold, self.rule, self.variant) == \
               (other.states, other.generator, other.evidence, other.prior,
                other.question, other.threshold, other.rule, other.variant)


@dataclass(frozen=True)
class ParseResult:
    document: ModelDocument | None
    diagnostics: tuple

    @property
    def ok(self) -> bool:
        return self.document is not None

    def errors(self):
        return tuple(d for d in self.diagnostics
                     if d.severity == SEVERITY_ERROR)


def _parse_rational(token: str):
    if not _NUMBER.match(token):
        return None
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        return None


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.diags = []
        self.doc = ModelDocument()
        self.seen = set()

    def diag(self, line_no, column, message, severity=SEVERITY_ERROR):
        self.diags.append(Diagnostic(line_no, column, message, severity))

    def run(self) -> ParseResult:
        for i, raw in enumerate(self.lines, start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            self.line_no = i
            self.parse_line(line)
        self.finish()
        errors = [d for d in self.diags if d.severity == SEVERITY_ERROR]
        return ParseResult(None if errors else self.doc, tuple(self.diags))

    def parse_line(self, line):
        if line != line.lstrip():
            self.diag(self.line_no, 1, "unexpected indentation")
            line = line.lstrip()
        m = re.match(r"^evidence\s+([A-Za-z_][\w-]*)\s*=\s*(.*)$", line)
        if m:
            self.parse_evidence(m.group(1), m.group(2),
                                line.index("=") + 2)
            return
        m = re.match(r"^([a-z-]+)\s*:\s*(.*)$", line)
        if not m:
            self.diag(self.line_no, 1,
                      f"cannot parse line: {line.strip()!r}")
            return
        key, rest = m.group(1), m.group(2).strip()
        column = line.index(":") + 2
        handler = getattr(self, f"section_{key.replace('-', '_')}", None)
        if handler is None:
            self.diag(self.line_no, 1, f"unknown section {key!r}")
            return
        if key in self.seen:
            self.diag(self.line_no, 1, f"duplicate section {key!r}")
            return
        self.seen.add(key)
        handler(rest, column)

    # -- sections -----------------------------------------------------

    def section_states(self, rest, column):
        tokens = rest.split()
        if tokens and tokens[0] == "generator":
            if len(tokens) < 2 or tokens[1] not in GENERATORS:
                self.diag(self.line_no, column,
                          f"generator must be one of {', '.join(GENERATORS)}")
                return
            params = {}
            for tok in tokens[2:]:
                if "=" not in tok:
                    self.diag(self.line_no, column,
                              f"generator parameter {tok!r} needs key=value")
                    return
                k, v = tok.split("=", 1)
                params[k] = v
            self.doc.generator = {"name": tokens[1], **params}
            return
        if not tokens:
            self.diag(self.line_no, column, "no states listed")
            return
        seen = set()
        for tok in tokens:
            if tok in seen:
                self.diag(self.line_no, column, f"duplicate state id {tok!r}")
                return
            seen.add(tok)
        self.doc.states = tuple(tokens)

    def section_prior(self, rest, column):
        prior = {}
        for tok in rest.split():
            if "=" not in tok:
                self.diag(self.line_no, column,
                          f"prior entry {tok!r} needs state=mass")
                return
            state, value = tok.split("=", 1)
            mass = _parse_rational(value)
            if mass is None:
                self.diag(self.line_no, column,
                          f"cannot read {value!r} as a rational")
                return
            if state in prior:
                self.diag(self.line_no, column,
                          f"duplicate prior for state {state!r}")
                return
            prior[state] = mass
        self.doc.prior = prior

    def section_question(self, rest, column):
        if rest in ("finest", "single", ""):
            self.doc.question = rest or "finest"
            return
        labels = {}
        for tok in rest.split():
            if "=" not in tok:
                self.diag(self.line_no, column,
                          f"question entry {tok!r} needs state=label")
                return
            state, label = tok.split("=", 1)
            if state in labels:
                self.diag(self.line_no, column,
                          f"duplicate question label for {state!r}")
                return
            labels[state] = label
        self.doc.question = labels

    def section_threshold(self, rest, column):
        value = _parse_rational(rest)
        if value is None:
            self.diag(self.line_no, column,
                      f"cannot read {rest!r} as a rational")
            return
        if not 0 < value <= 1:
            self.diag(self.line_no, column,
                      f"threshold {rest} must lie in (0, 1]")
            return
        self.doc.threshold = value

    def section_rule(self, rest, column):
        if rest not in RULES:
            self.diag(self.line_no, column,
                      f"rule must be one of {', '.join(RULES)}")
            return
        self.doc.rule = rest

    def section_variant(self, rest, column):
        if rest not in VARIANTS:
            self.diag(self.line_no, column,
                      f"variant must be one of {', '.join(VARIANTS)}")
            return
        self.doc.variant = rest

    def parse_evidence(self, name, rest, column):
        m = re.match(r"^\{(.*)\}$", rest.strip())
        if not m:
            self.diag(self.line_no, column,
                      "evidence needs a {state, ...} set literal")
            return
        members = [tok.strip() for tok in m.group(1).split(",") if tok.strip()]
        if not members:
            self.diag(self.line_no, column, f"evidence {name!r} is empty")
            return
        if name in self.doc.evidence:
            self.diag(self.line_no, 1, f"duplicate evidence name {name!r}")
            return
        self.doc.evidence[name] = frozenset(members)

    # -- document-level validation --------------------------------------

    def finish(self):
        doc = self.doc
        if doc.generator is not None:
            if doc.states or doc.prior or doc.evidence:
                self.diag(len(self.lines), 1,
                          "a generator model cannot also enumerate states, "
                          "priors, or evidence")
            return
        if not doc.states:
            if "states" not in self.seen:
                self.diag(len(self.lines) or 1, 1, "no states section")
            return
        states = set(doc.states)
        for name, members in doc.evidence.items():
            unknown = members - states
            if unknown:
                self.diag(len(self.lines), 1,
                          f"evidence {name!r} mentions unknown states "
                          f"{sorted(unknown)}")
        if doc.prior:
            missing = states - set(doc.prior)
            extra = set(doc.prior) - states
            if missing:
                self.diag(len(self.lines), 1,
                          f"prior misses states {sorted(missing)}")
            if extra:
                self.diag(len(self.lines), 1,
                          f"prior mentions unknown states {sorted(extra)}")
            if not missing and not extra:
                total = sum(doc.prior.values())
                if total != 1:
                    self.diag(len(self.lines), 1,
                              f"prior mass {total} != 1")
        else:
            self.diag(len(self.lines), 1, "no prior section")
        if isinstance(doc.question, dict):
            missing = states - set(doc.question)
            extra = set(doc.question) - states
            if missing:
                self.diag(len(self.lines), 1,
                          f"question misses states {sorted(missing)}")
            if extra:
                self.diag(len(self.lines), 1,
                          f"question mentions unknown states {sorted(extra)}")
        if not doc.evidence:
            self.diag(len(self.lines), 1, "no evidence sections")


def parse(text: str) -> ParseResult:
    return _Parser(text).run()


def render(doc: ModelDocument) -> str:
    """Canonical text for a document; parse(render(parse(x))) is a fixpoint."""
    lines = []
    if doc.generator is not None:
        params = " ".join(f"{k}={v}" for k, v in sorted(doc.generator.items())
                          if k != "name")
        lines.append(f"states: generator {doc.generator['name']}"
                     + (f" {params}" if params else ""))
    else:
        lines.append("states: " + " ".join(doc.states))
        for name in sorted(doc.evidence):
            members = ", ".join(sorted(doc.evidence[name],
                                       key=doc.states.index))
            lines.append(f"evidence {name} = {{{members}}}")
        lines.append("prior: " + " ".join(
            f"{s}={doc.prior[s]}" for s in doc.states))
    if isinstance(doc.question, dict):
        lines.append("question: " + " ".join(
            f"{s}={doc.question[s]}" for s in sorted(doc.question)))
    else:
        lines.append(f"question: {doc.question}")
    lines.append(f"threshold: {doc.threshold}")
    lines.append(f"rule: {doc.rule}")
    lines.append(f"variant: {doc.variant}")
    return "\n".join(lines) + "\n"


def build_structure(doc: ModelDocument) -> ProbabilityStructure:
    """Instantiate an enumerated document.  Generator documents are
    resolved by the command-line layer, which owns the scenario builders."""
    if doc.generator is not None:
        raise ModelError("generator documents are built by their scenario")
    if isinstance(doc.question, dict):
        question = Question(dict(doc.question), name="document")
    elif doc.question == "single":
        question = Question.single_cell()
    else:
        question = Question.finest()
    return ProbabilityStructure(doc.states, doc.evidence, doc.prior,
                                question=question, threshold=doc.threshold)
