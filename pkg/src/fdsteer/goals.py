"""Goal language and model files.

Goals use a GNU-Prolog-flavoured surface syntax (#=, fd_all_different,
trace_labeling) restricted to linear arithmetic, plus a handful of builtins.
Model files are line-oriented directive lists that declare variables and the
console buttons; `$NAME` parameters and `Q1..Q8`-style identifier ranges are
expanded textually before a line is interpreted.
"""
import re
from dataclasses import dataclass, field

from .constraints import Relation

__all__ = [
    "LinExpr", "Conj", "LinearRel", "AllDifferent", "DomainDecl",
    "Labeling", "FdLabeling", "Safe", "Minimize", "NeqOffset",
    "Relation", "GoalSyntaxError", "ModelFormatError", "Model",
    "parse_goal", "render_goal", "parse_model",
]


class GoalSyntaxError(ValueError):
    def __init__(self, message, line, col):
        super().__init__("line %d, column %d: %s" % (line, col, message))
        self.message = message
        self.line = line
        self.col = col


class ModelFormatError(ValueError):
    def __init__(self, message, line):
        super().__init__("line %d: %s" % (line, message))
        self.message = message
        self.line = line


@dataclass(frozen=True)
class LinExpr:
    """Linear expression: ((coef, varname), ...) in source order plus a
    constant. Duplicate variables are merged into their first occurrence."""
    terms: tuple = ()
    const: int = 0

    @classmethod
    def make(cls, pairs, const=0):
        out = []
        where = {}
        for coef, name in pairs:
            if name in where:
                i = where[name]
                out[i] = (out[i][0] + coef, name)
            else:
                where[name] = len(out)
                out.append((coef, name))
        return cls(tuple(t for t in out if t[0] != 0), const)


@dataclass(frozen=True)
class Conj:
    goals: tuple


@dataclass(frozen=True)
class LinearRel:
    lhs: LinExpr
    rel: Relation
    rhs: LinExpr


@dataclass(frozen=True)
class AllDifferent:
    vars: tuple


@dataclass(frozen=True)
class DomainDecl:
    vars: tuple
    lo: int
    hi: int


@dataclass(frozen=True)
class Labeling:
    """Traced labeling: each variable gets a visible search node."""
    vars: tuple


@dataclass(frozen=True)
class FdLabeling:
    """Untraced labeling of one variable (a single opaque call node)."""
    var: str


@dataclass(frozen=True)
class Safe:
    vars: tuple


@dataclass(frozen=True)
class Minimize:
    goal: object
    cost: str


@dataclass(frozen=True)
class NeqOffset:
    """x != y + c. No dedicated surface syntax; renders as a disequality."""
    x: str
    y: str
    c: int


# --- tokenizer ---

_SCAN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<int>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>#=<|#>=|#\\=|#=|#<|#>)"
    r"|(?P<punct>[\[\](),+\-*])")

_RELOPS = {r.value: r for r in Relation}


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text):
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _SCAN.match(text, pos)
        if not m:
            raise GoalSyntaxError("unexpected character %r" % text[pos],
                                  line, col)
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


def _is_var(name):
    return name[:1].isupper()


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise GoalSyntaxError(message, tok.line, tok.col)

    def expect_punct(self, ch):
        t = self.peek()
        if t.kind != "punct" or t.text != ch:
            self.fail("expected '%s'" % ch)
        return self.next()

    def at_punct(self, ch):
        t = self.peek()
        return t.kind == "punct" and t.text == ch

    # goal := atom { "," atom }
    def parse_seq(self):
        atoms = [self.parse_atom()]
        while self.at_punct(","):
            self.next()
            atoms.append(self.parse_atom())
        return atoms

    def parse_goal(self):
        atoms = self.parse_seq()
        t = self.peek()
        if t.kind != "eof":
            self.fail("unexpected %r after goal" % t.text)
        return atoms[0] if len(atoms) == 1 else Conj(tuple(atoms))

    def parse_atom(self):
        t = self.peek()
        if t.kind == "name" and not _is_var(t.text):
            return self.parse_builtin()
        return self.parse_rel()

    def parse_builtin(self):
        t = self.next()
        name = t.text
        if name == "fd_domain":
            self.expect_punct("(")
            vs = self.parse_varlist()
            self.expect_punct(",")
            lo = self.parse_int()
            self.expect_punct(",")
            hi = self.parse_int()
            self.expect_punct(")")
            return DomainDecl(vs, lo, hi)
        if name == "fd_all_different":
            return AllDifferent(self.parse_paren_varlist())
        if name in ("trace_labeling", "labeling"):
            return Labeling(self.parse_paren_varlist())
        if name == "fd_labeling":
            self.expect_punct("(")
            v = self.parse_var()
            self.expect_punct(")")
            return FdLabeling(v)
        if name == "safe":
            return Safe(self.parse_paren_varlist())
        if name == "minimize":
            return self.parse_minimize()
        self.fail("unknown construct '%s'" % name, t)

    def parse_minimize(self):
        self.expect_punct("(")
        atoms = []
        while True:
            t = self.peek()
            if (t.kind == "name" and _is_var(t.text)
                    and self.peek(1).kind == "punct"
                    and self.peek(1).text == ")"):
                cost = self.next().text
                self.next()
                break
            atoms.append(self.parse_atom())
            self.expect_punct(",")
        if not atoms:
            self.fail("minimize needs a goal before the cost variable")
        goal = atoms[0] if len(atoms) == 1 else Conj(tuple(atoms))
        return Minimize(goal, cost)

    def parse_paren_varlist(self):
        self.expect_punct("(")
        vs = self.parse_varlist()
        self.expect_punct(")")
        return vs

    def parse_varlist(self):
        self.expect_punct("[")
        vs = [self.parse_var()]
        while self.at_punct(","):
            self.next()
            vs.append(self.parse_var())
        self.expect_punct("]")
        return tuple(vs)

    def parse_var(self):
        t = self.peek()
        if t.kind != "name" or not _is_var(t.text):
            self.fail("expected a variable name")
        return self.next().text

    def parse_int(self):
        neg = False
        if self.at_punct("-"):
            self.next()
            neg = True
        t = self.peek()
        if t.kind != "int":
            self.fail("expected an integer")
        v = int(self.next().text)
        return -v if neg else v

    def parse_rel(self):
        lhs = self.parse_expr()
        t = self.peek()
        if t.kind != "op":
            self.fail("expected a relational operator (#=, #\\=, #<, #=<, "
                      "#>, #>=)")
        rel = _RELOPS[self.next().text]
        rhs = self.parse_expr()
        return LinearRel(lhs, rel, rhs)

    def parse_expr(self):
        pairs = []
        const = 0
        sign = 1
        if self.at_punct("-"):
            self.next()
            sign = -1
        while True:
            coef, name = self.parse_term()
            if name is None:
                const += sign * coef
            else:
                pairs.append((sign * coef, name))
            if self.at_punct("*"):
                self.fail("only integer*variable products are allowed")
            if self.at_punct("+"):
                self.next()
                sign = 1
            elif self.at_punct("-"):
                self.next()
                sign = -1
            else:
                return LinExpr.make(pairs, const)

    def parse_term(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            v = int(t.text)
            if self.at_punct("*"):
                self.next()
                u = self.peek()
                if u.kind != "name" or not _is_var(u.text):
                    self.fail("expected a variable after '*'")
                return v, self.next().text
            return v, None
        if t.kind == "name" and _is_var(t.text):
            self.next()
            return 1, t.text
        self.fail("expected an integer or a variable")


def parse_goal(text):
    return _Parser(text).parse_goal()


# --- printer ---

def _render_expr(e):
    parts = []
    for coef, name in e.terms:
        mag = abs(coef)
        body = name if mag == 1 else "%d*%s" % (mag, name)
        if coef < 0:
            parts.append("-" + body)
        elif parts:
            parts.append("+" + body)
        else:
            parts.append(body)
    if e.const or not parts:
        if not parts:
            parts.append(str(e.const))
        else:
            parts.append(("+%d" if e.const >= 0 else "%d") % e.const)
    return "".join(parts)


def render_goal(ast):
    if isinstance(ast, Conj):
        return ", ".join(render_goal(g) for g in ast.goals)
    if isinstance(ast, LinearRel):
        return "%s %s %s" % (_render_expr(ast.lhs), ast.rel.value,
                             _render_expr(ast.rhs))
    if isinstance(ast, AllDifferent):
        return "fd_all_different([%s])" % ",".join(ast.vars)
    if isinstance(ast, DomainDecl):
        return "fd_domain([%s],%d,%d)" % (",".join(ast.vars), ast.lo, ast.hi)
    if isinstance(ast, Labeling):
        return "trace_labeling([%s])" % ",".join(ast.vars)
    if isinstance(ast, FdLabeling):
        return "fd_labeling(%s)" % ast.var
    if isinstance(ast, Safe):
        return "safe([%s])" % ",".join(ast.vars)
    if isinstance(ast, Minimize):
        return "minimize(%s, %s)" % (render_goal(ast.goal), ast.cost)
    if isinstance(ast, NeqOffset):
        return "%s %s %s" % (ast.x, Relation.NEQ.value,
                             _render_expr(LinExpr(((1, ast.y),), ast.c)))
    raise TypeError("not a goal node: %r" % (ast,))


# --- model files ---

@dataclass
class Model:
    name: str = ""
    params: dict = field(default_factory=dict)
    declarations: tuple = ()   # ((names...), lo, hi) in source order
    varnames: tuple = ()       # ((name, display), ...) registration order
    buttons: tuple = ()        # goal source texts in source order

    def all_vars(self):
        return [n for names, _, _ in self.declarations for n in names]

    def display_of(self, name):
        for n, d in self.varnames:
            if n == name:
                return d
        return name


_RANGE = re.compile(r"\b([A-Za-z_][A-Za-z0-9_]*?)(\d+)\.\.\1(\d+)\b")
_PARAM = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)")
_BOUNDS = re.compile(r"^(-?\d+)\.\.(-?\d+)$")


def _strip_comment(line):
    out = []
    quoted = False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def _expand_ranges(line, lineno):
    def rep(m):
        prefix, a, b = m.group(1), int(m.group(2)), int(m.group(3))
        if a > b:
            raise ModelFormatError(
                "empty identifier range %s" % m.group(0), lineno)
        return ",".join("%s%d" % (prefix, i) for i in range(a, b + 1))
    return _RANGE.sub(rep, line)


def _take_quoted(rest, lineno):
    rest = rest.lstrip()
    if not rest.startswith('"'):
        raise ModelFormatError("expected a quoted string", lineno)
    end = rest.find('"', 1)
    if end < 0:
        raise ModelFormatError("unterminated quoted string", lineno)
    return rest[1:end], rest[end + 1:]


def _split_names(text):
    return [w for w in re.split(r"[,\s]+", text.strip()) if w]


def parse_model(text, overrides=None):
    """Interpret a model file.

    overrides maps parameter names to values that win over `param` defaults.
    """
    overrides = overrides or {}
    model = Model()
    declared = set()
    explicit_names = []
    declarations = []
    buttons = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue

        def substitute(m):
            key = m.group(1)
            if key not in model.params:
                raise ModelFormatError("unknown parameter $%s" % key, lineno)
            return str(model.params[key])

        line = _PARAM.sub(substitute, line)
        line = _expand_ranges(line, lineno)
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "model":
            model.name = rest
        elif word == "param":
            parts = rest.split()
            if len(parts) != 2 or not re.fullmatch(r"-?\d+", parts[1]):
                raise ModelFormatError("param needs a name and an integer",
                                       lineno)
            pname = parts[0]
            model.params[pname] = int(overrides.get(pname, parts[1]))
        elif word == "vars":
            head, sep, bounds = rest.rpartition(" in ")
            if not sep:
                raise ModelFormatError("vars needs 'in lo..hi'", lineno)
            m = _BOUNDS.match(bounds.strip())
            if not m:
                raise ModelFormatError("bad bounds %r" % bounds.strip(),
                                       lineno)
            names = _split_names(head)
            if not names:
                raise ModelFormatError("vars needs at least one name", lineno)
            for n in names:
                if n in declared:
                    raise ModelFormatError("duplicate variable name %s" % n,
                                           lineno)
                declared.add(n)
            declarations.append((tuple(names), int(m.group(1)),
                                 int(m.group(2))))
        elif word == "names":
            for entry in _split_names(rest):
                n, sep, disp = entry.partition("=")
                if not sep or not n or not disp:
                    raise ModelFormatError("names entries look like V=display",
                                           lineno)
                if n not in declared:
                    raise ModelFormatError("names mentions undeclared %s" % n,
                                           lineno)
                explicit_names.append((n, disp))
        elif word == "button":
            if rest.startswith("each"):
                tmpl, tail = _take_quoted(rest[len("each"):], lineno)
                tail = tail.strip()
                if not tail.startswith("in "):
                    raise ModelFormatError("button each needs 'in <names>'",
                                           lineno)
                targets = _split_names(tail[3:])
                if not targets:
                    raise ModelFormatError("button each got an empty list",
                                           lineno)
                texts = [tmpl.replace("%", n) for n in targets]
            else:
                text_one, tail = _take_quoted(rest, lineno)
                if tail.strip():
                    raise ModelFormatError("trailing junk after button text",
                                           lineno)
                texts = [text_one]
            for t in texts:
                try:
                    parse_goal(t)
                except GoalSyntaxError as exc:
                    raise ModelFormatError(
                        "bad button goal %r (%s)" % (t, exc), lineno) from exc
                buttons.append(t)
        else:
            raise ModelFormatError("unknown directive '%s'" % word, lineno)
    model.declarations = tuple(declarations)
    model.buttons = tuple(buttons)
    if explicit_names:
        model.varnames = tuple(explicit_names)
    else:
        model.varnames = tuple((n, n) for n in model.all_vars())
    return model
