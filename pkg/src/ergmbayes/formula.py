"""Recursive-descent parser for model formulas such as

    edges + nodematch('Grade') + gwdegree(0.2, fixed = TRUE) + gwesp(0.2)

Grammar::

    formula := term ('+' term)*
    term    := IDENT ('(' [arg (',' arg)*] ')')?
    arg     := [IDENT '='] value
    value   := ['-'] NUMBER | IDENT | STRING
"""

import re

from .terms import ModelError, ModelSpec, ModelTerm


class FormulaError(ModelError):
    def __init__(self, message, text=None, pos=None):
        self.pos = pos
        if text is not None and pos is not None:
            message = "%s at column %d\n  %s\n  %s^" % (message, pos + 1, text, " " * pos)
        super().__init__(message)


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_.][A-Za-z0-9_.]*)
  | (?P<string>'[^']*'|"[^"]*")
  | (?P<op>[-+(),=])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise FormulaError("unexpected character %r" % text[pos], text, pos)
        if mt.lastgroup != "ws":
            tokens.append((mt.lastgroup, mt.group(), pos))
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of formula"
            raise FormulaError("expected %s, found %r" % (want, got), self.text, tok[2])
        self.i += 1
        return tok

    def formula(self):
        if self.peek()[0] == "end":
            raise FormulaError("empty formula")
        terms = [self.term()]
        while self.peek()[1] == "+" and self.peek()[0] == "op":
            self.take("op", "+")
            terms.append(self.term())
        self.take("end")
        return terms

    def term(self):
        name = self.take("ident")
        args, kwargs = [], {}
        if self.peek()[1] == "(":
            self.take("op", "(")
            if self.peek()[1] != ")":
                self.arg(args, kwargs)
                while self.peek()[1] == ",":
                    self.take("op", ",")
                    self.arg(args, kwargs)
            self.take("op", ")")
        return _build_term(name, args, kwargs, self.text)

    def arg(self, args, kwargs):
        tok = self.peek()
        if tok[0] == "ident" and self.tokens[self.i + 1][1] == "=":
            self.take()
            self.take("op", "=")
            if tok[1] in kwargs:
                raise FormulaError("repeated argument %r" % tok[1], self.text, tok[2])
            kwargs[tok[1]] = self.value()
        else:
            if kwargs:
                raise FormulaError("positional argument after keyword", self.text, tok[2])
            args.append(self.value())

    def value(self):
        tok = self.peek()
        if tok[1] == "-" and self.tokens[self.i + 1][0] == "number":
            self.take()
            num = self.take()
            return ("number", "-" + num[1], tok[2])
        if tok[0] in ("number", "ident", "string"):
            self.take()
            return tok
        raise FormulaError("expected a value, found %r" % (tok[1] or "end of formula"),
                           self.text, tok[2])


def _number(tok, text, integer=False):
    if tok[0] != "number":
        raise FormulaError("expected a number, found %r" % tok[1], text, tok[2])
    if integer:
        try:
            return int(tok[1])
        except ValueError:
            raise FormulaError("expected an integer, found %r" % tok[1], text, tok[2]) from None
    return float(tok[1])


def _build_term(name_tok, args, kwargs, text):
    name, pos = name_tok[1], name_tok[2]

    def bad(msg):
        return FormulaError("%s: %s" % (name, msg), text, pos)

    if name in ("edges", "triangle"):
        if args or kwargs:
            raise bad("takes no arguments")
        return ModelTerm(name)
    if name == "nodematch":
        if len(args) != 1 or kwargs:
            raise bad("expects exactly one attribute name")
        tok = args[0]
        if tok[0] == "number":
            raise bad("attribute name must be an identifier or a string")
        attr = tok[1][1:-1] if tok[0] == "string" else tok[1]
        if not attr:
            raise bad("empty attribute name")
        return ModelTerm("nodematch", attribute=attr)
    if name in ("gwdegree", "gwesp"):
        kw = dict(kwargs)
        decay = kw.pop("decay", None)
        fixed = kw.pop("fixed", None)
        if kw:
            raise bad("unknown argument %r" % next(iter(kw)))
        if args:
            if decay is not None or len(args) > 1:
                raise bad("expects a single decay value")
            decay = args[0]
        if decay is None:
            raise bad("missing decay value")
        if fixed is not None and fixed[1] not in ("TRUE", "T", "True", "true"):
            raise bad("only fixed decay is supported")
        value = _number(decay, text)
        if value < 0:
            raise bad("decay must be nonnegative")
        return ModelTerm(name, decay=value)
    if name == "kstar":
        if len(args) != 1 or kwargs:
            raise bad("expects one integer k")
        k = _number(args[0], text, integer=True)
        if k < 2:
            raise bad("k must be at least 2")
        return ModelTerm("kstar", k=k)
    raise FormulaError("unknown term %r" % name, text, pos)


def parse_formula(text):
    """Parse ``text`` into a ``ModelSpec``; raises ``FormulaError`` on bad input."""
    if not isinstance(text, str) or not text.strip():
        raise FormulaError("empty formula")
    terms = _Parser(text).formula()
    seen = set()
    for t in terms:
        if t in seen:
            raise FormulaError("duplicate term %s" % t.render())
        seen.add(t)
    return ModelSpec(tuple(terms))


def render_formula(spec):
    return spec.render()
