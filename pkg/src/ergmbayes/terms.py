"""ERGM sufficient statistics and change statistics.

``compute_stats`` evaluates every term directly from degree and
shared-partner counts; ``change_stats`` uses the compiled local-neighbourhood
kernel. The two paths are deliberately independent so each checks the other.
"""

from dataclasses import dataclass
import math
import re

import numpy as np

from . import _kernels as K
from .graph import GraphError, from_edge_list, shared_partner_counts

TERM_KINDS = ("edges", "nodematch", "gwdegree", "gwesp", "triangle", "kstar")
_KIND_CODE = {
    "edges": K.EDGES,
    "nodematch": K.NODEMATCH,
    "gwdegree": K.GWDEGREE,
    "gwesp": K.GWESP,
    "triangle": K.TRIANGLE,
    "kstar": K.KSTAR,
}


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelTerm:
    kind: str
    attribute: str = None
    decay: float = None
    k: int = None

    def __post_init__(self):
        if self.kind not in TERM_KINDS:
            raise ModelError("unknown term %r" % self.kind)
        if (self.decay is not None) != (self.kind in ("gwdegree", "gwesp")):
            raise ModelError("decay is required for gwdegree/gwesp and only for them")
        if self.decay is not None and not (self.decay >= 0 and math.isfinite(self.decay)):
            raise ModelError("decay must be a finite nonnegative number")
        if (self.attribute is not None) != (self.kind == "nodematch"):
            raise ModelError("an attribute is required for nodematch and only for it")
        if (self.k is not None) != (self.kind == "kstar"):
            raise ModelError("k is required for kstar and only for it")
        if self.k is not None and self.k < 2:
            raise ModelError("kstar needs k >= 2")

    @property
    def label(self):
        if self.kind == "nodematch":
            return "nodematch.%s" % self.attribute
        if self.kind in ("gwdegree", "gwesp"):
            return "%s.fixed.%s" % (self.kind, _fmt_number(self.decay))
        if self.kind == "kstar":
            return "kstar%d" % self.k
        return self.kind

    def render(self):
        if self.kind == "nodematch":
            if re.fullmatch(r"[A-Za-z_.][A-Za-z0-9_.]*", self.attribute):
                return "nodematch(%s)" % self.attribute
            quote = '"' if "'" in self.attribute else "'"
            return "nodematch(%s%s%s)" % (quote, self.attribute, quote)
        if self.kind in ("gwdegree", "gwesp"):
            return "%s(%s)" % (self.kind, _fmt_number(self.decay))
        if self.kind == "kstar":
            return "kstar(%d)" % self.k
        return self.kind


def _fmt_number(x):
    return repr(float(x))


@dataclass(frozen=True)
class ModelSpec:
    """Ordered tuple of terms; the order fixes the coordinates of s(y) and theta."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ModelError("a model needs at least one term")

    def __len__(self):
        return len(self.terms)

    @property
    def dim(self):
        return len(self.terms)

    @property
    def labels(self):
        return [t.label for t in self.terms]

    @property
    def attributes(self):
        return sorted({t.attribute for t in self.terms if t.attribute is not None})

    @property
    def dyad_independent(self):
        return all(t.kind in ("edges", "nodematch") for t in self.terms)

    def render(self):
        return " + ".join(t.render() for t in self.terms)

    def __str__(self):
        return self.render()


def _check(g, spec):
    if g.directed:
        raise ModelError("model terms are defined for undirected graphs only")
    for name in spec.attributes:
        if name not in g.attributes:
            raise ModelError("attribute %r is not present on the network" % name)


def gw_weights(counts, decay):
    """e^decay * (1 - (1 - e^-decay)^c) elementwise."""
    counts = np.asarray(counts, dtype=float)
    r = 1.0 - math.exp(-decay)
    return math.exp(decay) * (1.0 - np.power(r, counts))


def compute_stats(g, spec):
    """Sufficient statistics s(y), one coordinate per term."""
    _check(g, spec)
    deg = g.degrees()
    edges = g.edge_list()
    sp = None
    out = np.empty(spec.dim)
    for t, term in enumerate(spec.terms):
        if term.kind == "edges":
            out[t] = len(edges)
        elif term.kind == "nodematch":
            a = g.attributes[term.attribute]
            out[t] = sum(1 for i, j in edges if a[i] == a[j])
        elif term.kind == "kstar":
            out[t] = sum(math.comb(int(d), term.k) for d in deg)
        elif term.kind == "gwdegree":
            out[t] = gw_weights(deg, term.decay).sum()
        else:
            if sp is None:
                sp = shared_partner_counts(g)
            if term.kind == "triangle":
                out[t] = sp.sum() / 3
            else:
                out[t] = gw_weights(sp, term.decay).sum()
    return out


class EncodedSpec:
    """Array form of a ``ModelSpec`` bound to one network's attributes."""

    def __init__(self, spec, g):
        _check(g, spec)
        self.spec = spec
        names = spec.attributes
        self.kinds = np.array([_KIND_CODE[t.kind] for t in spec.terms], dtype=np.int64)
        self.params = np.array(
            [t.decay if t.decay is not None else (t.k or 0) for t in spec.terms], dtype=float)
        self.acol = np.array(
            [names.index(t.attribute) if t.attribute else -1 for t in spec.terms], dtype=np.int64)
        attrs = np.zeros((max(len(names), 1), g.n), dtype=np.int64)
        for c, name in enumerate(names):
            _, codes = np.unique(np.asarray(g.attributes[name], dtype=object).astype(str),
                                 return_inverse=True)
            attrs[c] = codes
        self.attrs = attrs

    @property
    def arrays(self):
        return self.kinds, self.params, self.acol, self.attrs


class NetworkState:
    """Mutable array representation of an undirected graph for the kernels."""

    def __init__(self, g):
        if g.directed:
            raise GraphError("the sampler supports undirected graphs only")
        n = g.n
        self.n = n
        self.adj = np.zeros((n, n), dtype=np.uint8)
        self.deg = np.zeros(n, dtype=np.int64)
        self.nbr = np.zeros((n, n), dtype=np.int32)
        self.npos = np.full((n, n), -1, dtype=np.int32)
        self.elist = np.zeros((max(n * (n - 1) // 2, 1), 2), dtype=np.int32)
        self.epos = np.full((n, n), -1, dtype=np.int32)
        self.m = np.zeros(1, dtype=np.int64)
        for i, j in g.edge_list():
            K.toggle(self.adj, self.deg, self.nbr, self.npos, self.elist, self.epos,
                     self.m, i, j)

    def copy(self):
        new = object.__new__(NetworkState)
        new.n = self.n
        for name in ("adj", "deg", "nbr", "npos", "elist", "epos", "m"):
            setattr(new, name, getattr(self, name).copy())
        return new

    def toggle(self, i, j):
        K.toggle(self.adj, self.deg, self.nbr, self.npos, self.elist, self.epos, self.m, i, j)

    def edge_list(self):
        e = self.elist[:self.m[0]]
        return sorted(map(tuple, e.tolist()))

    def to_graph(self, attributes=None):
        return from_edge_list(self.n, self.edge_list(), attributes=attributes)

    def upper_bits(self):
        """Edge indicators of dyads i < j in row-major order."""
        iu = np.triu_indices(self.n, 1)
        return self.adj[iu]


def change_stats(g, spec, i, j, encoded=None):
    """s(y with dyad ij present) - s(y with dyad ij absent); ``g`` is untouched."""
    if i == j:
        raise GraphError("self-loop (%d, %d) not allowed" % (i, j))
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise GraphError("dyad (%d, %d) out of range for n=%d" % (i, j, g.n))
    enc = encoded or EncodedSpec(spec, g)
    state = NetworkState(g)
    out = np.empty(spec.dim)
    K.change_stats(state.adj, state.deg, state.nbr, i, j, *enc.arrays, out)
    return out


def dyad_design(g, spec, encoded=None):
    """Change-statistic matrix (one row per dyad i < j) and edge indicators."""
    enc = encoded or EncodedSpec(spec, g)
    state = NetworkState(g)
    return K.dyad_design(state.adj, state.deg, state.nbr, *enc.arrays)
