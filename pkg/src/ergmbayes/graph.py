"""Simple labelled graphs with constant-time edge toggles.

Undirected edges are stored canonically as ``(i, j)`` with ``i < j``; every
node also keeps a neighbour set so neighbourhood scans cost O(degree).
"""

from collections import deque
import csv
import io

import numpy as np


class GraphError(ValueError):
    pass


class Graph:
    """Network on ``n`` nodes with optional categorical node attributes.

    Parameters
    ----------
    n : int
        Number of nodes, labelled ``0..n-1``.
    directed : bool
        If False (default) dyads are unordered.
    attributes : dict, optional
        Mapping from attribute name to a length-``n`` sequence of labels.
    """

    def __init__(self, n, directed=False, attributes=None):
        n = int(n)
        if n <= 0:
            raise GraphError("node count must be positive, got %d" % n)
        self.n = n
        self.directed = bool(directed)
        self._out = [set() for _ in range(n)]
        self._in = [set() for _ in range(n)] if directed else self._out
        self._m = 0
        self.attributes = {}
        for name, values in (attributes or {}).items():
            self.set_attribute(name, values)

    # -- construction -----------------------------------------------------

    def set_attribute(self, name, values):
        values = [str(v) for v in values]
        if len(values) != self.n:
            raise GraphError(
                "attribute %r has %d values for %d nodes" % (name, len(values), self.n))
        self.attributes[name] = values

    def _check_dyad(self, i, j):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise GraphError("dyad (%d, %d) out of range for n=%d" % (i, j, self.n))
        if i == j:
            raise GraphError("self-loop (%d, %d) not allowed" % (i, j))

    def copy(self):
        g = Graph(self.n, self.directed)
        g._out = [set(s) for s in self._out]
        g._in = [set(s) for s in self._in] if self.directed else g._out
        g._m = self._m
        g.attributes = {k: list(v) for k, v in self.attributes.items()}
        return g

    # -- edge access ------------------------------------------------------

    def has_edge(self, i, j):
        return j in self._out[i]

    def add_edge(self, i, j):
        self._check_dyad(i, j)
        if j not in self._out[i]:
            self._out[i].add(j)
            self._in[j].add(i)
            self._m += 1

    def remove_edge(self, i, j):
        self._check_dyad(i, j)
        if j in self._out[i]:
            self._out[i].discard(j)
            self._in[j].discard(i)
            self._m -= 1

    def toggle(self, i, j):
        """Flip dyad ``(i, j)`` in place and return the graph."""
        self._check_dyad(i, j)
        if j in self._out[i]:
            self._out[i].discard(j)
            self._in[j].discard(i)
            self._m -= 1
        else:
            self._out[i].add(j)
            self._in[j].add(i)
            self._m += 1
        return self

    def neighbors(self, i):
        """Neighbours of ``i`` (out-neighbours for directed graphs)."""
        return self._out[i]

    @property
    def edge_count(self):
        return self._m

    @property
    def edges(self):
        return set(self.edge_list())

    def edge_list(self):
        """Sorted list of edges; undirected edges as ``(i, j)`` with ``i < j``."""
        if self.directed:
            return sorted((i, j) for i in range(self.n) for j in self._out[i])
        return sorted((i, j) for i in range(self.n) for j in self._out[i] if i < j)

    def degrees(self):
        if self.directed:
            return np.array([len(self._out[i]) + len(self._in[i]) for i in range(self.n)],
                            dtype=np.int64)
        return np.array([len(s) for s in self._out], dtype=np.int64)

    def adjacency(self):
        a = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, j in self.edge_list():
            a[i, j] = 1
            if not self.directed:
                a[j, i] = 1
        return a

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and self.directed == other.directed
                and self.edge_list() == other.edge_list()
                and self.attributes == other.attributes)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return "Graph(n=%d, %s, edges=%d)" % (self.n, kind, self._m)


def from_edge_list(n, pairs, directed=False, attributes=None):
    """Build a graph from an iterable of dyads, deduplicating repeats."""
    g = Graph(n, directed=directed, attributes=attributes)
    for i, j in pairs:
        g.add_edge(int(i), int(j))
    return g


def from_adjacency(adj, attributes=None):
    adj = np.asarray(adj)
    n = adj.shape[0]
    directed = not np.array_equal(adj, adj.T)
    if directed:
        ii, jj = np.nonzero(adj)
    else:
        ii, jj = np.nonzero(np.triu(adj, 1))
    return from_edge_list(n, zip(ii.tolist(), jj.tolist()), directed, attributes)


def toggle_edge(g, i, j):
    return g.toggle(i, j)


# -- structural summaries --------------------------------------------------

def degree_histogram(g):
    """Counts of nodes by degree, indexed ``0..n-1``."""
    return np.bincount(g.degrees(), minlength=g.n)


def shared_partner_counts(g):
    """Common-neighbour count for each edge, in ``edge_list`` order."""
    if g.directed:
        raise GraphError("shared partners are defined for undirected graphs only")
    return np.array([len(g._out[i] & g._out[j]) for i, j in g.edge_list()],
                    dtype=np.int64)


def esp_histogram(g):
    """Counts of edges by number of shared partners, indexed ``0..n-2``."""
    size = max(g.n - 1, 1)
    return np.bincount(shared_partner_counts(g), minlength=size)[:size]


def geodesic_histogram(g):
    """Dyad counts by shortest-path length ``1..n-1``; last entry counts
    unreachable dyads. Length ``n``."""
    if g.directed:
        raise GraphError("geodesic histogram is defined for undirected graphs only")
    n = g.n
    hist = np.zeros(n, dtype=np.int64)
    total_reached = 0
    for src in range(n):
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for v in g._out[u]:
                if v not in dist:
                    dist[v] = du
                    queue.append(v)
        for v, d in dist.items():
            if v > src:
                hist[d - 1] += 1
                total_reached += 1
    hist[n - 1] = n * (n - 1) // 2 - total_reached
    return hist


# -- file formats ------------------------------------------------------------

def read_edge_list(path, attributes=None):
    with open(path) as fh:
        return parse_edge_list(fh.read(), attributes=attributes)


def parse_edge_list(text, attributes=None):
    """Parse the edge-list format.

    The first non-comment line is ``n <count> <undirected|directed>``; each
    following line holds one 0-indexed dyad. ``#`` starts a comment.
    """
    header = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 3 or fields[0] != "n" or fields[2] not in ("undirected", "directed"):
                raise GraphError("line %d: expected 'n <count> <undirected|directed>'" % lineno)
            try:
                header = (int(fields[1]), fields[2] == "directed")
            except ValueError:
                raise GraphError("line %d: bad node count %r" % (lineno, fields[1])) from None
            continue
        if len(fields) != 2:
            raise GraphError("line %d: expected two node indices" % lineno)
        try:
            pairs.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise GraphError("line %d: non-integer node index" % lineno) from None
    if header is None:
        raise GraphError("edge list has no header line")
    n, directed = header
    return from_edge_list(n, pairs, directed=directed, attributes=attributes)


def write_edge_list(g, path=None):
    lines = ["n %d %s" % (g.n, "directed" if g.directed else "undirected")]
    lines += ["%d %d" % e for e in g.edge_list()]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_attributes(path, delimiter=None):
    with open(path) as fh:
        return parse_attributes(fh.read(), delimiter)


def parse_attributes(text, delimiter=None):
    """Parse a delimited attribute table (header row, one row per node)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphError("attribute table is empty")
    if delimiter is None:
        delimiter = "\t" if "\t" in lines[0] else ","
    rows = list(csv.reader(lines, delimiter=delimiter))
    names = [h.strip() for h in rows[0]]
    cols = {name: [] for name in names}
    for k, row in enumerate(rows[1:], 2):
        if len(row) != len(names):
            raise GraphError("attribute row %d has %d fields, header has %d"
                             % (k, len(row), len(names)))
        for name, value in zip(names, row):
            cols[name].append(value.strip())
    return cols


def write_attributes(attributes, path=None, delimiter="\t"):
    names = list(attributes)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*(attributes[k] for k in names)):
        writer.writerow(row)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_network(edges_path, attrs_path=None):
    attrs = read_attributes(attrs_path) if attrs_path else None
    return read_edge_list(edges_path, attributes=attrs)

