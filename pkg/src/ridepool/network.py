"""Road-network graph with driving-time and walking-distance metrics.

A network is a directed graph over intersection nodes. Driving follows the
directed edges weighted by travel time; walking treats every edge as
bidirectional and is weighted by physical length. Unreachable pairs are
reported as ``math.inf``, never as an error, so downstream feasibility
checks can treat reachability uniformly.

Shortest paths are computed on demand and memoized per source node. For
networks at or below ``apsp_threshold`` nodes the full all-pairs matrix is
computed lazily on first query, which keeps repeated queries O(1).
"""

from __future__ import annotations

import csv
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

INF = math.inf

# Sources memoized per metric before the oldest entry is evicted (only
# relevant above the all-pairs threshold).
MEMO_LIMIT = 4096


class NetworkFormatError(ValueError):
    """Raised when a nodes/edges table cannot be parsed or validated."""


@dataclass(frozen=True)
class Edge:
    """Directed road segment between two nodes."""

    src: int
    dst: int
    length: float
    drive_time: float


class RoadNetwork:
    """Immutable directed road graph with cached shortest-path queries.

    Args:
        coords: (n, 2) array of node x/y positions in meters.
        edges: iterable of Edge with endpoints in [0, n).
        apsp_threshold: node count at or below which the full all-pairs
            shortest-path matrices are computed lazily on first query.
    """

    def __init__(self, coords, edges, apsp_threshold: int = 2000):
        coords = np.asarray(coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError("coords must be an (n, 2) array")
        n = coords.shape[0]
        edges = tuple(edges)
        for e in edges:
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise NetworkFormatError(f"edge {e.src}->{e.dst} references unknown node")
            if e.drive_time <= 0 or e.length <= 0:
                raise NetworkFormatError(
                    f"edge {e.src}->{e.dst} must have positive length and drive_time"
                )
        self._coords = coords
        self._edges = edges
        self._apsp_threshold = apsp_threshold

        rows = np.fromiter((e.src for e in edges), dtype=np.int64, count=len(edges))
        cols = np.fromiter((e.dst for e in edges), dtype=np.int64, count=len(edges))
        times = np.fromiter((e.drive_time for e in edges), dtype=float, count=len(edges))
        lengths = np.fromiter((e.length for e in edges), dtype=float, count=len(edges))
        # Parallel edges: csr_matrix sums duplicates, which would corrupt the
        # metric, so keep only the cheapest of each (u, v) per weight kind.
        self._drive_csr = _min_csr(rows, cols, times, n)
        self._length_csr = _min_csr(rows, cols, lengths, n)
        # Walking ignores direction: symmetrize with the elementwise minimum.
        walk = _min_csr(
            np.concatenate([rows, cols]),
            np.concatenate([cols, rows]),
            np.concatenate([lengths, lengths]),
            n,
        )
        self._walk_csr = walk

        self._lock = threading.Lock()
        self._drive_rows: OrderedDict[int, tuple[np.ndarray, np.ndarray]] = OrderedDict()
        self._walk_rows: OrderedDict[int, tuple[np.ndarray, np.ndarray]] = OrderedDict()
        self._drive_apsp: tuple[np.ndarray, np.ndarray] | None = None
        self._walk_apsp: tuple[np.ndarray, np.ndarray] | None = None

    # -- basic accessors ----------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return self._coords.shape[0]

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def coord(self, node: int) -> tuple[float, float]:
        x, y = self._coords[node]
        return float(x), float(y)

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    def bounds(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y) of the node coordinates."""
        mn = self._coords.min(axis=0)
        mx = self._coords.max(axis=0)
        return float(mn[0]), float(mn[1]), float(mx[0]), float(mx[1])

    def _check_node(self, node: int) -> None:
        if not (0 <= node < self.num_nodes):
            raise ValueError(f"node {node} out of range [0, {self.num_nodes})")

    # -- shortest-path machinery --------------------------------------------

    def _row(self, metric: str, src: int) -> tuple[np.ndarray, np.ndarray]:
        """Distance and predecessor arrays from src under one metric."""
        self._check_node(src)
        graph = self._drive_csr if metric == "drive" else self._walk_csr
        cache = self._drive_rows if metric == "drive" else self._walk_rows
        with self._lock:
            if self.num_nodes <= self._apsp_threshold:
                apsp = self._drive_apsp if metric == "drive" else self._walk_apsp
                if apsp is None:
                    dist, pred = dijkstra(graph, return_predecessors=True)
                    apsp = (dist, pred)
                    if metric == "drive":
                        self._drive_apsp = apsp
                    else:
                        self._walk_apsp = apsp
                return apsp[0][src], apsp[1][src]
            if src in cache:
                cache.move_to_end(src)
                return cache[src]
            dist, pred = dijkstra(graph, indices=src, return_predecessors=True)
            cache[src] = (dist, pred)
            if len(cache) > MEMO_LIMIT:
                cache.popitem(last=False)
            return dist, pred

    def drive_time(self, a: int, b: int) -> float:
        """Shortest driving time a -> b in seconds; inf if unreachable."""
        self._check_node(b)
        return float(self._row("drive", a)[0][b])

    def drive_time_row(self, a: int) -> np.ndarray:
        """Driving times from a to every node (read-only view)."""
        return self._row("drive", a)[0]

    def drive_submatrix(self, nodes) -> np.ndarray:
        """Pairwise driving times among the given nodes, in their order."""
        idx = np.asarray(nodes, dtype=np.int64)
        if self.num_nodes <= self._apsp_threshold:
            self._row("drive", 0)  # force the all-pairs computation
            return self._drive_apsp[0][np.ix_(idx, idx)]
        return np.stack([self._row("drive", int(a))[0][idx] for a in idx])

    def drive_matrix(self) -> np.ndarray | None:
        """Full all-pairs driving-time matrix, or None above the threshold."""
        if self.num_nodes > self._apsp_threshold:
            return None
        self._row("drive", 0)  # force the all-pairs computation
        return self._drive_apsp[0]

    def edge_drive_time(self, u: int, v: int) -> float:
        """Drive time of the direct edge u -> v; inf when absent."""
        w = self._drive_csr[u, v]
        return float(w) if w != 0 else (0.0 if u == v else INF)

    def edge_length(self, u: int, v: int) -> float:
        """Length of the direct edge u -> v; inf when absent."""
        w = self._length_csr[u, v]
        return float(w) if w != 0 else (0.0 if u == v else INF)

    def drive_path(self, a: int, b: int) -> list[int]:
        """Node sequence of a shortest driving path a -> b, inclusive.

        Returns an empty list when b is unreachable from a.
        """
        self._check_node(b)
        dist, pred = self._row("drive", a)
        if not np.isfinite(dist[b]):
            return []
        path = [b]
        while path[-1] != a:
            path.append(int(pred[path[-1]]))
        path.reverse()
        return path

    def drive_leg_lengths(self, a: int, b: int) -> float:
        """Total length in meters of the shortest-time driving path a -> b."""
        path = self.drive_path(a, b)
        total = 0.0
        for u, v in zip(path, path[1:]):
            total += self._length_csr[u, v]
        return total

    def walk_distance(self, a: int, b: int) -> float:
        """Shortest walking distance a -> b in meters; inf if unreachable."""
        self._check_node(b)
        return float(self._row("walk", a)[0][b])

    def walk_distance_row(self, a: int) -> np.ndarray:
        return self._row("walk", a)[0]

    def nodes_within_walk(self, origin: int, d_r: float) -> set[int]:
        """All nodes within walking distance d_r of origin (origin included)."""
        if d_r < 0:
            raise ValueError("d_r must be non-negative")
        dist = self._row("walk", origin)[0]
        return set(int(u) for u in np.flatnonzero(dist <= d_r))


def _min_csr(rows, cols, weights, n) -> csr_matrix:
    """CSR adjacency keeping the minimum weight among parallel edges."""
    best: dict[tuple[int, int], float] = {}
    for u, v, w in zip(rows, cols, weights):
        key = (int(u), int(v))
        if key not in best or w < best[key]:
            best[key] = float(w)
    if not best:
        return csr_matrix((n, n))
    r = np.fromiter((k[0] for k in best), dtype=np.int64, count=len(best))
    c = np.fromiter((k[1] for k in best), dtype=np.int64, count=len(best))
    w = np.fromiter(best.values(), dtype=float, count=len(best))
    return csr_matrix((w, (r, c)), shape=(n, n))


# -- ingestion ----------------------------------------------------------------

NODES_HEADER = ["id", "x", "y"]
EDGES_HEADER = ["from", "to", "length_m", "drive_time_s"]


def _rows(source):
    """Yield (line_number, row) from a path, file object, or line iterable."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            yield from enumerate(csv.reader(fh), start=1)
    else:
        yield from enumerate(csv.reader(source), start=1)


def load_network(nodes_source, edges_source, apsp_threshold: int = 2000) -> RoadNetwork:
    """Build a validated RoadNetwork from nodes and edges tables.

    Expected schemas: nodes ``id,x,y`` and edges ``from,to,length_m,
    drive_time_s``, comma-separated with a header row. Nodes that end up
    with no outgoing edge are dropped (repeatedly, since a drop can strand
    a neighbor), the survivors are re-indexed densely in ascending order of
    their original ids, and the result must be weakly connected.

    Raises:
        NetworkFormatError: malformed row (with its line number), dangling
            edge endpoint, non-positive weight, or a disconnected result.
    """
    raw_coords: dict[int, tuple[float, float]] = {}
    for lineno, row in _rows(nodes_source):
        if lineno == 1:
            if [c.strip() for c in row] != NODES_HEADER:
                raise NetworkFormatError(f"nodes line 1: expected header {','.join(NODES_HEADER)}")
            continue
        if not row:
            continue
        try:
            nid = int(row[0])
            x, y = float(row[1]), float(row[2])
        except (IndexError, ValueError) as exc:
            raise NetworkFormatError(f"nodes line {lineno}: {exc}") from exc
        if nid < 0:
            raise NetworkFormatError(f"nodes line {lineno}: negative node id {nid}")
        if nid in raw_coords:
            raise NetworkFormatError(f"nodes line {lineno}: duplicate node id {nid}")
        raw_coords[nid] = (x, y)

    raw_edges: list[tuple[int, int, float, float]] = []
    for lineno, row in _rows(edges_source):
        if lineno == 1:
            if [c.strip() for c in row] != EDGES_HEADER:
                raise NetworkFormatError(f"edges line 1: expected header {','.join(EDGES_HEADER)}")
            continue
        if not row:
            continue
        try:
            u, v = int(row[0]), int(row[1])
            length, time = float(row[2]), float(row[3])
        except (IndexError, ValueError) as exc:
            raise NetworkFormatError(f"edges line {lineno}: {exc}") from exc
        if u not in raw_coords or v not in raw_coords:
            raise NetworkFormatError(f"edges line {lineno}: dangling endpoint {u}->{v}")
        if length <= 0 or time <= 0:
            raise NetworkFormatError(
                f"edges line {lineno}: length and drive_time must be positive"
            )
        raw_edges.append((u, v, length, time))

    # Drop nodes without outgoing edges until stable; removing a node also
    # removes edges into it, which can strip another node's only exit.
    alive = set(raw_coords)
    edges = raw_edges
    while True:
        edges = [e for e in edges if e[0] in alive and e[1] in alive]
        with_out = {u for u, _, _, _ in edges}
        dead = alive - with_out
        if not dead:
            break
        alive -= dead
    if not alive:
        raise NetworkFormatError("no nodes with outgoing edges remain after filtering")

    parent = {u: u for u in alive}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for u, v, _, _ in edges:
        parent[find(u)] = find(v)
    if len({find(u) for u in alive}) > 1:
        raise NetworkFormatError("network is not weakly connected after filtering")

    index = {nid: i for i, nid in enumerate(sorted(alive))}
    coords = np.array([raw_coords[nid] for nid in sorted(alive)], dtype=float)
    dense = [Edge(index[u], index[v], length, time) for u, v, length, time in edges]
    return RoadNetwork(coords, dense, apsp_threshold=apsp_threshold)


def save_network(net: RoadNetwork, nodes_path, edges_path) -> None:
    """Write a network back to the nodes/edges CSV schema (dense ids)."""
    with open(nodes_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NODES_HEADER)
        for nid in range(net.num_nodes):
            x, y = net.coord(nid)
            w.writerow([nid, repr(x), repr(y)])
    with open(edges_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGES_HEADER)
        for e in net.edges:
            w.writerow([e.src, e.dst, repr(e.length), repr(e.drive_time)])


def generate_grid(width: int, height: int, edge_len: float, drive_speed: float) -> RoadNetwork:
    """Synthetic 4-connected grid with bidirectional edges.

    Node ids are row-major: id = row * width + col, coordinates in meters.
    Every edge has length ``edge_len`` and drive time ``edge_len /
    drive_speed``.
    """
    if width < 2 or height < 2:
        raise ValueError("grid needs width >= 2 and height >= 2")
    if edge_len <= 0 or drive_speed <= 0:
        raise ValueError("edge_len and drive_speed must be positive")
    coords = np.array(
        [(c * edge_len, r * edge_len) for r in range(height) for c in range(width)],
        dtype=float,
    )
    t = edge_len / drive_speed
    edges = []
    for r in range(height):
        for c in range(width):
            u = r * width + c
            if c + 1 < width:
                v = u + 1
                edges.append(Edge(u, v, edge_len, t))
                edges.append(Edge(v, u, edge_len, t))
            if r + 1 < height:
                v = u + width
                edges.append(Edge(u, v, edge_len, t))
                edges.append(Edge(v, u, edge_len, t))
    return RoadNetwork(coords, edges)
