"""Vertex-transitive graph families and lazy random walks on them.

Four families are supported: the d-dimensional discrete torus Z_n^d, the
hypercube {0,1}^n, the complete graph K_m with a self-loop at every vertex,
and the ring Z_n.  Vertices are packed integers (torus: base-n digits,
little-endian by dimension; hypercube: bitmask; complete/ring: index).

Each step of the walk holds with probability `holding` (default 1/2) and
otherwise moves to a uniform neighbor.  On the complete graph the self-loop
counts as one edge among m, so a non-holding step is uniform over all m
vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

DEFAULT_POWER_CAP = 2**16
SPECTRAL_CAP = 2**24


class StopReason(Enum):
    HIT_SET = "hit_set"
    KILLED = "killed"
    LENGTH_CAP = "length_cap"


@dataclass(frozen=True)
class WalkPath:
    """A time-indexed vertex sequence with stopping metadata."""

    vertices: list[int]
    stop_reason: StopReason
    start_time: int = 0

    def __len__(self) -> int:
        return len(self.vertices)


# Stop rules for walk().


@dataclass(frozen=True)
class GeometricKill:
    mean: float  # success probability 1/mean per step, support {1, 2, ...}


@dataclass(frozen=True)
class HitSet:
    targets: frozenset[int]


@dataclass(frozen=True)
class FixedLength:
    steps: int


@dataclass(frozen=True)
class MixingResult:
    tau: int
    method: str  # "closed-form", "power", or "spectral"


class GraphFamily:
    """One of the supported vertex-transitive families.

    Use the constructors :meth:`torus`, :meth:`hypercube`, :meth:`complete`,
    :meth:`ring`.  Instances are immutable and safely shareable across
    worker processes.
    """

    def __init__(self, kind: str, params: dict, holding: float = 0.5):
        if not 0.0 <= holding <= 1.0:
            raise ValueError(f"holding must lie in [0,1], got {holding}")
        self.kind = kind
        self.params = dict(params)
        self.holding = float(holding)
        self.num_vertices = self._compute_size()
        if self.num_vertices >= 2**62:
            raise ValueError("graph too large for 64-bit vertex ids")
        self._nbr_table: np.ndarray | None = None
        self._nbr_lists: list[list[int]] | None = None

    # constructors

    @classmethod
    def torus(cls, d: int, n: int, holding: float = 0.5) -> "GraphFamily":
        if d < 1 or n < 2:
            raise ValueError("torus requires d >= 1 and n >= 2")
        return cls("torus", {"d": d, "n": n}, holding)

    @classmethod
    def hypercube(cls, n: int, holding: float = 0.5) -> "GraphFamily":
        if n < 1:
            raise ValueError("hypercube requires n >= 1")
        return cls("hypercube", {"n": n}, holding)

    @classmethod
    def complete(cls, m: int, holding: float = 0.5) -> "GraphFamily":
        if m < 2:
            raise ValueError("complete graph requires m >= 2")
        return cls("complete", {"m": m}, holding)

    @classmethod
    def ring(cls, n: int, holding: float = 0.5) -> "GraphFamily":
        if n < 3:
            raise ValueError("ring requires n >= 3")
        return cls("ring", {"n": n}, holding)

    def _compute_size(self) -> int:
        k, p = self.kind, self.params
        if k == "torus":
            return p["n"] ** p["d"]
        if k == "hypercube":
            return 2 ** p["n"]
        if k == "complete":
            return p["m"]
        if k == "ring":
            return p["n"]
        raise ValueError(f"unknown kind {k!r}")

    # vertex packing

    def encode(self, coords) -> int:
        if self.kind == "torus":
            n = self.params["n"]
            v = 0
            for i, c in enumerate(coords):
                v += (c % n) * n**i
            return v
        if self.kind == "hypercube":
            v = 0
            for i, b in enumerate(coords):
                v |= (b & 1) << i
            return v
        (c,) = coords
        return c % self.num_vertices

    def decode(self, v: int) -> tuple[int, ...]:
        if self.kind == "torus":
            d, n = self.params["d"], self.params["n"]
            out = []
            for _ in range(d):
                out.append(v % n)
                v //= n
            return tuple(out)
        if self.kind == "hypercube":
            n = self.params["n"]
            return tuple((v >> i) & 1 for i in range(n))
        return (v,)

    # neighbor structure

    @property
    def branch_count(self) -> int:
        """Number of equally likely moves on a non-holding step."""
        if self.kind == "torus":
            return 2 * self.params["d"]
        if self.kind == "hypercube":
            return self.params["n"]
        if self.kind == "complete":
            return self.params["m"]
        return 2

    def neighbors(self, v: int) -> list[int]:
        """The branch_count targets of a non-holding step (with multiplicity)."""
        if self.kind == "torus":
            d, n = self.params["d"], self.params["n"]
            out = []
            base = 1
            for _ in range(d):
                digit = (v // base) % n
                out.append(v + base * ((digit + 1) % n - digit))
                out.append(v + base * ((digit - 1) % n - digit))
                base *= n
            return out
        if self.kind == "hypercube":
            return [v ^ (1 << i) for i in range(self.params["n"])]
        if self.kind == "complete":
            return list(range(self.params["m"]))
        n = self.params["n"]
        return [(v + 1) % n, (v - 1) % n]

    def neighbor_table(self) -> np.ndarray:
        """(|G|, branch_count) int64 array of non-holding step targets.

        Materialized lazily and cached; not available for complete graphs
        (a non-holding step there is just a uniform vertex draw).
        """
        if self.kind == "complete":
            raise ValueError("complete graph has no sparse neighbor table")
        if self._nbr_table is None:
            size = self.num_vertices
            v = np.arange(size, dtype=np.int64)
            if self.kind == "hypercube":
                cols = [v ^ (1 << i) for i in range(self.params["n"])]
            elif self.kind == "torus":
                d, n = self.params["d"], self.params["n"]
                cols = []
                base = 1
                for _ in range(d):
                    digit = (v // base) % n
                    cols.append(v + base * ((digit + 1) % n - digit))
                    cols.append(v + base * ((digit - 1) % n - digit))
                    base *= n
            else:
                n = self.params["n"]
                cols = [(v + 1) % n, (v - 1) % n]
            self._nbr_table = np.column_stack(cols)
        return self._nbr_table

    def neighbor_lists(self) -> list[list[int]]:
        """Neighbor table as nested Python lists (fast in scalar loops)."""
        if self._nbr_lists is None:
            self._nbr_lists = self.neighbor_table().tolist()
        return self._nbr_lists

    # walk dynamics

    def step(self, v: int, rng: np.random.Generator) -> int:
        if self.holding > 0 and rng.random() < self.holding:
            return v
        if self.kind == "complete":
            return int(rng.integers(self.params["m"]))
        return self.neighbors(v)[int(rng.integers(self.branch_count))]

    def step_many(self, positions: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Advance an array of independent walkers by one step."""
        n = positions.shape[0]
        if self.kind == "complete":
            moved = rng.integers(self.params["m"], size=n)
        else:
            table = self.neighbor_table()
            moved = table[positions, rng.integers(self.branch_count, size=n)]
        if self.holding > 0:
            hold = rng.random(n) < self.holding
            return np.where(hold, positions, moved)
        return moved

    def one_step_distribution(self, v: int) -> dict[int, float]:
        """Exact law of one step from v, as a vertex -> probability dict."""
        dist: dict[int, float] = {}
        if self.holding > 0:
            dist[v] = self.holding
        p = (1.0 - self.holding) / self.branch_count
        for w in self.neighbors(v):
            dist[w] = dist.get(w, 0.0) + p
        return dist

    def stationary_probability(self) -> float:
        # uniform by vertex transitivity
        return 1.0 / self.num_vertices

    # distribution evolution and mixing

    def distribution_after(self, t: int, start: int = 0) -> np.ndarray:
        """Exact p^t(start, .) by sparse vector iteration."""
        size = self.num_vertices
        dist = np.zeros(size)
        dist[start] = 1.0
        if self.kind == "complete":
            h = self.holding
            for _ in range(t):
                dist = h * dist + (1.0 - h) / size
            return dist
        table = self.neighbor_table()
        h = self.holding
        w = (1.0 - h) / self.branch_count
        # gather form: the neighbor relation is symmetric and regular
        for _ in range(t):
            dist = h * dist + w * dist[table].sum(axis=1)
        return dist

    def _spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Transition eigenvalues with multiplicities (torus/hypercube/ring)."""
        h = self.holding
        if self.kind == "hypercube":
            n = self.params["n"]
            j = np.arange(n + 1)
            lam = 1.0 - 2.0 * (1.0 - h) * j / n
            mult = np.array([math.comb(n, int(jj)) for jj in j], dtype=float)
            return lam, mult
        if self.kind in ("torus", "ring"):
            d = self.params.get("d", 1)
            n = self.params["n"]
            base = np.cos(2.0 * np.pi * np.arange(n) / n)
            lam = base
            for _ in range(d - 1):
                lam = (lam[:, None] + base[None, :]).ravel()
            lam = h + (1.0 - h) * lam / d
            return lam, np.ones(lam.size)
        raise ValueError("no closed spectrum for this family")

    def mixing_time(self, cap: int = DEFAULT_POWER_CAP) -> MixingResult:
        """Uniform mixing time: least t with sup_x |p^t(x)/pi(x) - 1| <= 1/2.

        Exact power iteration for |G| <= cap; for tori and hypercubes above
        the cap, an exact spectral evaluation (all eigenvalues nonnegative
        when holding >= 1/2, so the sup is attained at the start vertex).
        """
        if self.holding <= 0.0 and self.kind != "complete":
            raise ValueError("mixing time requires holding > 0 (aperiodicity)")
        size = self.num_vertices
        if self.kind == "complete":
            h = self.holding
            if h == 0.0:
                return MixingResult(1, "closed-form")
            # (m-1) h^t <= 1/2
            tau = max(1, math.ceil(math.log(2.0 * (size - 1)) / -math.log(h)))
            return MixingResult(tau, "closed-form")
        if size <= cap:
            table = self.neighbor_table()
            h = self.holding
            w = (1.0 - h) / self.branch_count
            dist = np.zeros(size)
            dist[0] = 1.0
            t = 0
            while True:
                t += 1
                dist = h * dist + w * dist[table].sum(axis=1)
                if np.max(np.abs(dist * size - 1.0)) <= 0.5:
                    return MixingResult(t, "power")
        if self.kind in ("torus", "ring", "hypercube") and self.holding >= 0.5:
            if self.kind != "hypercube" and size > SPECTRAL_CAP:
                raise ValueError("mixing time unavailable: graph above spectral cap")
            lam, mult = self._spectrum()
            keep = lam < 1.0
            lam, mult = lam[keep], mult[keep]
            t = 1
            while True:
                if float(np.dot(mult, lam**t)) <= 0.5:
                    return MixingResult(t, "spectral")
                t += 1
        raise ValueError("mixing time unavailable for this graph size")

    # CLI plumbing

    def spec_string(self) -> str:
        k, p = self.kind, self.params
        if k == "torus":
            body = f"d={p['d']},n={p['n']}"
        elif k == "hypercube":
            body = f"n={p['n']}"
        elif k == "complete":
            body = f"m={p['m']}"
        else:
            body = f"n={p['n']}"
        return f"{k}:{body},holding={self.holding}"

    def __repr__(self) -> str:
        return f"GraphFamily({self.spec_string()!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GraphFamily)
            and self.kind == other.kind
            and self.params == other.params
            and self.holding == other.holding
        )

    def __hash__(self) -> int:
        return hash((self.kind, tuple(sorted(self.params.items())), self.holding))


def parse_graph_spec(spec: str) -> GraphFamily:
    """Parse a CLI graph spec like 'torus:d=5,n=8' or 'ring:n=64,holding=0.5'."""
    try:
        kind, _, body = spec.partition(":")
        kind = kind.strip().lower()
        kv: dict[str, str] = {}
        for item in body.split(","):
            if not item.strip():
                continue
            key, _, val = item.partition("=")
            kv[key.strip()] = val.strip()
        holding = float(kv.pop("holding", 0.5))
        if kind == "torus":
            return GraphFamily.torus(int(kv.pop("d")), int(kv.pop("n")), holding)
        if kind == "hypercube":
            return GraphFamily.hypercube(int(kv.pop("n")), holding)
        if kind == "complete":
            return GraphFamily.complete(int(kv.pop("m")), holding)
        if kind == "ring":
            return GraphFamily.ring(int(kv.pop("n")), holding)
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"bad graph spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown graph kind in spec {spec!r}")


def walk(
    g: GraphFamily,
    start: int,
    stop: GeometricKill | HitSet | FixedLength,
    rng: np.random.Generator,
) -> WalkPath:
    """Run the lazy walk from `start` until the stop rule fires."""
    if isinstance(stop, FixedLength):
        verts = [start]
        v = start
        for _ in range(stop.steps):
            v = g.step(v, rng)
            verts.append(v)
        return WalkPath(verts, StopReason.LENGTH_CAP)
    if isinstance(stop, HitSet):
        targets = stop.targets
        verts = [start]
        v = start
        while v not in targets:
            v = g.step(v, rng)
            verts.append(v)
        return WalkPath(verts, StopReason.HIT_SET)
    if isinstance(stop, GeometricKill):
        if stop.mean < 1.0:
            raise ValueError("geometric kill mean must be >= 1")
        p = 1.0 / stop.mean
        verts = [start]
        v = start
        while rng.random() >= p:
            v = g.step(v, rng)
            verts.append(v)
        return WalkPath(verts, StopReason.KILLED)
    raise TypeError(f"unknown stop rule {stop!r}")
