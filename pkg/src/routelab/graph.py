"""Euclidean TSP instances: generators, a TSPLIB subset, distance matrices.

Instances are sets of 2D points in abstract units. Distance matrices are
plain numpy arrays satisfying the documented contract: square, symmetric
entry-for-entry, zero diagonal, finite and nonnegative. `validate_distance_matrix`
is the gatekeeper every solver calls on entry.

TSPLIB support is deliberately narrow: TYPE: TSP with EDGE_WEIGHT_TYPE EUC_2D.
Distances are exact Euclidean reals, NOT the TSPLIB rounded-integer
convention; every solver in this package shares one matrix, so internal
consistency wins over convention fidelity. See the README.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidInstanceError,
    InvalidParameterError,
    MalformedInputError,
    UnsupportedFormatError,
)
from .fileio import atomic_write_text
from .rng import make_rng

__all__ = [
    "Graph",
    "gen_uniform",
    "gen_clustered",
    "distance_matrix",
    "validate_distance_matrix",
    "perturb_weights",
    "parse_tsplib",
    "graph_to_json",
    "graph_from_json",
    "save_graph",
    "load_graph",
]

# Perturbation factors are floored here so weights stay positive.
WEIGHT_FLOOR = 1e-6


@dataclass(frozen=True)
class Graph:
    """Labeled 2D point set. `demands` is carried for capacitated variants
    but nothing in this package consumes it."""

    name: str
    nodes: np.ndarray
    demands: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise InvalidInstanceError("nodes must form an (n, 2) coordinate array")
        if nodes.shape[0] < 3:
            raise InvalidInstanceError(
                f"an instance needs at least 3 nodes, got {nodes.shape[0]}"
            )
        if not np.all(np.isfinite(nodes)):
            raise InvalidInstanceError("all coordinates must be finite")
        object.__setattr__(self, "nodes", nodes)
        if self.demands is not None:
            demands = np.asarray(self.demands, dtype=float)
            if demands.shape != (nodes.shape[0],):
                raise InvalidInstanceError("demands must list one value per node")
            if not np.all(np.isfinite(demands)) or np.any(demands < 0):
                raise InvalidInstanceError("demands must be finite and nonnegative")
            object.__setattr__(self, "demands", demands)

    @property
    def n(self) -> int:
        return int(self.nodes.shape[0])


def gen_uniform(n: int, bbox: float = 100.0, seed: int = 0) -> Graph:
    """n points i.i.d. uniform in [0, bbox]^2; pure function of the seed."""
    if n < 3:
        raise InvalidInstanceError(f"need n >= 3, got {n}")
    if bbox <= 0:
        raise InvalidParameterError(f"bbox must be positive, got {bbox}")
    rng = make_rng(seed)
    nodes = rng.uniform(0.0, bbox, size=(n, 2))
    return Graph(name=f"uniform-n{n}-s{seed}", nodes=nodes)


def gen_clustered(
    n: int, k: int, spread: float, bbox: float = 100.0, seed: int = 0
) -> Graph:
    """k uniform cluster centers; node i joins center i % k plus a Gaussian
    offset of std dev `spread`. Round-robin keeps cluster sizes balanced and
    deterministic."""
    if n < 3:
        raise InvalidInstanceError(f"need n >= 3, got {n}")
    if not 1 <= k <= n:
        raise InvalidParameterError(f"cluster count must satisfy 1 <= k <= n, got k={k}")
    if spread <= 0:
        raise InvalidParameterError(f"spread must be positive, got {spread}")
    if bbox <= 0:
        raise InvalidParameterError(f"bbox must be positive, got {bbox}")
    rng = make_rng(seed)
    centers = rng.uniform(0.0, bbox, size=(k, 2))
    offsets = rng.normal(0.0, spread, size=(n, 2))
    nodes = centers[np.arange(n) % k] + offsets
    return Graph(name=f"clustered-n{n}-k{k}-s{seed}", nodes=nodes)


def distance_matrix(g: Graph) -> np.ndarray:
    """Pairwise Euclidean distances. The upper triangle is mirrored so the
    result is symmetric entry-for-entry, with an exactly zero diagonal."""
    diff = g.nodes[:, None, :] - g.nodes[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    upper = np.triu(d, k=1)
    return upper + upper.T


def validate_distance_matrix(d: np.ndarray) -> np.ndarray:
    """Check the distance-matrix contract; returns the validated array."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidInstanceError("distance matrix must be square")
    if d.shape[0] < 3:
        raise InvalidInstanceError("distance matrix needs at least 3 cities")
    if not np.all(np.isfinite(d)):
        raise InvalidInstanceError("distances must be finite")
    if np.any(d < 0):
        raise InvalidInstanceError("distances must be nonnegative")
    if np.any(np.diag(d) != 0):
        raise InvalidInstanceError("distance matrix diagonal must be zero")
    if not np.array_equal(d, d.T):
        raise InvalidInstanceError("distance matrix must be symmetric as stored")
    return d


def perturb_weights(d: np.ndarray, sigma: float, seed: int = 0) -> np.ndarray:
    """Multiply each off-diagonal entry by max(WEIGHT_FLOOR, 1 + N(0, sigma)).

    One draw per unordered pair, taken in row-major upper-triangle order, so
    symmetry is preserved by construction. sigma=0 returns an exact copy.
    Perturbed matrices may violate the triangle inequality; that is allowed.
    """
    d = validate_distance_matrix(d)
    if sigma < 0:
        raise InvalidParameterError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return d.copy()
    rng = make_rng(seed)
    n = d.shape[0]
    iu = np.triu_indices(n, k=1)
    z = rng.normal(0.0, sigma, size=iu[0].shape[0])
    out = np.zeros_like(d)
    out[iu] = d[iu] * np.maximum(WEIGHT_FLOOR, 1.0 + z)
    return out + out.T


def parse_tsplib(text: str) -> Graph:
    """Parse the supported TSPLIB subset (TYPE: TSP, EDGE_WEIGHT_TYPE: EUC_2D).

    Coordinates are returned in file order; DIMENSION must match the number
    of coordinate lines.
    """
    header: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    in_coords = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.upper() == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) < 3:
                raise MalformedInputError(f"bad coordinate line: {line!r}")
            try:
                coords.append((float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise MalformedInputError(f"bad coordinate line: {line!r}") from exc
            continue
        if line.upper() == "NODE_COORD_SECTION":
            in_coords = True
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().upper()] = value.strip()
        else:
            raise MalformedInputError(f"unrecognized header line: {line!r}")

    kind = header.get("TYPE")
    if kind is None:
        raise MalformedInputError("missing TYPE header")
    if kind.upper() != "TSP":
        raise UnsupportedFormatError(f"only TYPE: TSP is supported, got {kind!r}")
    weight_type = header.get("EDGE_WEIGHT_TYPE")
    if weight_type is None:
        raise MalformedInputError("missing EDGE_WEIGHT_TYPE header")
    if weight_type.upper() != "EUC_2D":
        raise UnsupportedFormatError(
            f"only EDGE_WEIGHT_TYPE: EUC_2D is supported, got {weight_type!r}"
        )
    if not in_coords:
        raise MalformedInputError("missing NODE_COORD_SECTION")
    if "DIMENSION" not in header:
        raise MalformedInputError("missing DIMENSION header")
    try:
        dimension = int(header["DIMENSION"])
    except ValueError as exc:
        raise MalformedInputError(f"bad DIMENSION: {header['DIMENSION']!r}") from exc
    if dimension != len(coords):
        raise MalformedInputError(
            f"DIMENSION says {dimension} nodes but found {len(coords)} coordinate lines"
        )
    return Graph(name=header.get("NAME", "tsplib"), nodes=np.array(coords, dtype=float))


def graph_to_json(g: Graph) -> dict:
    """Documented JSON shape: {name, nodes: [[x, y], ...]} plus optional demands."""
    out: dict = {"name": g.name, "nodes": [[float(x), float(y)] for x, y in g.nodes]}
    if g.demands is not None:
        out["demands"] = [float(v) for v in g.demands]
    return out


def graph_from_json(obj: dict) -> Graph:
    if not isinstance(obj, dict) or "nodes" not in obj:
        raise MalformedInputError("graph JSON must be an object with a 'nodes' list")
    try:
        return Graph(
            name=str(obj.get("name", "unnamed")),
            nodes=np.array(obj["nodes"], dtype=float),
            demands=None if obj.get("demands") is None else np.array(obj["demands"]),
        )
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad graph JSON: {exc}") from exc


def save_graph(g: Graph, path: str) -> str:
    return atomic_write_text(path, json.dumps(graph_to_json(g), indent=2) + "\n")


def load_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: not valid JSON ({exc})") from exc
    return graph_from_json(obj)
