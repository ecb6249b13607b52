"""One-hot QUBO encoding of the TSP.

Binary variable x[i, t] = 1 means city i occupies tour slot t. The energy of
an assignment is

    A * sum_i (1 - sum_t x[i, t])**2        each city used exactly once
  + B * sum_t (1 - sum_i x[i, t])**2        each slot filled exactly once
  + C * sum_{i != j} sum_t d[i, j] * x[i, t] * x[j, (t+1) % n]

with the time index wrapping so the tour closes. Any bitstring satisfying
both one-hot families scores exactly C times its tour length. Terms with
i == j are excluded; the diagonal of d is zero so nothing is lost.

The reduced form pins city 0 to slot 0 (x[0, 0] = 1, the rest of row 0 and
column 0 forced to 0 before expansion), cutting the variable count from n**2
to (n-1)**2. It is the default, and the only form the XY mixer accepts.

Free variables are numbered k = (i-1)*(n-1) + (t-1) when reduced and
k = i*n + t otherwise. A bitstring is a length-n_vars sequence over {0, 1}
in that variable order, and variable k maps to bit k of a basis index:
index = sum_k x[k] * 2**k. That ordering is frozen; golden tests depend
on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceTooLargeError, InvalidParameterError
from .exact import check_tour
from .graph import validate_distance_matrix

__all__ = [
    "Penalties",
    "default_penalties",
    "QuboProblem",
    "Infeasible",
    "encode_tsp",
    "qubo_energy",
    "decode",
    "encode_tour",
    "enumerate_ground_states",
    "energy_table",
    "bits_of",
    "index_of_bits",
    "qubo_to_json",
    "GROUND_ENUM_MAX",
]

# Exhaustive bitstring scans are capped at 2**20 states.
GROUND_ENUM_MAX = 20


@dataclass(frozen=True)
class Penalties:
    """Constraint weights A, B and distance weight C, all positive."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise InvalidParameterError(
                f"penalties must all be positive, got A={self.a}, B={self.b}, C={self.c}"
            )

    def dominates(self, max_distance: float) -> bool:
        """A, B > C * max(d) is sufficient for every ground state to be a tour."""
        bound = self.c * max_distance
        return self.a > bound and self.b > bound


def default_penalties(d: np.ndarray, c: float = 1.0) -> Penalties:
    """A = B = 2 * C * max(d): any single violation costs more than the
    distance it could save."""
    peak = float(np.max(d))
    if peak <= 0:
        raise InvalidParameterError("distance matrix has no positive entry")
    return Penalties(a=2.0 * c * peak, b=2.0 * c * peak, c=c)


@dataclass(frozen=True)
class Infeasible:
    """Decode outcome for a bitstring violating one-hot constraints."""

    violations: int


@dataclass(frozen=True, eq=False)
class QuboProblem:
    """Expanded coefficients: energy(x) = offset + linear . x + x^T Q x.

    Q is symmetric with halved off-diagonal coefficients and a zero diagonal,
    so the quadratic form reproduces each pair term exactly once. `distances`
    keeps the source matrix so decoded tours can be measured directly.
    """

    n_cities: int
    n_vars: int
    q: np.ndarray
    linear: np.ndarray
    offset: float
    penalties: Penalties
    reduced: bool
    penalties_dominate: bool
    distances: np.ndarray
    _table: np.ndarray | None = field(default=None, repr=False, compare=False)

    def var_of(self, city: int, slot: int) -> int:
        n = self.n_cities
        if not (0 <= city < n and 0 <= slot < n):
            raise InvalidParameterError(f"city/slot out of range: ({city}, {slot})")
        if self.reduced:
            if city == 0 or slot == 0:
                raise InvalidParameterError(
                    "city 0 and slot 0 carry no variable in the reduced form"
                )
            return (city - 1) * (n - 1) + (slot - 1)
        return city * n + slot

    def city_slot(self, k: int) -> tuple[int, int]:
        if not 0 <= k < self.n_vars:
            raise InvalidParameterError(f"variable index out of range: {k}")
        if self.reduced:
            return k // (self.n_cities - 1) + 1, k % (self.n_cities - 1) + 1
        return k // self.n_cities, k % self.n_cities


def encode_tsp(
    d: np.ndarray, penalties: Penalties | None = None, reduced: bool = True
) -> QuboProblem:
    """Expand the one-hot Hamiltonian into (offset, linear, Q) over the free
    variables. With defaults the penalties dominate any constraint violation."""
    d = validate_distance_matrix(d)
    n = d.shape[0]
    pen = default_penalties(d) if penalties is None else penalties
    n_vars = (n - 1) ** 2 if reduced else n * n
    q = np.zeros((n_vars, n_vars))
    linear = np.zeros(n_vars)
    state = {"offset": 0.0}

    def term(city: int, slot: int) -> tuple[int, float]:
        # (variable index, 1.0), or (-1, fixed value) under the reduction
        slot %= n
        if reduced:
            if city == 0 and slot == 0:
                return -1, 1.0
            if city == 0 or slot == 0:
                return -1, 0.0
            return (city - 1) * (n - 1) + (slot - 1), 1.0
        return city * n + slot, 1.0

    def add_term(coef: float, u: tuple[int, float]) -> None:
        k, val = u
        if k < 0:
            state["offset"] += coef * val
        else:
            linear[k] += coef

    def add_pair(coef: float, u: tuple[int, float], v: tuple[int, float]) -> None:
        ku, cu = u
        kv, cv = v
        if ku < 0 and kv < 0:
            state["offset"] += coef * cu * cv
        elif ku < 0:
            if cu != 0.0:
                linear[kv] += coef * cu
        elif kv < 0:
            if cv != 0.0:
                linear[ku] += coef * cv
        elif ku == kv:
            linear[ku] += coef  # x*x = x for binaries
        else:
            q[ku, kv] += coef / 2.0
            q[kv, ku] += coef / 2.0

    # (1 - sum x)^2 = 1 - 2*sum x + sum_{u,v} x_u x_v
    for i in range(n):
        row = [term(i, t) for t in range(n)]
        state["offset"] += pen.a
        for u in row:
            add_term(-2.0 * pen.a, u)
        for u in row:
            for v in row:
                add_pair(pen.a, u, v)
    for t in range(n):
        col = [term(i, t) for i in range(n)]
        state["offset"] += pen.b
        for u in col:
            add_term(-2.0 * pen.b, u)
        for u in col:
            for v in col:
                add_pair(pen.b, u, v)
    for t in range(n):
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                add_pair(pen.c * d[i, j], term(i, t), term(j, t + 1))

    return QuboProblem(
        n_cities=n,
        n_vars=n_vars,
        q=q,
        linear=linear,
        offset=state["offset"],
        penalties=pen,
        reduced=reduced,
        penalties_dominate=pen.dominates(float(np.max(d))),
        distances=d.copy(),
    )


def _check_bits(qp: QuboProblem, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (qp.n_vars,):
        raise InvalidParameterError(
            f"bitstring must have length {qp.n_vars}, got shape {x.shape}"
        )
    if np.any((x != 0) & (x != 1)):
        raise InvalidParameterError("bitstring entries must be 0 or 1")
    return x.astype(float)


def qubo_energy(qp: QuboProblem, x) -> float:
    xf = _check_bits(qp, x)
    return float(qp.offset + qp.linear @ xf + xf @ qp.q @ xf)


def decode(qp: QuboProblem, x):
    """Bitstring to Tour, or an Infeasible marker counting violated one-hot
    constraints. Infeasibility is a value, not an error."""
    xi = _check_bits(qp, x).astype(int)
    n = qp.n_cities
    assign = np.zeros((n, n), dtype=int)
    if qp.reduced:
        assign[0, 0] = 1
        assign[1:, 1:] = xi.reshape(n - 1, n - 1)
    else:
        assign = xi.reshape(n, n)
    rows = assign.sum(axis=1)
    cols = assign.sum(axis=0)
    bad = int(np.count_nonzero(rows != 1) + np.count_nonzero(cols != 1))
    if bad:
        return Infeasible(violations=bad)
    return tuple(int(np.argmax(assign[:, t])) for t in range(n))


def encode_tour(qp: QuboProblem, order) -> np.ndarray:
    """One-hot bitstring with x[order[t], t] = 1. Reduced problems rotate the
    tour to start at city 0 first; rotation is lossless for cycles."""
    t = check_tour(order, qp.n_cities)
    if qp.reduced and t[0] != 0:
        i = t.index(0)
        t = t[i:] + t[:i]
    x = np.zeros(qp.n_vars, dtype=np.uint8)
    for slot, city in enumerate(t):
        if qp.reduced and slot == 0:
            continue  # the fixed assignment x[0, 0] = 1
        x[qp.var_of(city, slot)] = 1
    return x


def bits_of(index: int, n_vars: int) -> np.ndarray:
    """Bitstring of a basis index under the frozen variable-k-is-bit-k order."""
    return np.array([(index >> k) & 1 for k in range(n_vars)], dtype=np.uint8)


def index_of_bits(x) -> int:
    total = 0
    for k, v in enumerate(x):
        if v:
            total |= 1 << k
    return total


def energy_table(qp: QuboProblem, cap: int = GROUND_ENUM_MAX) -> np.ndarray:
    """Energies of all 2**n_vars bitstrings, indexed by basis index.

    Computed once per problem and cached; the statevector engine reads it on
    every phase-separator application.
    """
    if qp._table is not None:
        return qp._table
    nv = qp.n_vars
    if nv > cap:
        raise InstanceTooLargeError(f"energy table needs n_vars <= {cap}, got {nv}")
    size = 1 << nv
    idx = np.arange(size, dtype=np.int64)
    bits = [((idx >> k) & 1).astype(np.uint8) for k in range(nv)]
    e = np.full(size, qp.offset)
    for k in range(nv):
        if qp.linear[k] != 0.0:
            e += qp.linear[k] * bits[k]
    for k in range(nv):
        for l in range(k + 1, nv):
            coef = 2.0 * qp.q[k, l]
            if coef != 0.0:
                e += coef * (bits[k] & bits[l])
    object.__setattr__(qp, "_table", e)
    return e


def enumerate_ground_states(qp: QuboProblem) -> tuple[float, list[np.ndarray]]:
    """Exhaustive minimum over all bitstrings; states within 1e-9 relative of
    the minimum count as ground states."""
    if qp.n_vars > GROUND_ENUM_MAX:
        raise InstanceTooLargeError(
            f"exhaustive enumeration is capped at {GROUND_ENUM_MAX} variables, got {qp.n_vars}"
        )
    e = energy_table(qp)
    emin = float(e.min())
    tol = 1e-9 * max(1.0, abs(emin))
    states = [bits_of(int(i), qp.n_vars) for i in np.flatnonzero(e <= emin + tol)]
    return emin, states


def qubo_to_json(qp: QuboProblem) -> dict:
    """Interop shape: {n_vars, offset, linear, quad: [[i, j, coef], ...]} with
    energy = offset + sum_k linear[k]*x[k] + sum_{(i,j,c)} c*x[i]*x[j]."""
    quad = [
        [i, j, float(2.0 * qp.q[i, j])]
        for i in range(qp.n_vars)
        for j in range(i + 1, qp.n_vars)
        if qp.q[i, j] != 0.0
    ]
    return {
        "n_vars": qp.n_vars,
        "offset": float(qp.offset),
        "linear": [float(v) for v in qp.linear],
        "quad": quad,
    }
