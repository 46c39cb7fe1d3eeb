"""Lumped-parameter thermal network: continuous ODE and discrete state-space.

The network is a graph of thermal nodes (motors, onboard computer, ambient)
joined by conduction edges and velocity-dependent convection edges. Each
non-ambient node i obeys

    C_i dT_i/dt = -(T_i - T_E) / R_iE(v)  -  sum_j (T_i - T_j) / R_ij  +  Q_i

with R_iE(v) = R0 / (1 + c * v**e) for convective edges. The ambient node
is a boundary state carried inside the temperature vector: its row of the
discrete system matrix is the unit basis vector and its input row is zero,
so its temperature never changes during stepping.

Discretization is exact zero-order hold via the augmented matrix
exponential (works for conduction-only islands where the system matrix is
singular), with a forward-Euler mode available for cross-checks.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .config import EdgeConfig, SimConfig
from .errors import (
    DimensionMismatch,
    DisconnectedGraph,
    DuplicateEdge,
    MissingNode,
    NetworkValidationError,
    NonPositiveParameter,
    NotConvective,
    SingularSystem,
)

NODE_KINDS = ("motor", "computer", "ambient")


@dataclass(frozen=True)
class ThermalNode:
    id: int
    kind: str
    label: str
    capacitance: float = 0.0  # J/K; unused for the ambient boundary node


@dataclass(frozen=True)
class ThermalEdge:
    i: int
    j: int
    resistance: float = 0.0  # K/W, conduction
    convective: bool = False
    conv_base: float = 0.0  # K/W at rest
    conv_coeff: float = 0.0
    conv_exponent: float = 1.0


@dataclass
class ThermalNetwork:
    """Validated node/edge collection with derived index arrays."""

    nodes: list[ThermalNode]
    edges: list[ThermalEdge]
    ambient_index: int = field(init=False)
    capacitances: np.ndarray = field(init=False)  # 0.0 at the ambient slot

    def __post_init__(self):
        ambient = [n.id for n in self.nodes if n.kind == "ambient"]
        if len(ambient) != 1:
            raise NetworkValidationError(
                f"network must have exactly one ambient node, found {len(ambient)}"
            )
        self.ambient_index = ambient[0]
        caps = np.zeros(len(self.nodes))
        for n in self.nodes:
            if n.kind != "ambient":
                caps[n.id] = n.capacitance
        self.capacitances = caps

    @property
    def n(self) -> int:
        return len(self.nodes)

    def motor_indices(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind == "motor"]

    def neighbor_sets(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {n.id: set() for n in self.nodes}
        for e in self.edges:
            out[e.i].add(e.j)
            out[e.j].add(e.i)
        return out


@dataclass
class TemperatureState:
    """Node temperatures in degC, ambient entry last by convention."""

    temps: np.ndarray

    def validate(self, net: ThermalNetwork, ambient_temp: float | None = None) -> None:
        if self.temps.shape != (net.n,):
            raise DimensionMismatch(
                f"temperature vector has shape {self.temps.shape}, expected ({net.n},)"
            )
        if not np.all(np.isfinite(self.temps)):
            raise DimensionMismatch("temperature vector contains non-finite values")
        if ambient_temp is not None:
            if self.temps[net.ambient_index] != ambient_temp:
                raise DimensionMismatch(
                    "ambient entry does not equal the configured ambient temperature"
                )


@dataclass
class DiscreteThermalModel:
    """One-step transition (A, B) at a fixed timestep and velocity bucket."""

    A: np.ndarray
    B: np.ndarray
    dt: float
    v_bucket: int
    ambient_index: int


def build_network(config: SimConfig) -> ThermalNetwork:
    """Validate the node/edge sections of a config and assemble the network.

    All violations are collected before raising, so one failed load reports
    every problem at once. The raised class matches the first violation kind.
    """
    problems: list[tuple[type, str]] = []
    nodes_cfg = config.nodes
    edges_cfg = config.edges

    kinds = {}
    for nc in nodes_cfg:
        kinds.setdefault(nc.kind, []).append(nc)
    n_motor = len(kinds.get("motor", []))
    n_computer = len(kinds.get("computer", []))
    n_ambient = len(kinds.get("ambient", []))
    if n_motor != 12:
        problems.append((MissingNode, f"expected 12 motor nodes, found {n_motor}"))
    if n_computer != 1:
        problems.append((MissingNode, f"expected 1 computer node, found {n_computer}"))
    if n_ambient != 1:
        problems.append((MissingNode, f"expected 1 ambient node, found {n_ambient}"))
    ids = sorted(nc.id for nc in nodes_cfg)
    if ids != list(range(len(nodes_cfg))):
        problems.append((MissingNode, f"node ids must be 0..{len(nodes_cfg) - 1}"))

    for nc in nodes_cfg:
        if nc.kind not in NODE_KINDS:
            problems.append((MissingNode, f"node {nc.id}: unknown kind {nc.kind!r}"))
        if nc.kind in ("motor", "computer") and nc.capacitance_j_per_k <= 0:
            problems.append(
                (NonPositiveParameter,
                 f"node {nc.id} ({nc.label}): capacitance must be > 0, "
                 f"got {nc.capacitance_j_per_k}")
            )

    ambient_ids = {nc.id for nc in kinds.get("ambient", [])}
    seen_pairs = set()
    for k, ec in enumerate(edges_cfg):
        if ec.i == ec.j:
            problems.append((DuplicateEdge, f"edge {k}: self-loop on node {ec.i}"))
        pair = (min(ec.i, ec.j), max(ec.i, ec.j))
        if pair in seen_pairs:
            problems.append((DuplicateEdge, f"edge {k}: duplicate pair {pair}"))
        seen_pairs.add(pair)
        if ec.convective:
            if ec.conv_base_k_per_w <= 0:
                problems.append(
                    (NonPositiveParameter, f"edge {k}: conv_base must be > 0")
                )
            if ec.conv_coeff < 0:
                problems.append(
                    (NonPositiveParameter, f"edge {k}: conv_coeff must be >= 0")
                )
            if ec.i not in ambient_ids and ec.j not in ambient_ids:
                problems.append(
                    (NetworkValidationError,
                     f"edge {k}: convective edge must touch the ambient node")
                )
        else:
            if ec.resistance_k_per_w <= 0:
                problems.append(
                    (NonPositiveParameter,
                     f"edge {k}: resistance must be > 0, got {ec.resistance_k_per_w}")
                )

    # Connectivity over the full graph (ambient included).
    if nodes_cfg and not problems:
        adj: dict[int, set[int]] = {nc.id: set() for nc in nodes_cfg}
        for ec in edges_cfg:
            adj[ec.i].add(ec.j)
            adj[ec.j].add(ec.i)
        seen = set()
        stack = [nodes_cfg[0].id]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adj[v] - seen)
        if len(seen) != len(nodes_cfg):
            missing = sorted(set(adj) - seen)
            problems.append(
                (DisconnectedGraph, f"nodes {missing} are not reachable in the graph")
            )

    if problems:
        first_cls = problems[0][0]
        msg = "; ".join(m for _, m in problems)
        raise first_cls(msg)

    nodes = [
        ThermalNode(id=nc.id, kind=nc.kind, label=nc.label,
                    capacitance=nc.capacitance_j_per_k)
        for nc in sorted(nodes_cfg, key=lambda nc: nc.id)
    ]
    edges = [_edge_from_config(ec) for ec in edges_cfg]
    return ThermalNetwork(nodes=nodes, edges=edges)


def _edge_from_config(ec: EdgeConfig) -> ThermalEdge:
    if ec.convective:
        return ThermalEdge(i=ec.i, j=ec.j, convective=True,
                           conv_base=ec.conv_base_k_per_w,
                           conv_coeff=ec.conv_coeff,
                           conv_exponent=ec.conv_exponent)
    return ThermalEdge(i=ec.i, j=ec.j, resistance=ec.resistance_k_per_w)


def convection_resistance(edge: ThermalEdge, v_xy: float) -> float:
    """Velocity-corrected node-to-ambient resistance R0 / (1 + c * v**e)."""
    if not edge.convective:
        raise NotConvective("convection_resistance called on a conduction edge")
    if v_xy < 0:
        raise ValueError("v_xy must be >= 0")
    return edge.conv_base / (1.0 + edge.conv_coeff * v_xy**edge.conv_exponent)


def edge_resistance(edge: ThermalEdge, v_xy: float) -> float:
    if edge.convective:
        return convection_resistance(edge, v_xy)
    return edge.resistance


def continuous_derivative(
    net: ThermalNetwork,
    state: TemperatureState | np.ndarray,
    heat_in: np.ndarray,
    v_xy: float,
) -> np.ndarray:
    """Temperature rate in K/s per node; zero for the ambient boundary node."""
    temps = state.temps if isinstance(state, TemperatureState) else np.asarray(state, float)
    heat_in = np.asarray(heat_in, float)
    if temps.shape != (net.n,) or heat_in.shape != (net.n,):
        raise DimensionMismatch(
            f"state/heat vectors must have shape ({net.n},), got "
            f"{temps.shape} and {heat_in.shape}"
        )
    flows = np.zeros(net.n)
    for e in net.edges:
        r = edge_resistance(e, v_xy)
        f = (temps[e.i] - temps[e.j]) / r
        flows[e.i] -= f
        flows[e.j] += f
    deriv = np.zeros(net.n)
    nonamb = net.capacitances > 0
    deriv[nonamb] = (flows[nonamb] + heat_in[nonamb]) / net.capacitances[nonamb]
    deriv[net.ambient_index] = 0.0
    return deriv


def system_matrices(net: ThermalNetwork, v_xy: float) -> tuple[np.ndarray, np.ndarray]:
    """Continuous-time (A_c, B_c) with the ambient row zeroed."""
    n = net.n
    A = np.zeros((n, n))
    for e in net.edges:
        g = 1.0 / edge_resistance(e, v_xy)
        A[e.i, e.i] -= g
        A[e.i, e.j] += g
        A[e.j, e.j] -= g
        A[e.j, e.i] += g
    B = np.zeros((n, n))
    for node in net.nodes:
        if node.kind == "ambient":
            A[node.id, :] = 0.0
            continue
        A[node.id, :] /= node.capacitance
        B[node.id, node.id] = 1.0 / node.capacitance
    return A, B


def discretize(
    net: ThermalNetwork, v_xy: float, dt: float, mode: str = "exact",
    v_bucket: int = 0,
) -> DiscreteThermalModel:
    """Freeze the convection resistances at v_xy and discretize at step dt.

    ``exact`` uses the zero-order-hold matrix exponential on the augmented
    [[A_c, B_c], [0, 0]] block, which stays well defined even when A_c is
    singular on the non-ambient block (conduction-only islands). ``euler``
    is the forward-Euler cross-check: A = I + A_c*dt, B = B_c*dt.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if v_xy < 0:
        raise ValueError("v_xy must be >= 0")
    Ac, Bc = system_matrices(net, v_xy)
    n = net.n
    if mode == "exact":
        M = np.zeros((2 * n, 2 * n))
        M[:n, :n] = Ac * dt
        M[:n, n:] = Bc * dt
        E = expm(M)
        A = E[:n, :n]
        B = E[:n, n:]
    elif mode == "euler":
        A = np.eye(n) + Ac * dt
        B = Bc * dt
    else:
        raise ValueError(f"unknown discretization mode: {mode!r}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise SingularSystem("discretization produced non-finite entries")
    # Enforce the boundary rows exactly; expm preserves them analytically but
    # the contract is bitwise.
    amb = net.ambient_index
    A[amb, :] = 0.0
    A[amb, amb] = 1.0
    B[amb, :] = 0.0
    return DiscreteThermalModel(A=A, B=B, dt=dt, v_bucket=v_bucket, ambient_index=amb)


def step(
    model: DiscreteThermalModel,
    state: TemperatureState | np.ndarray,
    u: np.ndarray,
) -> np.ndarray:
    """Advance one step: T_next = A T + B u. Ambient entry is unchanged."""
    temps = state.temps if isinstance(state, TemperatureState) else np.asarray(state, float)
    u = np.asarray(u, float)
    n = model.A.shape[0]
    if temps.shape != (n,) or u.shape != (n,):
        raise DimensionMismatch(
            f"state/input must have shape ({n},), got {temps.shape} and {u.shape}"
        )
    out = np.zeros(n)
    # Fixed-order accumulation: each output element is produced by the same
    # sequence of scalar operations regardless of batching, which keeps
    # single-agent and batched trajectories bit-identical.
    for j in range(n):
        out += model.A[:, j] * temps[j]
    for j in range(n):
        out += model.B[:, j] * u[j]
    out[model.ambient_index] = temps[model.ambient_index]
    return out


def step_batch(
    model: DiscreteThermalModel, temps: np.ndarray, u: np.ndarray
) -> np.ndarray:
    """Vectorized ``step`` over a leading batch axis, same op order per agent."""
    n = model.A.shape[0]
    out = np.zeros_like(temps)
    for j in range(n):
        out += model.A[:, j] * temps[:, j:j + 1]
    for j in range(n):
        out += model.B[:, j] * u[:, j:j + 1]
    out[:, model.ambient_index] = temps[:, model.ambient_index]
    return out


def steady_state(
    net: ThermalNetwork, u: np.ndarray, v_xy: float, ambient_temp: float
) -> np.ndarray:
    """Temperatures with zero net heat flow at every non-ambient node."""
    u = np.asarray(u, float)
    if u.shape != (net.n,):
        raise DimensionMismatch(f"heat vector must have shape ({net.n},)")
    if not np.all(np.isfinite(u)):
        raise DimensionMismatch("heat vector contains non-finite values")
    Ac, Bc = system_matrices(net, v_xy)
    amb = net.ambient_index
    keep = [i for i in range(net.n) if i != amb]
    A_red = Ac[np.ix_(keep, keep)]
    # Ambient coupling and inputs move to the right-hand side.
    rhs = -(Bc[np.ix_(keep, keep)] @ u[keep] + Ac[np.ix_(keep, [amb])].ravel() * ambient_temp)
    try:
        sol = np.linalg.solve(A_red, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(
            "steady-state solve failed; network is degenerate or has nodes "
            "with no path to ambient"
        ) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("steady-state solve produced non-finite temperatures")
    temps = np.empty(net.n)
    temps[keep] = sol
    temps[amb] = ambient_temp
    resid = continuous_derivative(net, temps, u, v_xy)
    scale = max(1.0, float(np.max(np.abs(temps))))
    if np.max(np.abs(resid)) > 1e-10 * scale:
        raise SingularSystem("steady-state residual exceeds tolerance")
    return temps


class ModelCache:
    """Velocity-bucketed cache of discrete models for one (network, dt).

    A depends on speed through the convection resistances; rebuilding the
    matrix exponential every step is wasteful, so speeds are quantized into
    buckets of ``bucket_width`` and one model is built per bucket, at the
    bucket center. Lookup is thread-safe with at-most-once construction.
    """

    def __init__(self, net: ThermalNetwork, dt: float, bucket_width: float,
                 mode: str = "exact"):
        if bucket_width <= 0:
            raise ValueError("bucket_width must be > 0")
        self.net = net
        self.dt = dt
        self.bucket_width = bucket_width
        self.mode = mode
        self._models: dict[int, DiscreteThermalModel] = {}
        self._lock = threading.Lock()

    def bucket_of(self, v_xy: float) -> int:
        return int(np.floor(max(v_xy, 0.0) / self.bucket_width))

    def bucket_speed(self, bucket: int) -> float:
        return (bucket + 0.5) * self.bucket_width

    def lookup(self, v_xy: float) -> DiscreteThermalModel:
        b = self.bucket_of(v_xy)
        model = self._models.get(b)
        if model is None:
            with self._lock:
                model = self._models.get(b)
                if model is None:
                    model = discretize(self.net, self.bucket_speed(b), self.dt,
                                       mode=self.mode, v_bucket=b)
                    self._models[b] = model
        return model

    def precompute(self, v_max: float) -> None:
        for b in range(self.bucket_of(v_max) + 1):
            self.lookup(self.bucket_speed(b))

    def stacked(self, v_max: float) -> tuple[np.ndarray, np.ndarray]:
        """(A, B) stacks indexed by bucket, for vectorized batch stepping."""
        self.precompute(v_max)
        n_buckets = self.bucket_of(v_max) + 1
        A = np.stack([self._models[b].A for b in range(n_buckets)])
        B = np.stack([self._models[b].B for b in range(n_buckets)])
        return A, B


def model_cache_lookup(cache: ModelCache, v_xy: float, dt: float | None = None
                       ) -> DiscreteThermalModel:
    """Functional wrapper over ``ModelCache.lookup`` with a dt guard."""
    if dt is not None and dt != cache.dt:
        raise ValueError(f"cache was built for dt={cache.dt}, requested dt={dt}")
    return cache.lookup(v_xy)


def spectral_radius(model: DiscreteThermalModel) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(model.A))))


def make_single_node_network(
    capacitance: float, resistance_to_ambient: float,
    conv_coeff: float = 0.0, conv_exponent: float = 1.0,
) -> ThermalNetwork:
    """Tiny two-node (node + ambient) network used by tests and demos."""
    nodes = [
        ThermalNode(id=0, kind="motor", label="NODE", capacitance=capacitance),
        ThermalNode(id=1, kind="ambient", label="AMBIENT"),
    ]
    if conv_coeff > 0:
        edges = [ThermalEdge(i=0, j=1, convective=True,
                             conv_base=resistance_to_ambient,
                             conv_coeff=conv_coeff, conv_exponent=conv_exponent)]
    else:
        edges = [ThermalEdge(i=0, j=1, resistance=resistance_to_ambient)]
    return ThermalNetwork(nodes=nodes, edges=edges)
