"""Lumped thermal networks and their steady-state / transient solvers.

A network is a set of nodes with heat capacities, symmetric conductive
links, and convective / radiative couplings to two ideal reservoirs
("medium" and "ambient").  The steady-state balance per node i is

    sum_j G_ij (T_j - T_i) + sum hA (T_res - T_i)
                           + sum k_r (T_res^4 - T_i^4) = 0

with k_r = eps * sigma * A.  The nonlinear system is solved either by
Newton iteration with the exact Jacobian (radiation contributes
4 k_r T_i^3 on the diagonal) or by lagged linearization of the radiation
term; both paths promise the same contract: max node residual <= tol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from .errors import NumericalFailure, ValidationFailure

# Stefan-Boltzmann constant, W/(m^2 K^4), CODATA 2018
SIGMA = 5.670374419e-8

RESERVOIRS = ("medium", "ambient")

DEFAULT_TOL = 1e-9   # W per node
DEFAULT_MAX_ITER = 50

SolveMethod = Literal["newton", "lagged"]


class NonConvergence(NumericalFailure):
    def __init__(self, iterations: int, residual: float):
        super().__init__(
            f"solver did not converge after {iterations} iterations "
            f"(max node residual {residual:.3e} W)"
        )
        self.iterations = iterations
        self.residual = residual


class SingularSystem(ValidationFailure):
    """A connected component of the network has no reservoir coupling."""


@dataclass(frozen=True)
class Material:
    """Homogeneous material properties used by the grid builder."""

    name: str
    conductivity: float    # W/(m K)
    density: float         # kg/m^3
    specific_heat: float   # J/(kg K)
    emissivity: float      # dimensionless, 0..1

    def __post_init__(self):
        if self.conductivity <= 0:
            raise ValueError(f"material {self.name!r}: conductivity must be > 0")
        if self.density <= 0:
            raise ValueError(f"material {self.name!r}: density must be > 0")
        if self.specific_heat <= 0:
            raise ValueError(f"material {self.name!r}: specific_heat must be > 0")
        if not 0.0 <= self.emissivity <= 1.0:
            raise ValueError(f"material {self.name!r}: emissivity must be in [0, 1]")


@dataclass(frozen=True)
class Scenario:
    """One operating point: reservoir temperatures and film-coefficient scales."""

    T_medium: float   # K
    T_ambient: float  # K
    h_medium_scale: float = 1.0
    h_ambient_scale: float = 1.0

    def __post_init__(self):
        if self.T_medium <= 0 or self.T_ambient <= 0:
            raise ValueError("reservoir temperatures must be absolute (> 0 K)")
        if self.h_medium_scale <= 0 or self.h_ambient_scale <= 0:
            raise ValueError("film coefficient scales must be > 0")

    def reservoir_temperature(self, reservoir: str) -> float:
        if reservoir == "medium":
            return self.T_medium
        if reservoir == "ambient":
            return self.T_ambient
        raise ValueError(f"unknown reservoir {reservoir!r}")

    def reservoir_scale(self, reservoir: str) -> float:
        return self.h_medium_scale if reservoir == "medium" else self.h_ambient_scale


@dataclass(frozen=True)
class TemperatureField:
    """Solution of one steady solve or one transient step."""

    temperatures: np.ndarray  # K, one per node
    converged: bool
    iterations: int
    residual_norm: float      # W, max abs node residual of the solved equation

    def __post_init__(self):
        temps = np.asarray(self.temperatures, dtype=float)
        temps.setflags(write=False)
        object.__setattr__(self, "temperatures", temps)


def _normalized_links(conductances, n):
    links = []
    seen = set()
    for entry in conductances:
        i, j, g = entry
        i, j, g = int(i), int(j), float(g)
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"conductance ({i}, {j}) out of range for {n} nodes")
        if i == j:
            raise ValueError(f"conductance links node {i} to itself")
        if g < 0:
            raise ValueError(f"conductance G({i},{j}) = {g} must be >= 0")
        a, b = (i, j) if i < j else (j, i)
        if (a, b) in seen:
            raise ValueError(f"duplicate conductance link ({a}, {b})")
        seen.add((a, b))
        links.append((a, b, g))
    links.sort()
    return tuple(links)


def _normalized_couplings(couplings, n, kind):
    out = []
    for entry in couplings:
        node, coeff, reservoir = entry
        node, coeff = int(node), float(coeff)
        if not 0 <= node < n:
            raise ValueError(f"{kind} coupling node {node} out of range")
        if coeff < 0:
            raise ValueError(f"{kind} coupling coefficient must be >= 0")
        if reservoir not in RESERVOIRS:
            raise ValueError(f"unknown reservoir {reservoir!r}")
        out.append((node, coeff, str(reservoir)))
    return tuple(out)


@dataclass(frozen=True)
class ThermalNetwork:
    """Immutable lumped network; safe to share across concurrent solves.

    conductances hold each undirected link once as (i, j, G) with i < j;
    the collection is interpreted symmetrically.  Convective couplings are
    (node, hA, reservoir) in W/K, radiative ones (node, eps*sigma*A,
    reservoir) in W/K^4.
    """

    capacitances: np.ndarray
    conductances: tuple = ()
    convective: tuple = ()
    radiative: tuple = ()

    def __post_init__(self):
        caps = np.asarray(self.capacitances, dtype=float)
        if caps.ndim != 1 or caps.size == 0:
            raise ValueError("capacitances must be a non-empty 1-D array")
        if np.any(caps <= 0):
            raise ValueError("all capacitances must be > 0")
        caps.setflags(write=False)
        n = caps.size
        object.__setattr__(self, "capacitances", caps)
        object.__setattr__(self, "conductances", _normalized_links(self.conductances, n))
        object.__setattr__(self, "convective", _normalized_couplings(self.convective, n, "convective"))
        object.__setattr__(self, "radiative", _normalized_couplings(self.radiative, n, "radiative"))

    @property
    def node_count(self) -> int:
        return self.capacitances.size

    def coupled_nodes(self) -> set:
        return {node for node, coeff, _ in self.convective if coeff > 0} | {
            node for node, coeff, _ in self.radiative if coeff > 0
        }


class _Assembled:
    """Solver-local arrays derived from a network and a scenario."""

    def __init__(self, network: ThermalNetwork, scenario: Scenario):
        n = network.node_count
        self.n = n

        ii = np.array([l[0] for l in network.conductances], dtype=int)
        jj = np.array([l[1] for l in network.conductances], dtype=int)
        gg = np.array([l[2] for l in network.conductances], dtype=float)
        rows = np.concatenate([ii, jj, ii, jj])
        cols = np.concatenate([jj, ii, ii, jj])
        vals = np.concatenate([-gg, -gg, gg, gg])
        self.laplacian = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

        conv_nodes, conv_coeffs, conv_temps = [], [], []
        for node, hA, reservoir in network.convective:
            eff = hA * scenario.reservoir_scale(reservoir)
            if eff == 0.0:
                continue
            conv_nodes.append(node)
            conv_coeffs.append(eff)
            conv_temps.append(scenario.reservoir_temperature(reservoir))
        self.conv_sum = np.zeros(n)
        self.conv_rhs = np.zeros(n)
        if conv_nodes:
            coeffs = np.asarray(conv_coeffs)
            np.add.at(self.conv_sum, conv_nodes, coeffs)
            np.add.at(self.conv_rhs, conv_nodes, coeffs * np.asarray(conv_temps))

        self.rad_nodes = np.array([c[0] for c in network.radiative if c[1] > 0], dtype=int)
        self.rad_coeffs = np.array([c[1] for c in network.radiative if c[1] > 0], dtype=float)
        self.rad_temps = np.array(
            [scenario.reservoir_temperature(c[2]) for c in network.radiative if c[1] > 0],
            dtype=float,
        )
        self.rad_sum = np.zeros(n)
        self.rad_rhs4 = np.zeros(n)
        np.add.at(self.rad_sum, self.rad_nodes, self.rad_coeffs)
        np.add.at(self.rad_rhs4, self.rad_nodes, self.rad_coeffs * self.rad_temps**4)

    def residual(self, T: np.ndarray) -> np.ndarray:
        """Per-node net heat inflow, W; zero at a steady state."""
        return (
            -(self.laplacian @ T)
            + self.conv_rhs - self.conv_sum * T
            + self.rad_rhs4 - self.rad_sum * T**4
        )

    def jacobian_matrix(self, T: np.ndarray) -> sp.csr_matrix:
        """Negated Jacobian of the residual (positive definite)."""
        diag = self.conv_sum + 4.0 * self.rad_sum * T**3
        return self.laplacian + sp.diags(diag)

    def lagged_system(self, T: np.ndarray):
        """Linearized radiation: h_r = k (T^2 + T_res^2)(T + T_res)."""
        n = self.n
        hr_sum = np.zeros(n)
        hr_rhs = np.zeros(n)
        if self.rad_nodes.size:
            Ti = T[self.rad_nodes]
            hr = self.rad_coeffs * (Ti**2 + self.rad_temps**2) * (Ti + self.rad_temps)
            np.add.at(hr_sum, self.rad_nodes, hr)
            np.add.at(hr_rhs, self.rad_nodes, hr * self.rad_temps)
        A = self.laplacian + sp.diags(self.conv_sum + hr_sum)
        b = self.conv_rhs + hr_rhs
        return A, b


def _check_reservoir_reachability(network: ThermalNetwork) -> None:
    n = network.node_count
    coupled = network.coupled_nodes()
    if network.conductances:
        ii = [l[0] for l in network.conductances if l[2] > 0]
        jj = [l[1] for l in network.conductances if l[2] > 0]
        graph = sp.csr_matrix((np.ones(len(ii)), (ii, jj)), shape=(n, n))
        ncomp, labels = csgraph.connected_components(graph, directed=False)
    else:
        ncomp, labels = n, np.arange(n)
    coupled_components = {labels[node] for node in coupled}
    orphans = [c for c in range(ncomp) if c not in coupled_components]
    if orphans:
        nodes = [int(i) for i in np.flatnonzero(np.isin(labels, orphans))]
        raise SingularSystem(
            f"nodes {nodes} form components with no reservoir coupling; "
            "the steady-state problem is singular"
        )


def _initial_guess(network: ThermalNetwork, scenario: Scenario) -> np.ndarray:
    t0 = 0.5 * (scenario.T_medium + scenario.T_ambient)
    return np.full(network.node_count, t0)


def _sparse_solve(A: sp.csr_matrix, b: np.ndarray) -> np.ndarray:
    return spla.spsolve(A.tocsc(), b)


def node_residuals(network: ThermalNetwork, scenario: Scenario,
                   temperatures: np.ndarray) -> np.ndarray:
    """Steady-state residual per node (W) for an arbitrary field."""
    T = np.asarray(temperatures, dtype=float)
    if T.shape != (network.node_count,):
        raise ValueError("temperature field length does not match network")
    return _Assembled(network, scenario).residual(T)


def solve_steady(network: ThermalNetwork, scenario: Scenario,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 method: SolveMethod = "newton") -> TemperatureField:
    """Solve the steady-state heat balance to max node residual <= tol."""
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    _check_reservoir_reachability(network)
    asm = _Assembled(network, scenario)

    T = _initial_guess(network, scenario)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        F = asm.residual(T)
        residual = float(np.max(np.abs(F)))
        if residual <= tol:
            return TemperatureField(T, True, iteration, residual)
        if method == "newton":
            delta = _sparse_solve(asm.jacobian_matrix(T), F)
            T_new = T + delta
            # keep the iterate physical; radiation needs T > 0
            while np.any(T_new <= 0):
                delta *= 0.5
                T_new = T + delta
        elif method == "lagged":
            A, b = asm.lagged_system(T)
            T_new = _sparse_solve(A, b)
        else:
            raise ValueError(f"unknown solve method {method!r}")
        T = T_new
    raise NonConvergence(max_iter, residual)


def solve_transient(network: ThermalNetwork, scenario: Scenario,
                    T_initial: Sequence[float], dt: float, steps: int,
                    tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                    ) -> list[TemperatureField]:
    """Backward-Euler integration of C dT/dt = F(T).

    Each step solves F(T) - C (T - T_prev)/dt = 0 by Newton iteration to the
    same per-node tolerance as the steady solver; the scheme is
    unconditionally stable.  Returns one field per step (the initial state
    is not included).
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    T_prev = np.asarray(T_initial, dtype=float).copy()
    if T_prev.shape != (network.node_count,):
        raise ValueError("T_initial length does not match network")
    _check_reservoir_reachability(network)
    asm = _Assembled(network, scenario)
    c_over_dt = network.capacitances / dt

    fields = []
    for _ in range(steps):
        T = T_prev.copy()
        converged = False
        residual = np.inf
        for iteration in range(1, max_iter + 1):
            G = asm.residual(T) - c_over_dt * (T - T_prev)
            residual = float(np.max(np.abs(G)))
            if residual <= tol:
                converged = True
                break
            A = asm.jacobian_matrix(T) + sp.diags(c_over_dt)
            delta = _sparse_solve(A, G)
            T_new = T + delta
            while np.any(T_new <= 0):
                delta *= 0.5
                T_new = T + delta
            T = T_new
        if not converged:
            raise NonConvergence(max_iter, residual)
        fields.append(TemperatureField(T, True, iteration, residual))
        T_prev = T
    return fields


def energy_residual(network: ThermalNetwork, field: TemperatureField,
                    scenario: Scenario) -> float:
    """Net heat flow into the network across all reservoir couplings (W).

    Diagnostic only: at a converged steady state the magnitude is bounded by
    node_count * tol; for an arbitrary field it just reports the imbalance.
    """
    T = np.asarray(field.temperatures, dtype=float)
    if T.shape != (network.node_count,):
        raise ValueError("temperature field length does not match network")
    total = 0.0
    for node, hA, reservoir in network.convective:
        eff = hA * scenario.reservoir_scale(reservoir)
        total += eff * (scenario.reservoir_temperature(reservoir) - T[node])
    for node, k, reservoir in network.radiative:
        t_res = scenario.reservoir_temperature(reservoir)
        total += k * (t_res**4 - T[node]**4)
    return float(total)
