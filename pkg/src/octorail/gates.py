"""Teleported-gate extraction from macronode splitter networks.

The gate induced by a choice of homodyne angles is computed by exact linear
constraint elimination in the ideal (infinitely squeezed ancilla) limit:
Bell-pair nullifiers plus measured-quadrature projections form a square
linear system whose solution expresses the output quadratures as a linear
map of the input quadratures (the induced symplectic gate) plus a linear
map of the measurement outcomes (the displacement rule).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import ExactCoeff, ExactMatrix, ONE, ZERO, solve_exact
from .networks import SplitterNetwork, build_network, x_block
from .phasespace import SymplecticMap, make_rotation, make_shear

# Fourier gate: x -> -p, p -> x.  Acts as the logical Hadamard.
FOURIER = SymplecticMap(1, np.array([[0.0, -1.0], [1.0, 0.0]]))


class NonImplementableGateError(ValueError):
    """The angle choice does not implement a deterministic Gaussian map."""


class DegenerateMeasurementError(ValueError):
    """theta2 == theta1 (mod pi): the two homodynes are not independent."""


def teleported_gate_v(theta1: float, theta2: float) -> SymplecticMap:
    """Single-mode gate enacted by one teleportation step at homodyne
    angles (theta1, theta2): a shear of 2/tan(theta2-theta1) sandwiched
    between two equal rotations."""
    delta = theta2 - theta1
    if abs(math.sin(delta)) < 1e-12:
        raise DegenerateMeasurementError("theta2 - theta1 is a multiple of pi")
    r = make_rotation(theta1)
    return r @ make_shear(2.0 / math.tan(delta)) @ r


def displacement_mu(m1: float, m2: float, theta1: float, theta2: float) -> complex:
    """Outcome-dependent displacement accompanying teleported_gate_v."""
    delta = theta2 - theta1
    if abs(math.sin(delta)) < 1e-12:
        raise DegenerateMeasurementError("theta2 - theta1 is a multiple of pi")
    return -1j * (m1 * np.exp(-1j * theta2) + m2 * np.exp(-1j * theta1)) \
        / math.sin(delta)


@dataclass(frozen=True)
class TeleportedGate:
    induced_map: SymplecticMap
    displacement_rule: np.ndarray  # (2K, N): outcome -> output quadrature shift
    io_spec: tuple  # ((input_mode, bell_mode), ...) 0-based
    induced_exact: ExactMatrix | None = None
    displacement_exact: ExactMatrix | None = None


# cos(k*pi/4), sin(k*pi/4) in Q(sqrt2), k mod 8
_EIGHTH = {
    0: ExactCoeff(1), 1: ExactCoeff(0, Fraction(1, 2)),
    2: ExactCoeff(0), 3: ExactCoeff(0, Fraction(-1, 2)),
    4: ExactCoeff(-1), 5: ExactCoeff(0, Fraction(-1, 2)),
    6: ExactCoeff(0), 7: ExactCoeff(0, Fraction(1, 2)),
}


def _eighth_multiple(theta: float):
    """Return integer k with theta = k*pi/4 (mod 2pi), or None."""
    k = theta / (math.pi / 4)
    kr = round(k)
    if abs(k - kr) < 1e-12:
        return kr % 8
    return None


def _cos_sin_exact(theta: float):
    k = _eighth_multiple(theta)
    if k is None:
        return None
    return _EIGHTH[k], _EIGHTH[(k + 6) % 8]  # cos k, sin k = cos(k-2)


def _solve_constraints(sx, angles, cos_sin, zero, one, solve, wiring):
    """Shared exact/float elimination.

    sx: N x N x-block entries accessor sx[i][j]; cos_sin(theta) -> (c, s);
    solve(A, rhs_matrix) -> solution matrix.  Returns (A_out, B_out) rows
    ordered (x_out block, p_out block), columns (x_in block, p_in block)
    and (m_1..m_N).
    """
    n = len(angles)
    k = n // 2
    input_modes = [w[0] for w in wiring]
    bell_modes = [w[1] for w in wiring]
    in_col = {m: i for i, m in enumerate(input_modes)}
    bell_col = {m: i for i, m in enumerate(bell_modes)}
    # unknowns: [x_b 0..k-1, p_b, x_o, p_o]
    nu = 4 * k
    A = [[zero] * nu for _ in range(nu)]
    C = [[zero] * (2 * k) for _ in range(nu)]   # input-symbol coefficients
    D = [[zero] * n for _ in range(nu)]         # outcome coefficients
    row = 0
    for i in range(k):  # Bell nullifiers: x_b = x_o, p_b = -p_o
        A[row][i] = one
        A[row][2 * k + i] = -one
        row += 1
        A[row][k + i] = one
        A[row][3 * k + i] = one
        row += 1
    for d in range(n):  # measured quadratures
        c, s = cos_sin(angles[d])
        for j in range(n):
            coef_x = sx[d][j] * c
            coef_p = sx[d][j] * s
            if j in bell_col:
                A[row][bell_col[j]] = A[row][bell_col[j]] + coef_x
                A[row][k + bell_col[j]] = A[row][k + bell_col[j]] + coef_p
            else:
                C[row][in_col[j]] = C[row][in_col[j]] - coef_x
                C[row][k + in_col[j]] = C[row][k + in_col[j]] - coef_p
        D[row][d] = one
        row += 1
    # A u = -C s + D m  (C stored negated above)
    rhs = [crow + drow for crow, drow in zip(C, D)]
    sol = solve(A, rhs)
    # output rows: x_o block then p_o block
    out_rows = list(range(2 * k, 4 * k))
    a_out = [[sol[r][c] for c in range(2 * k)] for r in out_rows]
    b_out = [[sol[r][2 * k + c] for c in range(n)] for r in out_rows]
    return a_out, b_out


def induced_gate(network: SplitterNetwork, angles, wiring=None) -> TeleportedGate:
    """Gate induced on the teleported modes by measuring the network outputs
    at the given homodyne angles, with ideal Bell-pair ancillas.

    ``wiring`` lists (input_mode, bell_mode) pairs (0-based); by default
    logical wire k enters on mode 2k and its Bell ancilla on mode 2k+1,
    the output being the ancilla's partner.
    """
    angles = list(getattr(angles, "angles", angles))
    n = network.n_modes
    if len(angles) != n:
        raise ValueError("angle count must equal detector count")
    if wiring is None:
        wiring = tuple((2 * i, 2 * i + 1) for i in range(n // 2))
    wiring = tuple((int(a), int(b)) for a, b in wiring)
    if sorted([m for w in wiring for m in w]) != list(range(n)):
        raise ValueError("wiring must partition the network modes")
    k = n // 2
    s_exact = x_block(network)
    exact_ok = all(_eighth_multiple(t) is not None for t in angles)
    if exact_ok:
        def solve(a_rows, rhs_rows):
            return solve_exact(ExactMatrix(a_rows), ExactMatrix(rhs_rows)).rows

        try:
            a_out, b_out = _solve_constraints(
                s_exact.rows, angles, _cos_sin_exact, ZERO, ONE, solve, wiring)
        except ValueError as exc:
            raise NonImplementableGateError(str(exc)) from exc
        a_exact = ExactMatrix(a_out)
        b_exact = ExactMatrix(b_out)
        gate_map = SymplecticMap(k, a_exact.to_float())
        return TeleportedGate(gate_map, b_exact.to_float(), wiring,
                              a_exact, b_exact)
    # float path (angles such as arctan 2)
    sxf = s_exact.to_float()

    def solve_f(a_rows, rhs_rows):
        a = np.array(a_rows, dtype=float)
        rhs = np.array(rhs_rows, dtype=float)
        if abs(np.linalg.det(a)) < 1e-12:
            raise NonImplementableGateError("singular constraint system")
        return np.linalg.solve(a, rhs)

    a_out, b_out = _solve_constraints(
        sxf, angles, lambda t: (math.cos(t), math.sin(t)),
        0.0, 1.0, solve_f, wiring)
    return TeleportedGate(SymplecticMap(k, np.array(a_out)),
                          np.array(b_out), wiring)


# ---------------------------------------------------------------------------
# printed gate tables

def _f_matrix(k_modes, wires):
    m = np.eye(2 * k_modes)
    for w in wires:
        m[w, w] = m[k_modes + w, k_modes + w] = 0.0
        m[w, k_modes + w] = -1.0
        m[k_modes + w, w] = 1.0
    return m


def _shear_matrix(k_modes, sigma):
    m = np.eye(2 * k_modes)
    for w in range(k_modes):
        m[k_modes + w, w] = sigma
    return m


def _swap_matrix(k_modes, pairs):
    perm = list(range(k_modes))
    for a, b in pairs:
        perm[a], perm[b] = perm[b], perm[a]
    m = np.zeros((2 * k_modes, 2 * k_modes))
    for i, j in enumerate(perm):
        m[i, j] = 1.0
        m[k_modes + i, k_modes + j] = 1.0
    return m


def _cz_matrix(k_modes, pairs, g=1.0):
    m = np.eye(2 * k_modes)
    for a, b in pairs:
        m[k_modes + a, b] = g
        m[k_modes + b, a] = g
    return m


_AT2 = math.atan(2.0)

GATE_TABLES = {
    # level-0 network, single-mode gates
    "two-detector": [
        ((0.0, math.pi / 2), np.eye(2), "identity"),
        ((-math.pi / 4, math.pi / 4), _f_matrix(1, [0]), "Fourier (logical H)"),
        ((0.0, -_AT2), _shear_matrix(1, -1.0), "P(-1) (logical phase)"),
    ],
    # level-1 network, two-mode gates
    "four-detector": [
        ((0.0, math.pi / 2, 0.0, math.pi / 2), np.eye(4), "identity x identity"),
        ((-math.pi / 4, math.pi / 4, -math.pi / 4, math.pi / 4),
         _f_matrix(2, [0, 1]), "F x F"),
        ((0.0, -_AT2, 0.0, -_AT2), _shear_matrix(2, -1.0), "P(-1) x P(-1)"),
        ((math.pi / 2, 0.0, 0.0, math.pi / 2), _swap_matrix(2, [(0, 1)]), "SWAP"),
        ((0.0, -_AT2, 0.0, _AT2), _cz_matrix(2, [(0, 1)]), "CZ(1)"),
    ],
    # level-2 network, four-mode gates
    "eight-detector": [
        (tuple([0.0, math.pi / 2] * 4), np.eye(8), "identity^4"),
        (tuple([-math.pi / 4, math.pi / 4] * 4), _f_matrix(4, range(4)), "F^4"),
        (tuple([0.0, -_AT2] * 4), _shear_matrix(4, -1.0), "P(-1)^4"),
        ((math.pi / 2, 0.0, 0.0, math.pi / 2) * 2,
         _swap_matrix(4, [(0, 1), (2, 3)]), "SWAP x SWAP"),
        ((0.0, -_AT2, 0.0, _AT2) * 2,
         _cz_matrix(4, [(0, 1), (2, 3)]), "CZ(1) x CZ(1)"),
    ],
}

_TABLE_LEVELS = {"two-detector": 0, "four-detector": 1, "eight-detector": 2}


def verify_gate_tables() -> list[dict]:
    """Run every printed table row through induced_gate and compare.

    Rows with angles that are multiples of pi/4 are compared exactly; rows
    involving arctan(2) to 1e-10.
    """
    report = []
    for table, rows in GATE_TABLES.items():
        net = build_network(_TABLE_LEVELS[table])
        for angles, expected, label in rows:
            gate = induced_gate(net, angles)
            if gate.induced_exact is not None:
                ok = np.array_equal(gate.induced_exact.to_float(), expected)
                max_dev = float(np.abs(gate.induced_map.matrix - expected).max())
            else:
                max_dev = float(np.abs(gate.induced_map.matrix - expected).max())
                ok = max_dev <= 1e-10
            report.append({"table": table, "gate": label, "angles": angles,
                           "pass": bool(ok), "max_dev": max_dev})
    return report


# ---------------------------------------------------------------------------
# numerical angle search

_ARITY_LEVEL = {1: 0, 2: 1, 4: 2}


@dataclass(frozen=True)
class AngleSolution:
    angles: tuple
    residual: float
    reachable: bool


def _gate_matrix_or_none(net, angles):
    try:
        return induced_gate(net, angles).induced_map.matrix
    except NonImplementableGateError:
        return None


def solve_angles(target: SymplecticMap, arity: int, n_starts: int = 40,
                 seed: int = 0) -> AngleSolution:
    """Search homodyne angles whose induced gate matches the target map.

    Least-squares over the angle vector (angles taken mod pi); among
    solutions below residual 1e-9 the smallest l2-norm angle vector wins.
    A residual above 1e-6 is reported as not reachable (which is not a
    proof of impossibility).
    """
    from scipy.optimize import least_squares

    if arity not in _ARITY_LEVEL:
        raise ValueError("arity must be 1, 2 or 4")
    net = build_network(_ARITY_LEVEL[arity])
    n = net.n_modes
    tmat = target.matrix
    if tmat.shape != (n, n):
        raise ValueError("target size does not match arity")

    def resid(angles):
        m = _gate_matrix_or_none(net, angles)
        if m is None:
            return np.full(n * n, 1e3)
        return (m - tmat).ravel()

    rng = np.random.default_rng(seed)
    seeds = [np.array(row[0]) for rows in GATE_TABLES.values()
             for row in rows if len(row[0]) == n]
    seeds += [rng.uniform(-math.pi / 2, math.pi / 2, n)
              for _ in range(n_starts)]
    best = None
    for x0 in seeds:
        try:
            res = least_squares(resid, x0, xtol=1e-14, ftol=1e-14, gtol=1e-14)
        except Exception:
            continue
        ang = np.array([math.remainder(a, math.pi) for a in res.x])
        r = float(np.abs(resid(ang)).max())
        key = (r > 1e-9, r if r > 1e-9 else 0.0, float(np.linalg.norm(ang)))
        if best is None or key < best[0]:
            best = (key, ang, r)
    ang, r = best[1], best[2]
    return AngleSolution(tuple(float(a) for a in ang), r, r <= 1e-6)
