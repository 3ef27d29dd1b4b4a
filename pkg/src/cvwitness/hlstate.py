"""
Horodecki-Lewenstein PPT entangled family and the truncated R-matrix test.

The state (with ``a_n = a**n``, ``c_n = c**n`` and ``0 < a < c < 1``) is::

    rho = (|Psi><Psi| + sum_{n<m} |Psi_mn><Psi_mn|) / A
    |Psi>    = sum_n a^n |n, n>
    |Psi_mn> = c^m a^n |n, m> + c^-m a^m |m, n>

Fock labels start at 1.  Arrays here are 0-based, so array index ``i``
holds Fock label ``i + 1``.

For a truncation to levels ``1..N`` and the trace-orthonormal local basis
``{I/sqrt(N), lambda_k/sqrt(2)}`` every separable state satisfies
``||R|| <= <I_N (x) I_N>``; :func:`prop2_check` evaluates the ratio.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import DETECTION_TOL, NORMALIZATION_RTOL
from .exceptions import InputError, NumericError
from .matcore import herm_eigvals, trace_norm
from .reports import CriterionReport

__all__ = [
    "HLParams",
    "TruncatedDensityBlock",
    "OperatorBasis",
    "ScanRow",
    "hl_normalization",
    "normalization_partial_sums",
    "hl_truncated_block",
    "su_n_basis",
    "build_r_matrix",
    "prop2_check",
    "prop2_check_block",
    "scan_hl_region",
    "write_scan_csv",
    "scan_workers",
]

_MAX_SERIES_TERMS = 5_000_000


@dataclass(frozen=True)
class HLParams:
    a: float
    c: float

    def __post_init__(self):
        for name in ("a", "c"):
            value = getattr(self, name)
            if isinstance(value, complex) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise InputError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InputError(f"{name} must be finite")
        if not 0.0 < self.a < self.c < 1.0:
            raise InputError(f"need 0 < a < c < 1, got a={self.a}, c={self.c}")


def _closed_form_normalization(a, c):
    a2, c2 = a * a, c * c
    q = a2 / c2
    return (a2 / (1.0 - a2)
            + c2 * a2 * c2 / ((1.0 - c2) * (1.0 - a2 * c2))
            + q * q / (1.0 - q) ** 2)


def normalization_partial_sums(p, m_max):
    """Partial sums ``S_1 <= S_2 <= ...`` of the normalization series.

    ``S_m`` collects ``||a^n|n,n>||^2`` for ``n <= m`` and ``||Psi_kn||^2``
    for every ``n < k <= m``.
    """
    a2, c2 = p.a * p.a, p.c * p.c
    q = a2 / c2
    m = np.arange(1, m_max + 1, dtype=float)
    diag = a2**m
    below = np.concatenate(([0.0], np.cumsum(diag)[:-1]))
    # ||Psi_mn||^2 = c^{2m} a^{2n} + q^m, summed over n = 1..m-1
    cross = c2**m * below + (m - 1.0) * q**m
    return np.cumsum(diag + cross)


def _series_normalization(p):
    r = max(p.a**2, p.c**2, (p.a / p.c) ** 2)
    m_max = int(1.5 * math.log(1e-20) / math.log(r)) + 64
    if m_max > _MAX_SERIES_TERMS:
        raise InputError(
            f"(a, c) = ({p.a}, {p.c}) is too close to the degenerate boundary "
            "for the series cross-check")
    return float(normalization_partial_sums(p, m_max)[-1])


def hl_normalization(p):
    """Normalizing factor ``A`` from the closed form, verified by summation."""
    closed = _closed_form_normalization(p.a, p.c)
    summed = _series_normalization(p)
    if abs(closed - summed) > NORMALIZATION_RTOL * abs(closed):
        raise NumericError(
            f"normalization mismatch: closed form {closed!r}, series {summed!r}")
    return closed


@dataclass
class TruncatedDensityBlock:
    """Elements ``<i, j| rho |k, l>`` for Fock labels ``1..N`` on each side.

    ``elements[i, j, k, l]`` uses 0-based indices.  The block is generally
    sub-normalized: its trace is the weight of the truncated subspace.
    """

    levels: int
    elements: np.ndarray
    norm_A: float = 1.0

    def __post_init__(self):
        n = self.levels
        self.elements = np.asarray(self.elements)
        if self.elements.shape != (n, n, n, n):
            raise InputError(f"elements must have shape {(n, n, n, n)}")

    def matrix(self):
        """The block as an ``N^2 x N^2`` matrix with row index ``(i, j)``."""
        n = self.levels
        return self.elements.reshape(n * n, n * n)

    def trace(self):
        return float(np.einsum("ijij->", self.elements).real)

    def min_eigenvalue(self):
        return float(herm_eigvals(self.matrix())[0])

    def partial_transpose(self):
        """Transpose on the second factor: ``(i, j; k, l) -> (i, l; k, j)``."""
        return TruncatedDensityBlock(
            self.levels, self.elements.transpose(0, 3, 2, 1), self.norm_A)


def hl_truncated_block(p, levels=3):
    """Restriction of the Horodecki-Lewenstein state to labels ``1..levels``.

    Only ``|Psi_mn>`` with both labels inside the window touch the block.
    """
    if int(levels) != levels or levels < 2:
        raise InputError(f"levels must be an integer >= 2, got {levels}")
    n_lv = int(levels)
    a, c = float(p.a), float(p.c)
    norm = hl_normalization(p)
    el = np.zeros((n_lv,) * 4)

    # Each coefficient is written once as a product of powers so that the
    # partial-transpose symmetry holds bit for bit.
    for n in range(1, n_lv + 1):
        for m in range(1, n_lv + 1):
            el[n - 1, n - 1, m - 1, m - 1] = a**n * a**m

    for n in range(1, n_lv + 1):
        for m in range(n + 1, n_lv + 1):
            i, j = n - 1, m - 1
            el[i, j, i, j] = c ** (2 * m) * a ** (2 * n)
            el[j, i, j, i] = c ** (-2 * m) * a ** (2 * m)
            el[i, j, j, i] = el[j, i, i, j] = a**n * a**m
    return TruncatedDensityBlock(n_lv, el / norm, norm)


@dataclass
class OperatorBasis:
    """Trace-orthonormal Hermitian basis ``{I/sqrt(N), lambda_k/sqrt(2)}``."""

    levels: int
    operators: np.ndarray

    @property
    def generators(self):
        """The un-normalized SU(N) generators ``lambda_k``."""
        return self.operators[1:] * math.sqrt(2.0)


def _generators(n):
    gens = []
    for k in range(1, n):
        for j in range(k):
            sym = np.zeros((n, n), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            asym = np.zeros((n, n), dtype=complex)
            asym[j, k] = -1j
            asym[k, j] = 1j
            gens += [sym, asym]
        diag = np.zeros(n)
        diag[:k] = 1.0
        diag[k] = -k
        gens.append(np.diag(diag * math.sqrt(2.0 / (k * (k + 1)))).astype(complex))
    return gens


def su_n_basis(levels=3):
    """Identity plus generalized Gell-Mann matrices, all trace-orthonormal.

    Generators are grouped by the largest level they touch: for each ``k``
    the symmetric/antisymmetric pairs ``(j, k)`` with ``j < k``, then the
    ``k``-th diagonal one.  For three levels this is the familiar
    ``lambda_1 ... lambda_8`` order; for two, the Pauli matrices.
    """
    if int(levels) != levels or levels < 2:
        raise InputError(f"levels must be an integer >= 2, got {levels}")
    n = int(levels)
    ops = [np.eye(n, dtype=complex) / math.sqrt(n)]
    ops += [g / math.sqrt(2.0) for g in _generators(n)]
    return OperatorBasis(n, np.array(ops))


def build_r_matrix(block, basis, basis_b=None):
    """``R_ij = Tr[rho (A_i (x) B_j)]`` over the truncated block."""
    basis_b = basis if basis_b is None else basis_b
    if basis.levels != block.levels or basis_b.levels != block.levels:
        raise InputError("basis and block truncation levels differ")
    r = np.einsum("ijkl,xki,ylj->xy", block.elements,
                  basis.operators, basis_b.operators)
    scale = max(1.0, float(np.max(np.abs(r))))
    if np.max(np.abs(r.imag)) > 1e-12 * scale:
        raise NumericError("R matrix has a non-negligible imaginary part")
    return np.ascontiguousarray(r.real)


def prop2_check_block(block, basis=None, tol=DETECTION_TOL, parameters=None):
    """Compare ``||R||`` with ``<I_N (x) I_N> = Tr(block)``."""
    basis = su_n_basis(block.levels) if basis is None else basis
    r = build_r_matrix(block, basis)
    lhs = float(trace_norm(r))
    rhs = block.trace()
    if rhs <= 0.0:
        raise InputError("truncated block has zero weight; ratio undefined")
    ratio = lhs / rhs
    return CriterionReport.evaluate(
        "prop2", lhs, rhs, ratio - 1.0, tol=tol,
        parameters={"levels": block.levels, **(parameters or {})},
        details={"ratio": ratio},
    )


def prop2_check(p, levels=3, tol=DETECTION_TOL):
    """Truncated R-matrix test on the Horodecki-Lewenstein state ``(a, c)``."""
    block = hl_truncated_block(p, levels)
    return prop2_check_block(block, tol=tol,
                             parameters={"a": float(p.a), "c": float(p.c)})


class ScanRow(NamedTuple):
    a: float
    c: float
    ratio: float
    detected: bool


def scan_workers(workers=None):
    """Thread count: explicit value, else ``CVW_THREADS`` (0 or unset = auto)."""
    if workers is None:
        raw = os.environ.get("CVW_THREADS", "0").strip() or "0"
        try:
            workers = int(raw)
        except ValueError as exc:
            raise InputError(f"CVW_THREADS must be an integer, got {raw!r}") from exc
    if workers < 0:
        raise InputError("thread count must be >= 0")
    return workers or (os.cpu_count() or 1)


def _grid(grid_steps):
    centers = (np.arange(grid_steps) + 0.5) / grid_steps
    return [(float(centers[i]), float(centers[j]))
            for i in range(grid_steps) for j in range(i + 1, grid_steps)]


def scan_hl_region(grid_steps, levels=3, tol=DETECTION_TOL, workers=None):
    """Evaluate :func:`prop2_check` on cell centres of the triangle ``a < c``.

    Rows come out in row-major order (``a`` outer, ``c`` inner) whatever the
    number of worker threads.
    """
    if int(grid_steps) != grid_steps or grid_steps < 2:
        raise InputError(f"grid_steps must be an integer >= 2, got {grid_steps}")
    points = _grid(int(grid_steps))

    def run(point):
        rep = prop2_check(HLParams(*point), levels, tol)
        return ScanRow(point[0], point[1], rep.details["ratio"], rep.detected)

    n_threads = scan_workers(workers)
    if n_threads == 1:
        return [run(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(run, points))


def write_scan_csv(rows, fh):
    """Write scan rows to an open text file in the ``a,c,ratio,detected`` format."""
    fh.write("a,c,ratio,detected\n")
    for row in rows:
        fh.write(f"{row.a:.10g},{row.c:.10g},{row.ratio:.10g},{int(row.detected)}\n")
