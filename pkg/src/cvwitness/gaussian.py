"""
Covariance-matrix data model and covariance-based separability criteria.

Convention
----------
Quadratures are ordered ``(x1, p1, x2, p2, ...)`` with ``[x, p] = i``, and
the stored matrix is twice the symmetrised covariance::

    gamma[j, k] = <{dr_j, dr_k}> = 2 * <dr_j dr_k>_sym

so the vacuum has ``gamma = identity`` and ``Var(x1) = gamma[0, 0] / 2``.
Loaders accept the ``(x1..xn, p1..pn)`` ordering and convert.
"""

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .constants import DETECTION_TOL, PHYSICALITY_TOL, SYMMETRY_TOL
from .exceptions import InapplicableError, InputError, NumericError
from .matcore import as_matrix, herm_eigvals, sym_eigvals, trace_norm
from .reports import CriterionReport

__all__ = [
    "CovarianceMatrix",
    "ModePartition",
    "WeightVector",
    "symplectic_form",
    "quadrature_index",
    "vacuum",
    "tmsv",
    "tmsv_with_ancillas",
    "werner_wolf_state",
    "builtin",
    "load_covariance",
    "is_physical",
    "second_moments",
    "build_c_matrix",
    "local_brackets",
    "prop1a_check",
    "prop1b_check",
    "duan_check",
    "mancini_check",
    "tlur_check",
    "symplectic_eigenvalues",
    "partial_transpose",
    "gaussian_ppt_check",
]


def symplectic_form(n_modes):
    """Direct sum of ``n_modes`` blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quadrature_index(label):
    """Map a 1-based label such as ``"x1"`` or ``"p3"`` to its 0-based row."""
    m = re.fullmatch(r"([xp])(\d+)", label)
    if m is None or int(m.group(2)) < 1:
        raise InputError(f"bad quadrature label {label!r}")
    return 2 * (int(m.group(2)) - 1) + (m.group(1) == "p")


def _xxpp_to_xpxp(n_modes):
    perm = np.empty(2 * n_modes, dtype=int)
    perm[0::2] = np.arange(n_modes)
    perm[1::2] = np.arange(n_modes) + n_modes
    return perm


@dataclass
class CovarianceMatrix:
    """Second moments of an ``n``-mode state in the ``gamma = 2 Cov`` convention.

    Physicality (``gamma + i Omega >= 0``) is not enforced here; call
    :func:`is_physical` when it matters.
    """

    gamma: np.ndarray
    mean: np.ndarray = None

    def __post_init__(self):
        g = as_matrix(self.gamma)
        if np.iscomplexobj(g):
            raise InputError("gamma must be real")
        if g.shape[0] != g.shape[1] or g.shape[0] % 2:
            raise InputError(f"gamma must be 2n x 2n, got shape {g.shape}")
        sym_eigvals(g, tol=SYMMETRY_TOL)
        self.gamma = 0.5 * (g + g.T)
        if self.mean is None:
            self.mean = np.zeros(g.shape[0])
        else:
            mean = np.asarray(self.mean, dtype=float)
            if mean.shape != (g.shape[0],) or not np.all(np.isfinite(mean)):
                raise InputError(f"mean must be a finite vector of length {g.shape[0]}")
            self.mean = mean

    @property
    def n_modes(self):
        return self.gamma.shape[0] // 2

    @property
    def covariance(self):
        """Symmetrised covariance ``<dr_j dr_k>_sym = gamma / 2``."""
        return 0.5 * self.gamma

    @classmethod
    def from_xxpp(cls, gamma, mean=None):
        g = as_matrix(gamma)
        if g.shape[0] % 2:
            raise InputError(f"gamma must be 2n x 2n, got shape {g.shape}")
        perm = _xxpp_to_xpxp(g.shape[0] // 2)
        mean = None if mean is None else np.asarray(mean, dtype=float)[perm]
        return cls(g[np.ix_(perm, perm)], mean)

    @classmethod
    def from_dict(cls, doc):
        try:
            gamma = np.array(doc["gamma"], dtype=float)
            n_modes = int(doc["n_modes"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed covariance document: {exc}") from exc
        if gamma.shape != (2 * n_modes, 2 * n_modes):
            raise InputError(
                f"n_modes={n_modes} but gamma has shape {gamma.shape}")
        ordering = doc.get("ordering", "xpxp")
        mean = doc.get("mean")
        if ordering == "xpxp":
            return cls(gamma, mean)
        if ordering == "xxpp":
            return cls.from_xxpp(gamma, mean)
        raise InputError(f"unknown ordering {ordering!r}")

    def to_dict(self):
        return {
            "n_modes": self.n_modes,
            "ordering": "xpxp",
            "gamma": self.gamma.tolist(),
            "mean": self.mean.tolist(),
        }

    def reduced(self, modes):
        """Marginal on the listed 0-based modes (in the order given)."""
        modes = list(modes)
        if not modes or any(not 0 <= m < self.n_modes for m in modes):
            raise InputError(f"invalid mode list {modes} for {self.n_modes} modes")
        idx = np.array([[2 * m, 2 * m + 1] for m in modes]).ravel()
        return CovarianceMatrix(self.gamma[np.ix_(idx, idx)], self.mean[idx])


@dataclass(frozen=True)
class ModePartition:
    """Subsystem A is the first ``m_modes_A`` modes, B the remaining ones."""

    m_modes_A: int
    n_modes_B: int

    def __post_init__(self):
        if self.m_modes_A < 1 or self.n_modes_B < 1:
            raise InputError("both subsystems need at least one mode")

    @classmethod
    def parse(cls, text):
        """Parse ``"M:N"``."""
        m = re.fullmatch(r"\s*(\d+)\s*:\s*(\d+)\s*", text)
        if m is None:
            raise InputError(f"partition must look like 'M:N', got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def n_modes(self):
        return self.m_modes_A + self.n_modes_B

    def check(self, cov):
        if cov.n_modes != self.n_modes:
            raise InputError(
                f"partition {self.m_modes_A}:{self.n_modes_B} does not match "
                f"a {cov.n_modes}-mode state")

    def slices(self):
        split = 2 * self.m_modes_A
        return slice(0, split), slice(split, 2 * self.n_modes)

    def __str__(self):
        return f"{self.m_modes_A}:{self.n_modes_B}"


@dataclass
class WeightVector:
    """Real weights ``a`` (one per A-quadrature) and ``b`` (one per B-quadrature).

    The local observables are ``A_i = a_i r_i`` over the A quadratures in
    ``(x, p)`` order, and likewise for B.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float).ravel()
        self.b = np.asarray(self.b, dtype=float).ravel()
        for name, w in (("a", self.a), ("b", self.b)):
            if w.size == 0 or w.size % 2:
                raise InputError(f"weights {name} need an even, positive length")
            if not np.all(np.isfinite(w)):
                raise InputError(f"weights {name} must be finite")
            if not np.any(w):
                raise InputError(f"weights {name} are all zero")

    @classmethod
    def werner_wolf(cls):
        """The hand-picked 2:2 weights that expose the Werner-Wolf state."""
        h = math.sqrt(2.0) / 2.0
        return cls([h, 1.0, h, 1.0], [1.0, h, 1.0, h])

    @classmethod
    def uniform(cls, part):
        return cls(np.ones(2 * part.m_modes_A), np.ones(2 * part.n_modes_B))

    def check(self, part):
        if self.a.size != 2 * part.m_modes_A or self.b.size != 2 * part.n_modes_B:
            raise InputError(
                f"weights of length {self.a.size}/{self.b.size} do not fit "
                f"partition {part}")


def vacuum(n_modes):
    return CovarianceMatrix(np.eye(2 * n_modes))


def tmsv(r):
    """Two-mode squeezed vacuum with ``x1 + x2`` and ``p1 - p2`` squeezed.

    Off-diagonal block is ``sinh(2r) * diag(-1, 1)``, so the Duan
    combination with ``a = 1`` has total variance ``2 exp(-2r)``.
    """
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    g = np.array([
        [c, 0, -s, 0],
        [0, c, 0, s],
        [-s, 0, c, 0],
        [0, s, 0, c],
    ], dtype=float)
    return CovarianceMatrix(g)


def tmsv_with_ancillas(r):
    """Four modes ``(s1, v1 | s2, v2)``: a TMSV shared between A and B plus one
    vacuum ancilla on each side, laid out for a 2:2 partition."""
    g = np.eye(8)
    pair = tmsv(r).gamma
    idx = np.array([0, 1, 4, 5])
    g[np.ix_(idx, idx)] = pair
    return CovarianceMatrix(g)


def werner_wolf_state():
    """The 2x2-mode PPT entangled Gaussian covariance matrix of Werner and Wolf."""
    g = np.diag([2.0, 1.0, 2.0, 1.0, 2.0, 4.0, 2.0, 4.0])
    for i, j, v in ((0, 4, 1.0), (1, 7, -1.0), (2, 6, -1.0), (3, 5, -1.0)):
        g[i, j] = g[j, i] = v
    return CovarianceMatrix(g)


def builtin(name):
    """Look up a named state: ``werner-wolf``, ``vacuum<n>``, ``tmsv:r=<x>``
    or ``tmsv-ancilla:r=<x>``."""
    if name == "werner-wolf":
        return werner_wolf_state()
    m = re.fullmatch(r"vacuum(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return vacuum(int(m.group(1)))
    m = re.fullmatch(r"(tmsv|tmsv-ancilla):r=([-+0-9.eE]+)", name)
    if m:
        try:
            r = float(m.group(2))
        except ValueError as exc:
            raise InputError(f"bad squeezing in {name!r}") from exc
        return tmsv(r) if m.group(1) == "tmsv" else tmsv_with_ancillas(r)
    raise InputError(f"unknown built-in state {name!r}")


def load_covariance(path):
    """Read a covariance JSON document from ``path``."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return CovarianceMatrix.from_dict(doc)


def is_physical(cov, tol=PHYSICALITY_TOL):
    """``gamma + i Omega`` positive semidefinite up to ``tol``."""
    ev = herm_eigvals(cov.gamma + 1j * symplectic_form(cov.n_modes))
    return bool(ev[0] >= -tol)


def second_moments(cov, i, j):
    """Symmetrised covariance of quadratures ``i`` and ``j``.

    Indices are 0-based rows of ``gamma`` or labels like ``"x1"``.
    """
    i = quadrature_index(i) if isinstance(i, str) else int(i)
    j = quadrature_index(j) if isinstance(j, str) else int(j)
    dim = cov.gamma.shape[0]
    if not (0 <= i < dim and 0 <= j < dim):
        raise InputError(f"quadrature index out of range for {cov.n_modes} modes")
    return 0.5 * cov.gamma[i, j]


def build_c_matrix(cov, part, w):
    """``C_ij = a_i b_j Cov(r_i^A, r_j^B)``, shape ``(2M, 2N)``."""
    part.check(cov)
    w.check(part)
    sa, sb = part.slices()
    return np.outer(w.a, w.b) * cov.covariance[sa, sb]


def _pair_bound(w):
    return float(np.sum(np.abs(w[0::2] * w[1::2])))


def local_brackets(cov, part, w):
    """Return ``(sum_i a_i^2 Var(r_i) - U_A, sum_j b_j^2 Var(r_j) - U_B)``."""
    sa, sb = part.slices()
    var = np.diag(cov.covariance)
    bracket_a = float(np.sum(w.a**2 * var[sa])) - _pair_bound(w.a)
    bracket_b = float(np.sum(w.b**2 * var[sb])) - _pair_bound(w.b)
    return bracket_a, bracket_b


def prop1a_check(cov, part, w, tol=DETECTION_TOL):
    """Trace-norm covariance test with weighted local quadratures.

    Separable states obey ``||C||^2 <= (Sum a_i^2 Var - U_A)(Sum b_j^2 Var - U_B)``
    with ``U_A = |a1 a2| + |a3 a4| + ...`` and ``U_B`` alike.  A negative
    bracket means the marginal breaks the uncertainty principle; the report is
    then marked ``"unphysical-marginal"`` and never counts as a detection.
    """
    c = build_c_matrix(cov, part, w)
    norm_c = float(trace_norm(c))
    bracket_a, bracket_b = local_brackets(cov, part, w)
    lhs = norm_c**2
    rhs = bracket_a * bracket_b
    status = "ok"
    if bracket_a < -PHYSICALITY_TOL or bracket_b < -PHYSICALITY_TOL:
        status = "unphysical-marginal"
    return CriterionReport.evaluate(
        "prop1a", lhs, rhs, lhs - rhs, tol=tol, status=status,
        parameters={"partition": str(part), "a": w.a, "b": w.b},
        details={
            "trace_norm_c": norm_c,
            "bracket_a": bracket_a,
            "bracket_b": bracket_b,
            "u_a": _pair_bound(w.a),
            "u_b": _pair_bound(w.b),
        },
    )


def _require_two_mode(cov, name):
    if cov.n_modes != 2:
        raise InapplicableError(f"{name} needs a two-mode state, got {cov.n_modes} modes")


def _marginal_sums(cov):
    v = np.diag(cov.covariance)
    return v[0] + v[1], v[2] + v[3]


def prop1b_check(cov, sign_choice="best", tol=DETECTION_TOL):
    """Two-mode test  ``(S1 - 1)(S2 - 1) >= [Cxx -/+ Cpp]^2 + [Cxp +/- Cpx]^2``.

    ``S_k = Var(x_k) + Var(p_k)``, ``Cxx = Cov(x1, x2)``, ``Cpp = Cov(p1, p2)``,
    ``Cxp = Cov(x1, p2)``, ``Cpx = Cov(p1, x2)``.  ``"minus"`` takes the upper
    signs, ``"plus"`` the lower; ``"best"`` reports whichever violates more.
    """
    _require_two_mode(cov, "prop1b")
    if sign_choice not in ("plus", "minus", "best"):
        raise InputError(f"sign_choice must be plus, minus or best, not {sign_choice!r}")
    v = cov.covariance
    cxx, cpp, cxp, cpx = v[0, 2], v[1, 3], v[0, 3], v[1, 2]
    s1, s2 = _marginal_sums(cov)
    rhs = (s1 - 1.0) * (s2 - 1.0)
    lhs_by_sign = {
        "minus": (cxx - cpp) ** 2 + (cxp + cpx) ** 2,
        "plus": (cxx + cpp) ** 2 + (cxp - cpx) ** 2,
    }
    if sign_choice == "best":
        chosen = max(("minus", "plus"), key=lambda k: lhs_by_sign[k])
    else:
        chosen = sign_choice
    lhs = lhs_by_sign[chosen]
    return CriterionReport.evaluate(
        "prop1b", lhs, rhs, lhs - rhs, tol=tol,
        parameters={"sign_choice": sign_choice},
        details={"sign_used": chosen, "lhs_minus": lhs_by_sign["minus"],
                 "lhs_plus": lhs_by_sign["plus"]},
    )


def _variance(cov, coeffs):
    w = np.asarray(coeffs, dtype=float)
    return float(w @ cov.covariance @ w)


def _duan_lhs(cov, a):
    u = [abs(a), 0.0, 1.0 / a, 0.0]
    v = [0.0, abs(a), 0.0, -1.0 / a]
    return _variance(cov, u) + _variance(cov, v)


def duan_check(cov, a=1.0, tol=DETECTION_TOL):
    """``Var(|a| x1 + x2/a) + Var(|a| p1 - p2/a) >= a^2 + 1/a^2``."""
    _require_two_mode(cov, "duan")
    a = float(a)
    if a == 0.0 or not math.isfinite(a):
        raise InputError("duan parameter a must be finite and nonzero")
    lhs = _duan_lhs(cov, a)
    rhs = a * a + 1.0 / (a * a)
    return CriterionReport.evaluate("duan", lhs, rhs, rhs - lhs, tol=tol,
                                    parameters={"a": a})


def mancini_check(cov, a1=1.0, a2=1.0, b1=1.0, b2=-1.0, tol=DETECTION_TOL):
    """``Var(a1 x1 + a2 x2) Var(b1 p1 + b2 p2) >= (|a1 b1| + |a2 b2|)^2 / 4``."""
    _require_two_mode(cov, "mancini")
    params = [float(x) for x in (a1, a2, b1, b2)]
    if not all(math.isfinite(x) for x in params):
        raise InputError("mancini parameters must be finite")
    a1, a2, b1, b2 = params
    if not any(params):
        raise InputError("mancini parameters are all zero")
    var_u = _variance(cov, [a1, 0.0, a2, 0.0])
    var_v = _variance(cov, [0.0, b1, 0.0, b2])
    lhs = var_u * var_v
    rhs = 0.25 * (abs(a1 * b1) + abs(a2 * b2)) ** 2
    return CriterionReport.evaluate(
        "mancini", lhs, rhs, rhs - lhs, tol=tol,
        parameters={"a1": a1, "a2": a2, "b1": b1, "b2": b2},
        details={"var_u": var_u, "var_v": var_v},
    )


def tlur_check(cov, a=1.0, tol=DETECTION_TOL):
    """Duan sum test with the bound raised by ``M^2``,
    ``M = |a| sqrt(S1 - 1) - sqrt(S2 - 1)/|a|``."""
    _require_two_mode(cov, "tlur")
    a = float(a)
    if a == 0.0 or not math.isfinite(a):
        raise InputError("tlur parameter a must be finite and nonzero")
    s1, s2 = _marginal_sums(cov)
    if s1 < 1.0 - PHYSICALITY_TOL or s2 < 1.0 - PHYSICALITY_TOL:
        raise InapplicableError(
            f"marginal uncertainty sums ({s1:.6g}, {s2:.6g}) below the vacuum limit")
    m = abs(a) * math.sqrt(max(s1 - 1.0, 0.0)) - math.sqrt(max(s2 - 1.0, 0.0)) / abs(a)
    lhs = _duan_lhs(cov, a)
    rhs = a * a + 1.0 / (a * a) + m * m
    return CriterionReport.evaluate("tlur", lhs, rhs, rhs - lhs, tol=tol,
                                    parameters={"a": a}, details={"m": m})


def symplectic_eigenvalues(cov):
    """Ascending symplectic spectrum ``nu_1 <= ... <= nu_n`` of ``gamma``.

    Uses the Hermitian form ``sqrt(gamma) (i Omega) sqrt(gamma)``, which shares
    its spectrum ``{+nu_k, -nu_k}`` with ``i Omega gamma``.
    """
    gamma = cov.gamma if isinstance(cov, CovarianceMatrix) else as_matrix(cov)
    n = gamma.shape[0] // 2
    w, u = np.linalg.eigh(gamma)
    if w[0] <= 0.0:
        raise NumericError("gamma is not positive definite; symplectic spectrum undefined")
    root = (u * np.sqrt(w)) @ u.T
    h = root @ (1j * symplectic_form(n)) @ root
    ev = herm_eigvals(h, tol=1e-9)
    return ev[n:]


def partial_transpose(cov, part):
    """Flip the sign of every B-side momentum: ``Lambda gamma Lambda``."""
    part.check(cov)
    flip = np.ones(2 * cov.n_modes)
    flip[2 * part.m_modes_A + 1::2] = -1.0
    return CovarianceMatrix(cov.gamma * np.outer(flip, flip), cov.mean * flip)


def gaussian_ppt_check(cov, part, tol=DETECTION_TOL):
    """NPT test: detected when the partially transposed spectrum dips below 1."""
    nu = symplectic_eigenvalues(partial_transpose(cov, part))
    nu_min = float(nu[0])
    return CriterionReport.evaluate(
        "ppt", nu_min, 1.0, 1.0 - nu_min, tol=tol,
        parameters={"partition": str(part)},
        details={"symplectic_spectrum_pt": nu},
    )
