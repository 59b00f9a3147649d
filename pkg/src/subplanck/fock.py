"""Truncated Fock-basis states and displacement-operator machinery.

Conventions (used throughout the package):

* annihilation operator a = (x + i p) / sqrt(2), [x, p] = i, so the
  vacuum has Delta x = Delta p = 1/sqrt(2);
* complex amplitudes decompose as alpha = (alpha1 + i alpha2)/sqrt(2),
  with alpha1, alpha2 the dimensionless position/momentum variables, so
  |alpha|^2 = (alpha1^2 + alpha2^2)/2;
* the phase-space measure is d2alpha = d alpha1 d alpha2 / 2.

Displacement matrix elements <m|D(mu)|n> are evaluated through scaled
generalized-Laguerre recurrences whose iterates are the matrix elements
themselves (magnitude <= 1), so they neither overflow nor underflow for
any truncation or displacement used here; factorial ratios enter only
through log-gammas.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import TruncationError, TruncationWarning

DEFAULT_DIM = 64
TAIL_TOL = 1e-10
EDGE_MASS_TOL = 1e-8


def make_rng(seed):
    """Seedable counter-based generator (Philox) used for all sampling."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class ComplexAmplitude:
    """Phase-space point with quadrature components (q1, q2).

    The complex value is (q1 + i q2)/sqrt(2).
    """

    q1: float
    q2: float = 0.0

    @property
    def value(self) -> complex:
        return (self.q1 + 1j * self.q2) / np.sqrt(2.0)

    @property
    def abs2(self) -> float:
        return (self.q1 * self.q1 + self.q2 * self.q2) / 2.0

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        return cls(np.sqrt(2.0) * z.real, np.sqrt(2.0) * z.imag)

    def __complex__(self):
        return self.value


def _as_complex(point) -> complex:
    if isinstance(point, ComplexAmplitude):
        return point.value
    return complex(point)


def _canonical_phase(c):
    k = int(np.argmax(np.abs(c)))
    pivot = c[k]
    if abs(pivot) > 0:
        c = c * (abs(pivot) / pivot)
        c[k] = abs(c[k])  # exactly real
    return c


class PureState:
    """Normalized coefficient vector over the lowest `dim` number states.

    The global phase is fixed by making the largest-magnitude coefficient
    real and positive, so constructions are reproducible bit for bit.
    """

    def __init__(self, coeffs, normalize=True, fix_phase=True):
        c = np.asarray(coeffs, dtype=complex).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must form a nonempty 1-D vector")
        if normalize:
            nrm = np.linalg.norm(c)
            if nrm == 0:
                raise ValueError("zero vector is not a state")
            c /= nrm
        if fix_phase:
            c = _canonical_phase(c)
        nrm2 = float(np.sum(np.abs(c) ** 2))
        if abs(nrm2 - 1.0) > 1e-12:
            raise ValueError(f"state norm^2 deviates from 1 by {nrm2 - 1.0:.3e}")
        c.setflags(write=False)
        self.coeffs = c

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def density(self) -> "DensityOp":
        return DensityOp(np.outer(self.coeffs, self.coeffs.conj()), validate=False)

    def padded(self, dim) -> "PureState":
        if dim < self.dim:
            raise ValueError("cannot shrink a state")
        c = np.zeros(dim, dtype=complex)
        c[: self.dim] = self.coeffs
        return PureState(c, normalize=False, fix_phase=False)

    def overlap(self, other) -> complex:
        n = min(self.dim, other.dim)
        extra_self = np.sum(np.abs(self.coeffs[n:]) ** 2)
        extra_other = np.sum(np.abs(other.coeffs[n:]) ** 2)
        if max(extra_self, extra_other) > 1e-12:
            pass  # tails beyond the common dim simply do not overlap
        return complex(np.vdot(self.coeffs[:n], other.coeffs[:n]))


class DensityOp:
    """Hermitian, unit-trace, positive matrix on the truncated space."""

    def __init__(self, matrix, validate=True):
        m = np.asarray(matrix, dtype=complex).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if validate:
            herm = np.max(np.abs(m - m.conj().T))
            if herm > 1e-12:
                raise ValueError(f"matrix not Hermitian (deviation {herm:.3e})")
            m = (m + m.conj().T) / 2
            tr = float(np.real(np.trace(m)))
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"trace deviates from 1 by {tr - 1.0:.3e}")
            lo = float(np.min(np.linalg.eigvalsh(m)))
            if lo < -1e-10:
                raise ValueError(f"negative eigenvalue {lo:.3e}")
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def padded(self, dim) -> "DensityOp":
        if dim < self.dim:
            raise ValueError("cannot shrink an operator")
        m = np.zeros((dim, dim), dtype=complex)
        m[: self.dim, : self.dim] = self.matrix
        return DensityOp(m, validate=False)


@dataclass(frozen=True)
class ThermalParams:
    """Mean occupation nbar and inverse temperature lam, nbar=(e^lam-1)^-1."""

    nbar: float
    lam: float

    def __post_init__(self):
        if self.nbar < 0:
            raise ValueError("nbar must be >= 0")
        if np.isfinite(self.lam):
            implied = 1.0 / np.expm1(self.lam)
            if abs(implied - self.nbar) > 1e-12 * max(1.0, self.nbar):
                raise ValueError("nbar and lam are inconsistent")
        elif self.nbar != 0:
            raise ValueError("lam = inf requires nbar = 0")

    @classmethod
    def from_nbar(cls, nbar):
        nbar = float(nbar)
        lam = np.inf if nbar == 0 else np.log1p(1.0 / nbar)
        return cls(nbar, lam)

    @classmethod
    def from_lambda(cls, lam):
        lam = float(lam)
        if lam <= 0:
            raise ValueError("lam must be > 0")
        return cls(1.0 / np.expm1(lam), lam)


# ---------------------------------------------------------------------------
# displacement matrix elements
# ---------------------------------------------------------------------------

def _m_start(d, x):
    """M_0 = sqrt(1/d!) |mu|^d e^{-x/2} with x = |mu|^2, in log domain."""
    x = np.asarray(x, dtype=float)
    if d == 0:
        return np.exp(-x / 2)
    with np.errstate(divide="ignore"):
        logx = np.where(x > 0, np.log(x), -np.inf)
    return np.exp(0.5 * d * logx - 0.5 * gammaln(d + 1) - x / 2)


def _m_seq(d, x):
    """Yield M_n = sqrt(n!/(n+d)!) |mu|^d e^{-x/2} L_n^{(d)}(x), n = 0, 1, ...

    These are the magnitudes of <n|D(mu)|n+d>, bounded by 1.
    """
    m_prev = 0.0
    m = _m_start(d, x)
    n = 0
    while True:
        yield m
        m, m_prev = (
            ((2 * n + 1 + d - x) * m - np.sqrt(n * (n + d)) * m_prev)
            / np.sqrt((n + 1) * (n + 1 + d)),
            m,
        )
        n += 1


def displacement_element(m, n, mu) -> complex:
    """Matrix element <m|D(mu)|n> of the displacement operator."""
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be nonnegative")
    muc = _as_complex(mu)
    x = abs(muc) ** 2
    d = abs(m - n)
    k = min(m, n)
    seq = _m_seq(d, x)
    for _ in range(k):
        next(seq)
    mag = next(seq)
    if not np.isfinite(mag):
        raise OverflowError("displacement element lost finiteness")
    if x == 0:
        return 1.0 + 0j if m == n else 0.0 + 0j
    phase = (muc / abs(muc)) ** d
    if m >= n:
        return complex(mag * phase)
    return complex(mag * np.conj(phase) * (-1) ** d)


def displacement_matrix(dim, mu, rows=None) -> np.ndarray:
    """Dense matrix <m|D(mu)|n> for m < rows (default dim), n < dim."""
    if rows is None:
        rows = dim
    muc = _as_complex(mu)
    x = abs(muc) ** 2
    out = np.zeros((rows, dim), dtype=complex)
    if x == 0:
        np.fill_diagonal(out, 1.0)
        return out
    phase1 = muc / abs(muc)
    for d in range(max(rows, dim)):
        phase = phase1**d
        if d == 0:
            seq = _m_seq(0, x)
            for n in range(min(rows, dim)):
                out[n, n] = next(seq)
            continue
        # rows index n, columns n+d: <n|D|n+d> = (-1)^d e^{-id phi} M_n
        seq = _m_seq(d, x)
        for n in range(min(rows, dim - d)):
            out[n, n + d] = next(seq) * np.conj(phase) * (-1) ** d
        # rows index n+d, columns n: <n+d|D|n> = e^{+id phi} M_n
        seq = _m_seq(d, x)
        for n in range(min(rows - d, dim)):
            out[n + d, n] = next(seq) * phase
    return out


def displacement_matrices(dim, mus) -> np.ndarray:
    """Stack of displacement matrices, shape (len(mus), dim, dim)."""
    mus = np.asarray(mus, dtype=complex).ravel()
    x = np.abs(mus) ** 2
    with np.errstate(invalid="ignore"):
        unit = np.where(x > 0, mus / np.where(x > 0, np.abs(mus), 1.0), 1.0)
    out = np.zeros((mus.size, dim, dim), dtype=complex)
    for d in range(dim):
        phase = unit**d
        seq = _m_seq(d, x)
        for n in range(dim - d):
            val = next(seq)
            if d == 0:
                out[:, n, n] = val
            else:
                out[:, n, n + d] = val * np.conj(phase) * (-1) ** d
                out[:, n + d, n] = val * phase
    return out


def displace_state(state: PureState, mu, out_dim=None) -> np.ndarray:
    """Coefficients of D(mu)|state> in a possibly enlarged truncation.

    The result is not renormalized; its norm deficit measures leakage.
    """
    muc = _as_complex(mu)
    if out_dim is None:
        root = np.sqrt(state.dim - 1) + abs(muc)
        out_dim = int(np.ceil(root * root + 8 * root + 16))
    mat = displacement_matrix(state.dim, muc, rows=out_dim)
    return mat @ state.coeffs


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------

def _check_tail(probs_beyond, what, override=False):
    if probs_beyond > TAIL_TOL and not override:
        raise TruncationError(
            f"{what}: truncated tail mass {probs_beyond:.3e} exceeds {TAIL_TOL:.0e}; "
            "increase the dimension or pass allow_truncation=True",
            tail=probs_beyond,
        )


def make_coherent(nu, dim=DEFAULT_DIM, allow_truncation=False) -> PureState:
    """Coherent state |nu>: c_n = e^{-|nu|^2/2} nu^n / sqrt(n!)."""
    nuc = _as_complex(nu)
    x = abs(nuc) ** 2
    n = np.arange(dim)
    if x == 0:
        c = np.zeros(dim, dtype=complex)
        c[0] = 1.0
        return PureState(c, normalize=False)
    logmag = 0.5 * n * np.log(x) - 0.5 * gammaln(n + 1) - x / 2
    phase = (nuc / abs(nuc)) ** n
    c = np.exp(logmag) * phase
    tail = max(0.0, 1.0 - float(np.sum(np.abs(c) ** 2)))
    _check_tail(tail, "make_coherent", allow_truncation)
    return PureState(c)


def make_number(n, dim=DEFAULT_DIM) -> PureState:
    """Number state |n>."""
    if n >= dim:
        raise IndexError(f"number-state index {n} >= dim {dim}")
    c = np.zeros(dim, dtype=complex)
    c[n] = 1.0
    return PureState(c, normalize=False)


def make_squeezed(u, dim=DEFAULT_DIM, allow_truncation=False) -> PureState:
    """Squeezed vacuum exp(u (b^2 - b+^2)/2)|0>; x-quadrature squeezed for u>0.

    Only even coefficients are populated:
    c_{2k} = (cosh u)^{-1/2} (-tanh u)^k sqrt((2k)!) / (2^k k!).
    """
    u = float(u)
    c = np.zeros(dim, dtype=complex)
    k = np.arange((dim + 1) // 2)
    th = np.tanh(u)
    if th == 0:
        c[0] = 1.0
        return PureState(c, normalize=False)
    logmag = (
        k * np.log(abs(th))
        + 0.5 * gammaln(2 * k + 1)
        - k * np.log(2.0)
        - gammaln(k + 1)
        - 0.5 * np.log(np.cosh(u))
    )
    vals = np.exp(logmag) * np.where(th > 0, (-1.0) ** k, 1.0)
    c[2 * k] = vals
    tail = max(0.0, 1.0 - float(np.sum(np.abs(c) ** 2)))
    _check_tail(tail, "make_squeezed", allow_truncation)
    return PureState(c)


def make_compass(a, dim=DEFAULT_DIM, allow_truncation=False) -> PureState:
    """Four-lobe superposition of |a>, |-a>, |ia>, |-ia| (a real >= 0).

    Coefficients live on n = 0 mod 4:
    c_n = 2 a^n / (sqrt(n!) sqrt(2 (cosh a^2 + cos a^2))).
    """
    a = float(a)
    if a < 0:
        raise ValueError("a must be >= 0")
    c = np.zeros(dim, dtype=complex)
    if a == 0:
        c[0] = 1.0
        return PureState(c, normalize=False)
    big_a = a * a
    n = np.arange(0, dim, 4)
    # log of sqrt(2 (cosh A + cos A)) without overflowing cosh
    lognorm = 0.5 * (big_a + np.log1p(np.exp(-2 * big_a) + 2 * np.exp(-big_a) * np.cos(big_a)))
    logmag = np.log(2.0) + n * np.log(a) - 0.5 * gammaln(n + 1) - lognorm
    c[n] = np.exp(logmag)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(c) ** 2)))
    _check_tail(tail, "make_compass", allow_truncation)
    return PureState(c)


def make_random(dim, seed=None, rng=None) -> PureState:
    """Haar-uniform random unit vector in `dim` dimensions.

    Components are iid standard complex Gaussians, normalized.  Pass
    either a seed (Philox stream) or an explicit generator.
    """
    if rng is None:
        rng = make_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(z)


def make_thermal(params, dim=DEFAULT_DIM, allow_truncation=False) -> DensityOp:
    """Thermal state, diagonal (1 - e^-lam) e^{-lam n}, renormalized."""
    if not isinstance(params, ThermalParams):
        params = ThermalParams.from_nbar(params)
    if params.nbar == 0:
        m = np.zeros((dim, dim), dtype=complex)
        m[0, 0] = 1.0
        return DensityOp(m, validate=False)
    q = np.exp(-params.lam)
    p = (1 - q) * q ** np.arange(dim)
    tail = max(0.0, 1.0 - float(np.sum(p)))
    _check_tail(tail, "make_thermal", allow_truncation)
    p /= np.sum(p)
    return DensityOp(np.diag(p.astype(complex)), validate=False)


# ---------------------------------------------------------------------------
# quadrature moments
# ---------------------------------------------------------------------------

def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def quad_moments(state):
    """(mean x, mean p, var x, var p) from tridiagonal x and p matrices.

    The matrices are built on a space two levels taller than the state,
    so the squares x^2, p^2 keep their couplings through the top level
    and the moments are exact for the stored coefficients.  A warning
    still fires when the top level carries mass > 1e-8: such a state is
    a poor stand-in for whatever it truncates.
    """
    if isinstance(state, PureState):
        dim = state.dim
        edge = abs(state.coeffs[-1]) ** 2
        vec = np.concatenate([state.coeffs, np.zeros(2, dtype=complex)])
        expect = lambda op: float(np.real(np.vdot(vec, op @ vec)))
    else:
        dim = state.dim
        edge = float(np.real(state.matrix[-1, -1]))
        mat = state.padded(dim + 2).matrix
        expect = lambda op: float(np.real(np.trace(mat @ op)))
    if edge > EDGE_MASS_TOL:
        warnings.warn(
            f"top Fock level holds mass {edge:.2e}; moments may be unreliable",
            TruncationWarning,
        )
    a = _ladder(dim + 2)
    x = (a + a.T) / np.sqrt(2.0)
    p = (a - a.T) / (1j * np.sqrt(2.0))
    p = (p + p.conj().T) / 2
    mx, mp = expect(x), expect(p)
    vx = expect(x @ x) - mx * mx
    vp = expect(p @ p) - mp * mp
    return mx, mp, vx, vp
