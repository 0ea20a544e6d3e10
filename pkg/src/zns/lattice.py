"""Periodic domain, wavevector lattice, truncated spectral fields and transforms.

Conventions (fixed throughout the package):

* A scalar field is expanded as ``w(x, y) = sum_k c_k exp(i(k1 x + k2 y))``
  with ``k = (2 pi m1 / L1, 2 pi m2 / L2)`` on the integer lattice, so the
  stored coefficients are the continuum Fourier coefficients and analytic
  per-mode formulas apply verbatim.
* Coefficients live in an ``(N2, N1)`` complex array, axis 0 indexing ``m2``
  and axis 1 indexing ``m1``, both in FFT order ``0, 1, ..., N/2-1, -N/2,
  ..., -1``.  Flattening that array in C order is the canonical mode order
  (k2-major, then k1) used by snapshots.
* The collocation grid is ``x_j = j L1/N1`` and ``y_j = -L2/2 + j L2/N2``,
  so grid row 0 sits on the line ``y = -L2/2``.
* Parseval: the grid mean square of ``w`` equals ``sum_k |c_k|^2`` and the
  L2 norm satisfies ``|w|^2 = L1 L2 sum_k |c_k|^2``.
* The Nyquist row/column (``m = -N/2``) cannot be paired Hermitianly and is
  always kept at zero, as is the mean mode ``k = 0``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SNAPSHOT_MAGIC = b"ZNS1"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class Domain:
    """Rectangular periodic domain [0, L1) x [-L2/2, L2/2) with an N1 x N2 grid."""

    L1: float = 2.0 * np.pi
    L2: float = 2.0 * np.pi
    N1: int = 64
    N2: int = 64

    def __post_init__(self):
        if not (self.L1 > 0 and self.L2 > 0):
            raise ValueError("domain lengths must be positive")
        for n in (self.N1, self.N2):
            if n < 4 or n % 2 != 0:
                raise ValueError("mode counts must be even and >= 4")

    @property
    def area(self) -> float:
        return self.L1 * self.L2

    @property
    def c0(self) -> float:
        """Smallest nonzero wavenumber magnitude (Poincare constant)."""
        return min(2.0 * np.pi / self.L1, 2.0 * np.pi / self.L2)

    @cached_property
    def m1(self) -> np.ndarray:
        """Integer mode indices along x, FFT order, shape (N1,)."""
        return np.fft.fftfreq(self.N1, 1.0 / self.N1).astype(np.int64)

    @cached_property
    def m2(self) -> np.ndarray:
        """Integer mode indices along y, FFT order, shape (N2,)."""
        return np.fft.fftfreq(self.N2, 1.0 / self.N2).astype(np.int64)

    @cached_property
    def kx(self) -> np.ndarray:
        """Physical x-wavenumber, broadcast to (N2, N1)."""
        k1 = 2.0 * np.pi * self.m1 / self.L1
        return np.broadcast_to(k1[None, :], (self.N2, self.N1))

    @cached_property
    def ky(self) -> np.ndarray:
        """Physical y-wavenumber, broadcast to (N2, N1)."""
        k2 = 2.0 * np.pi * self.m2 / self.L2
        return np.broadcast_to(k2[:, None], (self.N2, self.N1))

    @cached_property
    def ksq(self) -> np.ndarray:
        return self.kx**2 + self.ky**2

    @cached_property
    def inv_ksq(self) -> np.ndarray:
        """1/|k|^2 with the k = 0 entry set to zero."""
        out = np.zeros_like(self.ksq)
        np.divide(1.0, self.ksq, out=out, where=self.ksq > 0)
        return out

    @cached_property
    def omega(self) -> np.ndarray:
        """Rossby frequency array Omega_k = -k1/|k|^2 (zero on zonal modes)."""
        return -self.kx * self.inv_ksq

    @cached_property
    def nyquist(self) -> np.ndarray:
        """Modes that are structurally zero because they lack a Hermitian partner."""
        return (self.m2[:, None] == -self.N2 // 2) | (self.m1[None, :] == -self.N1 // 2)

    @cached_property
    def active(self) -> np.ndarray:
        """Modes that may carry nonzero amplitude: not Nyquist, not k = 0."""
        out = ~self.nyquist.copy()
        out[0, 0] = False
        return out

    @cached_property
    def dealias(self) -> np.ndarray:
        """2/3-rule mask: True iff |m_i| < N_i/3 in both directions."""
        keep1 = np.abs(self.m1) < self.N1 / 3.0
        keep2 = np.abs(self.m2) < self.N2 / 3.0
        return keep2[:, None] & keep1[None, :]

    @cached_property
    def _yphase(self) -> np.ndarray:
        # exp(i k2 * (-L2/2)) = (-1)^m2; accounts for the grid offset in y.
        return np.where(self.m2 % 2 == 0, 1.0, -1.0)[:, None]

    @cached_property
    def _flip_m2(self) -> np.ndarray:
        # Row index of -m2 for each m2 row (Nyquist row maps to itself).
        return (-np.arange(self.N2)) % self.N2

    @cached_property
    def _flip_m1(self) -> np.ndarray:
        return (-np.arange(self.N1)) % self.N1

    def grid_x(self) -> np.ndarray:
        return self.L1 * np.arange(self.N1) / self.N1

    def grid_y(self) -> np.ndarray:
        return -self.L2 / 2.0 + self.L2 * np.arange(self.N2) / self.N2

    def wavevector(self, m1: int, m2: int) -> "WaveVector":
        return WaveVector(2.0 * np.pi * m1 / self.L1, 2.0 * np.pi * m2 / self.L2)

    def indices(self, k: "WaveVector") -> tuple[int, int]:
        """Integer lattice indices of a wavevector; rejects off-lattice input."""
        a1 = k.k1 * self.L1 / (2.0 * np.pi)
        a2 = k.k2 * self.L2 / (2.0 * np.pi)
        m1, m2 = round(a1), round(a2)
        if abs(a1 - m1) > 1e-9 or abs(a2 - m2) > 1e-9:
            raise ValueError(f"wavevector {k} not on the lattice of {self}")
        return m1, m2


@dataclass(frozen=True)
class WaveVector:
    """A point of the wavenumber lattice (physical wavenumbers, not indices)."""

    k1: float
    k2: float

    def __iter__(self):
        yield self.k1
        yield self.k2

    @property
    def norm_sq(self) -> float:
        return self.k1 * self.k1 + self.k2 * self.k2

    @property
    def is_zero(self) -> bool:
        return self.k1 == 0.0 and self.k2 == 0.0


def enumerate_modes(domain: Domain) -> list[WaveVector]:
    """All stored lattice modes in canonical order (k2-major, then k1).

    The listing covers every retained mode exactly once, including ``k = 0``
    and the Nyquist rows whose coefficients are structurally zero; it matches
    the flattening order of the coefficient array and the snapshot layout.
    ``domain.active`` flags the modes that may actually carry amplitude.
    """
    k1 = 2.0 * np.pi * domain.m1 / domain.L1
    k2 = 2.0 * np.pi * domain.m2 / domain.L2
    return [WaveVector(a, b) for b in k2 for a in k1]


@dataclass
class SpectralField:
    """Truncated Fourier representation of a real zero-mean scalar."""

    domain: Domain
    coeffs: np.ndarray

    def __post_init__(self):
        expected = (self.domain.N2, self.domain.N1)
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficient shape {self.coeffs.shape} != {expected}")

    @classmethod
    def zeros(cls, domain: Domain) -> "SpectralField":
        return cls(domain, np.zeros((domain.N2, domain.N1), dtype=np.complex128))

    @classmethod
    def from_modes(cls, domain: Domain, modes: dict[tuple[int, int], complex]) -> "SpectralField":
        """Build a field from ``{(m1, m2): coefficient}``; entries are raw coefficients."""
        f = cls.zeros(domain)
        for (m1, m2), c in modes.items():
            if abs(m1) > domain.N1 // 2 or abs(m2) > domain.N2 // 2:
                raise ValueError(f"mode ({m1},{m2}) outside truncation")
            f.coeffs[m2 % domain.N2, m1 % domain.N1] = c
        sanitize(f)
        return f

    def copy(self) -> "SpectralField":
        return SpectralField(self.domain, self.coeffs.copy())

    def get_mode(self, m1: int, m2: int) -> complex:
        return complex(self.coeffs[m2 % self.domain.N2, m1 % self.domain.N1])

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_domain(self, other)
        return SpectralField(self.domain, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_domain(self, other)
        return SpectralField(self.domain, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.domain, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.domain, -self.coeffs)


@dataclass
class GridField:
    """Real samples on the collocation grid, values[j2, j1] = w(x_{j1}, y_{j2})."""

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        expected = (self.domain.N2, self.domain.N1)
        if self.values.shape != expected:
            raise ValueError(f"grid shape {self.values.shape} != {expected}")


def _check_same_domain(a, b):
    if a.domain != b.domain:
        raise ValueError("fields live on different domains")


def sanitize(f: SpectralField) -> SpectralField:
    """Zero the mean mode and the Nyquist rows in place."""
    f.coeffs[f.domain.nyquist] = 0.0
    f.coeffs[0, 0] = 0.0
    return f


def to_grid(f: SpectralField) -> GridField:
    """Evaluate a spectral field on the collocation grid (real part kept)."""
    d = f.domain
    values = (d.N1 * d.N2) * np.fft.ifft2(f.coeffs * d._yphase)
    return GridField(d, values.real.copy())


def to_spectral(g: GridField) -> SpectralField:
    """Inverse of to_grid; projects out the mean and the Nyquist rows."""
    d = g.domain
    coeffs = np.fft.fft2(g.values) * (d._yphase / (d.N1 * d.N2))
    return sanitize(SpectralField(d, coeffs))


def project_parity(f: SpectralField) -> SpectralField:
    """L2-orthogonal projection onto the odd-in-y subspace.

    Output satisfies coeff(k1, -k2) = -coeff(k1, k2) exactly; in particular
    every m2 = 0 coefficient (and with it the mean) is annihilated.
    """
    d = f.domain
    out = 0.5 * (f.coeffs - f.coeffs[d._flip_m2, :])
    return sanitize(SpectralField(d, out))


def project_reality(f: SpectralField) -> SpectralField:
    """Projection onto fields with real grid values: c(-k) = conj(c(k))."""
    d = f.domain
    mirrored = np.conj(f.coeffs[np.ix_(d._flip_m2, d._flip_m1)])
    return sanitize(SpectralField(d, 0.5 * (f.coeffs + mirrored)))


def parity_error(f: SpectralField) -> float:
    """Max-norm violation of the odd-in-y symmetry."""
    return float(np.max(np.abs(f.coeffs + f.coeffs[f.domain._flip_m2, :])))


def reality_error(f: SpectralField) -> float:
    """Max-norm violation of the Hermitian symmetry."""
    d = f.domain
    mirrored = np.conj(f.coeffs[np.ix_(d._flip_m2, d._flip_m1)])
    return float(np.max(np.abs(f.coeffs - mirrored)))


def dealias_mask(domain: Domain) -> np.ndarray:
    """Per-mode boolean 2/3-rule mask (True = retained after products)."""
    return domain.dealias.copy()


def apply_dealias(f: SpectralField) -> SpectralField:
    return SpectralField(f.domain, f.coeffs * f.domain.dealias)


def norm(f: SpectralField) -> float:
    """L2 norm, |f| = sqrt(L1 L2 sum |c_k|^2)."""
    return float(np.sqrt(f.domain.area * np.sum(np.abs(f.coeffs) ** 2)))


def inner(f: SpectralField, g: SpectralField) -> float:
    """L2 inner product of real fields, (f, g) = L1 L2 Re sum f_k conj(g_k)."""
    _check_same_domain(f, g)
    return float(f.domain.area * np.real(np.sum(f.coeffs * np.conj(g.coeffs))))


def random_field(
    domain: Domain,
    rng: np.random.Generator,
    kmax: float | None = None,
    slope: float = 0.0,
    norm_target: float | None = None,
    odd_in_y: bool = True,
) -> SpectralField:
    """Random real (optionally odd-in-y) field with amplitude ~ |k|^slope.

    ``kmax`` truncates the support at integer-index radius sqrt(m1^2 + m2^2);
    by default the support fills the dealiased band.
    """
    d = domain
    mag = np.sqrt(d.ksq)
    raw = rng.standard_normal((d.N2, d.N1)) + 1j * rng.standard_normal((d.N2, d.N1))
    amp = np.zeros_like(mag)
    nz = d.ksq > 0
    amp[nz] = np.power(mag[nz] / d.c0, slope)
    idx_rad = np.hypot(d.m1[None, :], d.m2[:, None])
    support = d.dealias & (d.ksq > 0)
    if kmax is not None:
        support &= idx_rad <= kmax
    f = SpectralField(d, raw * amp * support)
    f = project_reality(f)
    if odd_in_y:
        f = project_parity(f)
    if norm_target is not None:
        n = norm(f)
        if n == 0:
            raise ValueError("cannot normalize a zero field")
        f = f * (norm_target / n)
    return sanitize(f)


_HEADER = struct.Struct("<4sIIIddddd")


def write_snapshot(path, f: SpectralField, epsilon: float, mu: float, t: float) -> None:
    """Write the little-endian ZNS1 snapshot (header + coefficients in canonical order)."""
    d = f.domain
    header = _HEADER.pack(
        SNAPSHOT_MAGIC, SNAPSHOT_VERSION, d.N1, d.N2, d.L1, d.L2, epsilon, mu, t
    )
    body = np.ascontiguousarray(f.coeffs, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def read_snapshot(path) -> tuple[SpectralField, float, float, float]:
    """Read a ZNS1 snapshot; returns (field, epsilon, mu, t)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot")
    magic, version, n1, n2, l1, l2, eps, mu, t = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    domain = Domain(l1, l2, n1, n2)
    expected = _HEADER.size + 16 * n1 * n2
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, got {len(raw)}")
    coeffs = np.frombuffer(raw[_HEADER.size:], dtype="<c16").reshape(n2, n1)
    return SpectralField(domain, coeffs.astype(np.complex128)), eps, mu, t
