"""Random-matrix sampling for the level-dot model.

A single level at energy ``eps0`` couples through a Gaussian random vector to
an N-level chaotic dot drawn from one of the three Wigner-Dyson classes
(``U``: broken time reversal, ``O``: time reversal with spin rotation,
``S``: time reversal without spin rotation), or to a Poisson bath of
independent uniform levels.  Normalizations are chosen so that every class
has semicircle radius ``2*lam``, band-center level density ``n/(pi*lam)``
(counting Kramers pairs once for class S), and golden-rule decay rate
``2*g*lam``:

* class U: ``<|H_kl|^2> = lam^2/n`` off-diagonal, real diagonal of the same
  variance; coupling ``<|W_k|^2> = g*lam^2/n``.
* class O: real symmetric, off-diagonal variance ``lam^2/n``, diagonal
  ``2*lam^2/n``; coupling real with second moment ``g*lam^2/n``.
* class S: quaternion self-dual, stored as a 2n x 2n complex matrix with the
  spin-up block first; each quaternion entry carries total second moment
  ``lam^2/n`` (so ``g*lam^2/n`` for the coupling quaternions), split evenly
  over the two complex components.

Sampling is a pure function of ``(master_seed, index)``: each realization
draws from its own counter-derived substream, so results do not depend on
how many workers run or in which order realizations are generated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import AssemblyError, ConfigError

__all__ = [
    "CLASSES",
    "BATHS",
    "EnsembleSpec",
    "Realization",
    "substream",
    "sample_dot",
    "sample_poisson_dot",
    "sample_coupling",
    "assemble",
    "sample_realization",
]

CLASSES = ("U", "O", "S")
BATHS = ("rmt", "poisson")


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of one level-dot ensemble."""

    cls: str                 # symmetry class: "U", "O" or "S"
    n: int                   # dot levels (Kramers pairs for class S)
    lam: float = 1.0         # spectral scale; semicircle radius is 2*lam
    g: float = 0.0           # dimensionless coupling strength
    eps0: float = 0.0        # level energy
    bath: str = "rmt"        # "rmt" or "poisson"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.cls not in CLASSES:
            raise ConfigError(f"unknown symmetry class {self.cls!r}; expected one of {CLASSES}")
        if self.bath not in BATHS:
            raise ConfigError(f"unknown bath variant {self.bath!r}; expected one of {BATHS}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 2):
            raise ConfigError(f"dot dimension must be an integer >= 2, got {self.n!r}")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ConfigError(f"spectral scale must be positive and finite, got {self.lam!r}")
        if not (np.isfinite(self.g) and self.g >= 0):
            raise ConfigError(f"coupling must be nonnegative and finite, got {self.g!r}")
        if not np.isfinite(self.eps0):
            raise ConfigError(f"level energy must be finite, got {self.eps0!r}")

    @property
    def gamma(self) -> float:
        """Dimensionless coupling g*n (dot levels hybridizing with the level)."""
        return self.g * self.n

    @property
    def dim(self) -> int:
        """Full Hilbert-space dimension including the level."""
        return 2 * self.n + 2 if self.cls == "S" else self.n + 1

    @property
    def heisenberg_time(self) -> float:
        """2*pi*nu with band-center density nu = n/(pi*lam)."""
        return 2.0 * self.n / self.lam

    def tau_to_time(self, tau):
        return np.asarray(tau, dtype=np.float64) * self.heisenberg_time

    @classmethod
    def with_gamma(cls, sym_class: str, n: int, gamma: float, lam: float = 1.0,
                   eps0: float = 0.0, bath: str = "rmt") -> "EnsembleSpec":
        """Build a spec from the dimensionless coupling gamma = g*n."""
        return cls(cls=sym_class, n=n, lam=lam, g=gamma / n, eps0=eps0, bath=bath)

    def to_dict(self) -> dict:
        return {"class": self.cls, "n": self.n, "lambda": self.lam,
                "g": self.g, "eps0": self.eps0, "bath": self.bath}

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        try:
            return cls(cls=d["class"], n=int(d["n"]), lam=float(d["lambda"]),
                       g=float(d["g"]), eps0=float(d.get("eps0", 0.0)),
                       bath=d.get("bath", "rmt"))
        except KeyError as exc:
            raise ConfigError(f"ensemble spec missing field {exc}") from exc


@dataclass
class Realization:
    """One sampled dot + coupling, tagged with its RNG substream."""

    spec: EnsembleSpec
    H: np.ndarray
    W: np.ndarray
    eps0: float
    seed_path: tuple[int, int]
    _matrix: Optional[np.ndarray] = field(default=None, repr=False)

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = assemble(self.spec, self.H, self.W, self.eps0)
        return self._matrix


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent, order-free RNG stream for one realization."""
    return np.random.default_rng(np.random.SeedSequence((int(master_seed), int(index))))


def sample_dot(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw the dot Hamiltonian for the requested symmetry class."""
    spec.validate()
    if spec.bath != "rmt":
        raise ConfigError("sample_dot requires bath='rmt'; use sample_poisson_dot")
    n, lam = spec.n, spec.lam
    if spec.cls == "U":
        scale = lam / np.sqrt(n)
        x = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * scale
        return (x + x.conj().T) / 2.0
    if spec.cls == "O":
        a = rng.standard_normal((n, n)) * (lam * np.sqrt(2.0 / n))
        return (a + a.T) / 2.0
    # class S: quaternion self-dual via symmetrized quaternion Ginibre
    scale = lam / np.sqrt(2.0 * n)
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * scale
    b = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * scale
    m = np.block([[a, b], [-b.conj(), a.conj()]])
    return (m + m.conj().T) / 2.0


def sample_poisson_dot(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """Diagonal bath of n i.i.d. levels uniform on [-2*lam, 2*lam], sorted."""
    spec.validate()
    if spec.bath != "poisson":
        raise ConfigError("sample_poisson_dot requires bath='poisson'")
    levels = np.sort(rng.uniform(-2.0 * spec.lam, 2.0 * spec.lam, size=spec.n))
    if spec.cls == "S":
        # Kramers doublets: every level appears in both spin blocks
        return np.diag(np.concatenate([levels, levels]))
    return np.diag(levels)


def sample_coupling(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw the level-dot coupling vector (2 x 2n block for class S)."""
    spec.validate()
    n, lam, g = spec.n, spec.lam, spec.g
    if spec.cls == "U":
        scale = np.sqrt(g * lam * lam / (2.0 * n))
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * scale
    if spec.cls == "O":
        return rng.standard_normal(n) * np.sqrt(g * lam * lam / n)
    scale = np.sqrt(g * lam * lam / (4.0 * n))
    wa = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * scale
    wb = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * scale
    return np.block([[wa, wb], [-wb.conj(), wa.conj()]])


def assemble(spec: EnsembleSpec, H: np.ndarray, W: np.ndarray, eps0: Optional[float] = None) -> np.ndarray:
    """Assemble the full Hamiltonian with the level state(s) in the first slot(s)."""
    eps0 = spec.eps0 if eps0 is None else eps0
    n = spec.n
    if spec.cls == "S":
        if H.shape != (2 * n, 2 * n) or W.shape != (2, 2 * n):
            raise AssemblyError(
                f"class S expects H (2n,2n) and W (2,2n) with n={n}; got {H.shape}, {W.shape}")
        dim = 2 * n + 2
        out = np.zeros((dim, dim), dtype=np.complex128)
        out[0, 0] = out[1, 1] = eps0
        out[:2, 2:] = W
        out[2:, :2] = W.conj().T
        out[2:, 2:] = H
        return out
    if H.shape != (n, n) or W.shape != (n,):
        raise AssemblyError(
            f"class {spec.cls} expects H (n,n) and W (n,) with n={n}; got {H.shape}, {W.shape}")
    dtype = np.promote_types(H.dtype, W.dtype)
    out = np.zeros((n + 1, n + 1), dtype=dtype)
    out[0, 0] = eps0
    out[0, 1:] = W
    out[1:, 0] = W.conj()
    out[1:, 1:] = H
    return out


def sample_realization(spec: EnsembleSpec, master_seed: int, index: int) -> Realization:
    """Sample dot then coupling from the (master_seed, index) substream."""
    rng = substream(master_seed, index)
    if spec.bath == "poisson":
        H = sample_poisson_dot(spec, rng)
    else:
        H = sample_dot(spec, rng)
    W = sample_coupling(spec, rng)
    return Realization(spec=spec, H=H, W=W, eps0=spec.eps0,
                       seed_path=(int(master_seed), int(index)))
