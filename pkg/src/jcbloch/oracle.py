"""Brute-force verification path: dense evolution in a truncated Fock space.

Builds the interaction Hamiltonian as an explicit matrix over the product
basis of atom and photon number states, exponentiates it numerically through
an eigendecomposition, evolves the joint thermal state and traces out the
photons.  Deliberately independent of the closed-form series in
:mod:`jcbloch.model`; a shared bug in the two routes would otherwise hide.
This is a correctness instrument, not a production path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationTooSmall
from .model import BlochVector, ModelParams

__all__ = [
    "FockTruncation",
    "truncation_for",
    "build_c2",
    "thermal_photon_weights",
    "evolve_and_trace",
]


@dataclass(frozen=True)
class FockTruncation:
    """Highest photon number retained in the numerical basis."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max!r}")


def _tail_weight(params: ModelParams, above: int) -> float:
    """Thermal weight of all photon numbers strictly above ``above``."""
    if params.zero_temperature:
        return 0.0
    b = params.boltzmann_factor
    return b ** (above + 1) / (1.0 - b)


def truncation_for(params: ModelParams, weight_tol: float = 1e-12) -> FockTruncation:
    """Smallest cutoff whose dropped-coupling error stays below weight_tol.

    Ladder partners of the top l photon levels fall outside the basis, so
    those levels sit frozen; the cutoff is therefore the tail rule's index
    plus l, keeping the frozen band's population below tolerance as well.
    """
    if params.zero_temperature:
        return FockTruncation(params.l + 2)
    b = params.boltzmann_factor
    # smallest n with b**(n+1)/(1-b) < weight_tol
    n_rule = math.ceil((math.log(1.0 / weight_tol) - math.log(1.0 - b)) / (params.beta * params.omega))
    n_rule = max(n_rule, 0)
    return FockTruncation(max(params.l + 2, n_rule + params.l))


def _index(atom: int, n: int, m: int, photon_major: bool) -> int:
    return n * 2 + atom if photon_major else atom * m + n


def build_c2(params: ModelParams, trunc: FockTruncation, photon_major: bool = False) -> np.ndarray:
    """Interaction matrix g*(sigma_+ a**l + sigma_- a_dag**l) at zero detuning.

    Couples |1, n> to |0, n-l> with amplitude g*sqrt(n(n-1)...(n-l+1)); pairs
    whose partner exceeds the cutoff are left uncoupled, which is the source
    of the frozen-band error budgeted in :func:`truncation_for`.
    """
    m = trunc.n_max + 1
    h = np.zeros((2 * m, 2 * m))
    for n in range(params.l, m):
        amp = params.g * math.sqrt(math.prod(range(n - params.l + 1, n + 1)))
        i = _index(0, n - params.l, m, photon_major)
        j = _index(1, n, m, photon_major)
        h[i, j] = amp
        h[j, i] = amp
    return h


def thermal_photon_weights(params: ModelParams, trunc: FockTruncation) -> np.ndarray:
    """Bose-Einstein occupation probabilities renormalized over the kept basis."""
    if params.zero_temperature:
        w = np.zeros(trunc.n_max + 1)
        w[0] = 1.0
        return w
    w = np.exp(-params.beta * params.omega * np.arange(trunc.n_max + 1))
    return w / w.sum()


def evolve_and_trace(
    params: ModelParams,
    trunc: FockTruncation,
    t: float,
    weight_tol: float = 1e-12,
    photon_major: bool = False,
    atom_bloch: tuple[float, float, float] = (1.0, 0.0, 0.0),
) -> BlochVector:
    """Bloch vector of the atom at time t from dense unitary evolution.

    The initial state is the atom state described by ``atom_bloch`` tensored
    with the truncated thermal photon state.  Raises TruncationTooSmall when
    the cutoff leaves more than weight_tol of population in the frozen band
    (the top l levels) or above the basis.
    """
    if _tail_weight(params, trunc.n_max - params.l) >= weight_tol:
        raise TruncationTooSmall(
            f"thermal weight above level {trunc.n_max - params.l} is "
            f"{_tail_weight(params, trunc.n_max - params.l):.3e} >= {weight_tol:g}; "
            f"raise n_max (rule suggests {truncation_for(params, weight_tol).n_max})"
        )

    m = trunc.n_max + 1
    sx0, sy0, sz0 = atom_bloch
    rho_atom = 0.5 * np.array(
        [[1.0 + sz0, sx0 - 1j * sy0], [sx0 + 1j * sy0, 1.0 - sz0]], dtype=complex
    )
    weights = thermal_photon_weights(params, trunc)
    if photon_major:
        rho = np.kron(np.diag(weights), rho_atom)
    else:
        rho = np.kron(rho_atom, np.diag(weights))

    h = build_c2(params, trunc, photon_major)
    evals, vecs = np.linalg.eigh(h)
    u = (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T
    rho_t = u @ rho @ u.conj().T

    if photon_major:
        rho_a = np.einsum("ninj->ij", rho_t.reshape(m, 2, m, 2))
    else:
        rho_a = np.einsum("injn->ij", rho_t.reshape(2, m, 2, m))
    sx = float(np.real(rho_a[0, 1] + rho_a[1, 0]))
    sy = float(np.real(1j * (rho_a[0, 1] - rho_a[1, 0])))
    sz = float(np.real(rho_a[0, 0] - rho_a[1, 1]))
    return BlochVector(sx, sy, sz)
