"""Quintic secular-equation analysis of the polarization-preserving scheme.

The block model's eigenvalues solve

    -lambda^5 + a lambda^4 + b lambda^3 + c lambda^2 + d lambda + e = 0

with closed-form coefficients a..e in the detunings, couplings, and
occupation numbers (through n_s = n_sL + n_sR only).  This module supplies
the closed forms, an independent characteristic-polynomial oracle built
from exact eigenvalues, companion-matrix root extraction, and the two
perturbative eigenvalue estimates

    lambda_s ~= -e/d      (perturbed-dark-state root, deep hierarchy)
    lambda_l ~= a          (trace-dominating root; meaningful only when
                            one eigenvalue carries the trace, i.e.
                            delta << Delta)

plus a regime scan comparing both against the exact roots.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Iterable, Sequence

import numpy as np

from .schemes import SchemeParams

__all__ = [
    "SecularCoefficients",
    "EigenEstimate",
    "ScanRow",
    "secular_coefficients",
    "char_poly_coefficients",
    "lambda_small",
    "lambda_small_closed_form",
    "lambda_large",
    "quintic_roots",
    "middle_quartic_roots",
    "estimate_eigenvalues",
    "regime_scan",
    "ScanSummary",
    "summarize_regime_scan",
    "scan_to_csv_rows",
]

_REL_FLOOR = 1e-300  # guards relative errors when the exact root is 0


@dataclass(frozen=True)
class SecularCoefficients:
    """Coefficients of -l^5 + a l^4 + b l^3 + c l^2 + d l + e = 0."""

    a: float
    b: float
    c: float
    d: float
    e: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.e)


def secular_coefficients(params: SchemeParams, n_sl: int, n_sr: int, n_p: int
                         ) -> SecularCoefficients:
    """Closed-form quintic coefficients.

    The circular occupations enter only through n_s = n_sL + n_sR, which is
    what makes the scheme polarization-insensitive at this level: any
    single-photon polarization state is an eigenstate of n_sL + n_sR with
    eigenvalue 1, so the same numbers apply.
    """
    if n_sl < 0 or n_sr < 0 or n_p < 0:
        raise ValueError("photon numbers must be >= 0")
    delta, big = params.delta_two, params.delta_probe
    om2 = params.omega_d ** 2
    s = params.xi_s ** 2 * (n_sl + n_sr)
    p = params.xi_p ** 2 * n_p
    a = 2 * delta + big
    b = -delta ** 2 - 2 * delta * big + s + 2 * om2 + p
    c = -(delta + big) * s + delta ** 2 * big - 2 * (delta + big) * om2 - 2 * delta * p
    d = delta * big * (s + 2 * om2) - s * p + delta ** 2 * p
    e = delta * s * p
    return SecularCoefficients(a, b, c, d, e)


def char_poly_coefficients(matrix: np.ndarray) -> SecularCoefficients:
    """Exact characteristic-polynomial coefficients of a Hermitian 5x5.

    Computed from the eigenvalues through elementary symmetric polynomials
    and rearranged to the -l^5 + a l^4 + ... + e convention, so this is an
    oracle independent of the closed-form algebra.
    """
    m = np.asarray(matrix)
    if m.shape != (5, 5):
        raise ValueError(f"expected a 5x5 matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
        raise ValueError("matrix is not Hermitian")
    w = np.linalg.eigvalsh(m)
    # np.poly(w) = [1, -e1, e2, -e3, e4, -e5] (elementary symmetric polys of
    # the eigenvalues); our convention -l^5 + a l^4 + ... + e is its negative.
    p = np.poly(w)
    a, b, c, d, e = (-p[1:]).tolist()
    return SecularCoefficients(a, b, c, d, e)


def lambda_small(coeffs: SecularCoefficients) -> float:
    """Perturbed-dark-state eigenvalue estimate -e/d."""
    if coeffs.d == 0:
        raise ValueError("d = 0: degenerate regime, the -e/d estimate is invalid")
    return -coeffs.e / coeffs.d


def lambda_small_closed_form(params: SchemeParams, n_sl: int, n_sr: int, n_p: int) -> float:
    """Fully reduced small-eigenvalue formula.

    -xi_s^2 (n_sL + n_sR) xi_p^2 n_p / (Delta Omega_d^2)

    This is the same expression as the N-scheme cross-Kerr shift.  Note it
    is NOT the deep-hierarchy limit of -e/d: there d -> 2 delta Delta
    Omega_d^2 because both drive legs stiffen the dark state, so -e/d is
    smaller by a factor of 2.  Exact diagonalization of both the block
    model and the full scheme sides with -e/d; the reduced form is kept as
    stated for reference and applies verbatim to the single-route (N-type)
    chain.
    """
    if params.delta_probe == 0 or params.omega_d == 0:
        raise ValueError("closed form requires Delta != 0 and Omega_d != 0")
    s = params.xi_s ** 2 * (n_sl + n_sr)
    p = params.xi_p ** 2 * n_p
    return -s * p / (params.delta_probe * params.omega_d ** 2)


def lambda_large(coeffs: SecularCoefficients) -> float:
    """Largest-eigenvalue estimate: the nonzero root of -l^5 + a l^4 = 0, i.e. a.

    a equals the trace, so the estimate is only meaningful when a single
    root dominates the trace (delta << Delta); estimate_eigenvalues flags
    that via trace_dominated.
    """
    return coeffs.a


def quintic_roots(coeffs: SecularCoefficients, residual_tol: float = 1e-8) -> np.ndarray:
    """All five roots via companion-matrix eigenvalues, sorted ascending.

    Coefficients coming from a Hermitian matrix have five real roots.
    Clustered roots (e.g. two levels parked at the same detuning) make the
    companion eigenvalues wander off the real axis by O(eps^(1/3)) of the
    root magnitude, so small imaginary residue is dropped and the real
    parts are Newton-polished back to full accuracy.  Imaginary residue
    beyond the clustering scale signals genuinely complex roots, i.e.
    coefficients that never came from a Hermitian matrix, and raises; so
    does a final residual |p(root)| above residual_tol * scale with
    scale = max|coefficient| * max(1, |root|)^5.
    """
    a, b, c, d, e = coeffs.as_tuple()
    poly = np.array([-1.0, a, b, c, d, e])
    raw = np.roots(poly)  # companion-matrix eigenvalues as starting points
    refined = _aberth_refine(poly, raw)
    magnitude = max(1.0, float(np.max(np.abs(refined))))
    max_imag = float(np.max(np.abs(refined.imag)))
    if max_imag > 1e-3 * magnitude:
        raise ValueError(
            f"complex root residue {max_imag:g}: coefficients not from a Hermitian matrix?")
    roots = np.sort(refined.real)

    scale0 = np.max(np.abs(poly))
    for r in roots:
        scale = scale0 * max(1.0, abs(r)) ** 5
        p_val = np.polyval(poly, r)
        if abs(p_val) > residual_tol * scale:
            raise ValueError(
                f"root residual |p({r:g})| = {abs(p_val):g} exceeds {residual_tol:g} * scale")
    return roots


def middle_quartic_roots(coeffs: SecularCoefficients) -> np.ndarray:
    """Roots of a l^4 + b l^3 + c l^2 + d l = 0, sorted ascending.

    Diagnostic for the intermediate eigenvalues: the quartic factors as
    l * (a l^3 + b l^2 + c l + d), so one root is always 0 and the cubic
    holds the candidates for the middle of the spectrum.  All four are
    returned; which three form "the middle set" is ambiguous because the
    smallest-eigenvalue candidate is among them too.
    """
    if coeffs.a == 0:
        raise ValueError("a = 0: quartic diagnostic undefined")
    cubic = np.roots([coeffs.a, coeffs.b, coeffs.c, coeffs.d])
    return np.sort(np.concatenate([[0.0], cubic.real]))


def _aberth_refine(poly: np.ndarray, starts: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """Aberth-Ehrlich simultaneous refinement of all polynomial roots.

    Companion-matrix eigenvalues resolve clustered roots only to
    O(eps^(1/3)); the simultaneous iteration's mutual-repulsion term keeps
    close roots apart while polishing each toward machine accuracy on the
    polynomial itself (close real pairs arrive as conjugate artifacts
    whose imaginary parts carry the splitting, so plain Newton on the real
    parts would merge them).
    """
    dpoly = np.polyder(poly)
    z = starts.astype(complex)
    n = len(z)
    off_diag = ~np.eye(n, dtype=bool)
    scale = max(1.0, float(np.max(np.abs(z))))
    for _ in range(max_iter):
        pz = np.polyval(poly, z)
        dz = np.polyval(dpoly, z)
        newton = np.where(dz == 0, 0.0, pz / np.where(dz == 0, 1.0, dz))
        diff = z[:, None] - z[None, :]
        recip = np.zeros_like(diff)
        ok = off_diag & (diff != 0)  # coincident iterates exert no repulsion
        recip[ok] = 1.0 / diff[ok]
        denom = 1.0 - newton * recip.sum(axis=1)
        step = np.where(denom == 0, 0.0, newton / np.where(denom == 0, 1.0, denom))
        z_next = z - step
        if not np.all(np.isfinite(z_next)):
            break
        z = z_next
        if np.max(np.abs(step)) <= 1e-16 * scale:
            break
    return z


def _rel_err(approx: float, exact: float) -> float:
    return abs(approx - exact) / max(abs(exact), _REL_FLOOR)


@dataclass(frozen=True)
class EigenEstimate:
    """Perturbative estimates against the exact quintic roots.

    lambda_small matches the exact root of smallest magnitude (ties broken
    toward matching sign), lambda_large the largest root.  The reduced
    closed form is carried as a diagnostic; trace_dominated records whether
    the largest root actually carries the trace, outside of which the
    lambda_large estimate is not meaningful.
    """

    lambda_small: float
    lambda_large: float
    exact_roots: tuple[float, float, float, float, float]
    rel_err_small: float
    rel_err_large: float
    lambda_small_reduced: float
    rel_err_small_reduced: float
    trace_dominated: bool


def _smallest_by_magnitude(roots: np.ndarray, sign_hint: float) -> float:
    mags = np.abs(roots)
    candidates = np.flatnonzero(mags <= mags.min() * (1 + 1e-12))
    if len(candidates) > 1 and sign_hint != 0:
        for k in candidates:
            if np.sign(roots[k]) == np.sign(sign_hint):
                return float(roots[k])
    return float(roots[candidates[0]])


def estimate_eigenvalues(params: SchemeParams, n_sl: int, n_sr: int, n_p: int
                         ) -> EigenEstimate:
    """Bundle the lambda_s / lambda_l estimates with exact roots and errors."""
    coeffs = secular_coefficients(params, n_sl, n_sr, n_p)
    roots = quintic_roots(coeffs)
    lam_s = lambda_small(coeffs) if coeffs.d != 0 else 0.0
    lam_l = lambda_large(coeffs)
    exact_small = _smallest_by_magnitude(roots, lam_s)
    exact_large = float(roots[-1])
    if params.delta_probe != 0 and params.omega_d != 0:
        reduced = lambda_small_closed_form(params, n_sl, n_sr, n_p)
    else:
        reduced = math.nan  # undefined outside Delta, Omega_d != 0
    dominated = abs(exact_large) >= 0.9 * abs(coeffs.a) if coeffs.a != 0 else False
    return EigenEstimate(
        lambda_small=lam_s,
        lambda_large=lam_l,
        exact_roots=tuple(float(r) for r in roots),
        rel_err_small=_rel_err(lam_s, exact_small),
        rel_err_large=_rel_err(lam_l, exact_large),
        lambda_small_reduced=reduced,
        rel_err_small_reduced=_rel_err(reduced, exact_small),
        trace_dominated=bool(dominated),
    )


@dataclass(frozen=True)
class ScanRow:
    params: SchemeParams
    n_sl: int
    n_sr: int
    n_p: int
    estimate: EigenEstimate


def regime_scan(points: Iterable[tuple[SchemeParams, int, int, int]]) -> list[ScanRow]:
    """Evaluate estimate_eigenvalues over a parameter grid.

    Each point is (params, n_sL, n_sR, n_p).  Points are independent, so
    the scan parallelizes trivially; this implementation is sequential.
    """
    rows = [ScanRow(p, nl, nr, npp, estimate_eigenvalues(p, nl, nr, npp))
            for (p, nl, nr, npp) in points]
    if not rows:
        raise ValueError("regime_scan needs a nonempty grid")
    return rows


@dataclass(frozen=True)
class ScanSummary:
    """Estimate quality bucketed by hierarchy ratio.

    ratios holds the distinct min-hierarchy-ratios found in the scan,
    ascending; max_rel_err_small / max_rel_err_large the worst estimate
    error within each bucket.  improves_monotonically records whether the
    lambda_s error is nonincreasing as the hierarchy deepens (up to a 10%
    slack for noise-floor flatness).
    """

    ratios: tuple[float, ...]
    max_rel_err_small: tuple[float, ...]
    max_rel_err_large: tuple[float, ...]
    improves_monotonically: bool


def summarize_regime_scan(rows: Sequence[ScanRow]) -> ScanSummary:
    """Group scan rows by min hierarchy ratio and track error improvement."""
    buckets: dict[float, list[ScanRow]] = {}
    for row in rows:
        key = round(min(row.params.hierarchy_ratios()), 6)
        buckets.setdefault(key, []).append(row)
    ratios = tuple(sorted(buckets))
    err_s = tuple(max(r.estimate.rel_err_small for r in buckets[k]) for k in ratios)
    err_l = tuple(max(r.estimate.rel_err_large for r in buckets[k]) for k in ratios)
    monotone = all(b <= a * 1.1 for a, b in zip(err_s, err_s[1:]))
    return ScanSummary(ratios, err_s, err_l, monotone)


_CSV_HEADER = (
    "delta_probe", "delta_two", "omega_d", "xi_s", "xi_p", "n_sl", "n_sr", "n_p",
    "lambda_s_est", "lambda_s_exact", "rel_err_s",
    "lambda_l_est", "lambda_l_exact", "rel_err_l",
)


def scan_to_csv_rows(rows: Sequence[ScanRow]) -> list[tuple[str, ...]]:
    """Header plus one tuple of repr-formatted cells per scan point."""
    out = [_CSV_HEADER]
    for row in rows:
        est = row.estimate
        exact_small = _smallest_by_magnitude(np.array(est.exact_roots), est.lambda_small)
        cells = (
            row.params.delta_probe, row.params.delta_two, row.params.omega_d,
            row.params.xi_s, row.params.xi_p, row.n_sl, row.n_sr, row.n_p,
            est.lambda_small, exact_small, est.rel_err_small,
            est.lambda_large, est.exact_roots[-1], est.rel_err_large,
        )
        out.append(tuple(repr(c) for c in cells))
    return out
