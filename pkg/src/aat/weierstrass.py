"""Numeric Weierstrass functions: p, p', zeta, sigma over a lattice.

Everything is computed from the invariants (g2, g3) alone: the half-periods
come from cubic roots plus AGM complete integrals, and function values come
from the Laurent/Taylor series after argument reduction into the fundamental
cell, with argument halving and exact duplication formulas when the reduced
point sits too close to the cell boundary.  No theta functions anywhere.

Correctness is asserted through the lattice invariants (p(omega_i) = e_i, the
zeta/sigma quasi-periodicity shifts), never through hard-coded constants.
"""

from __future__ import annotations

import cmath

import numpy as np

from .reconstruct import rational_reconstruct
from .rings import DomainError, PoleError

_SERIES_MAX = 600
# the covering radius of a reduced argument stays below ~0.71 of the shortest
# period, where the Laurent series still converges cleanly; keeping the
# halving threshold above that avoids duplication steps (and their noise)
# for every reduced point
_HALVING_RATIO = 0.75


def agm(a: complex, b: complex, tol: float = 1e-16) -> complex:
    """Arithmetic-geometric mean with the right-half-plane square root choice."""
    a, b = complex(a), complex(b)
    for _ in range(200):
        if abs(a - b) <= tol * max(abs(a), 1e-30):
            break
        a, b = (a + b) / 2, cmath.sqrt(a * b)
        # pick the root closer to the arithmetic mean (|a-b| <= |a+b|)
        if abs(a - b) > abs(a + b):
            b = -b
    return (a + b) / 2


def _cubic_roots(g2: complex, g3: complex):
    roots = np.roots([4.0, 0.0, -complex(g2), -complex(g3)])
    roots = sorted(roots, key=lambda r: (-r.real, -r.imag))
    return [complex(r) for r in roots]


class Lattice:
    """Half-periods, quasi-period constants and e-values for given invariants.

    omega1, omega2 generate the period lattice {2m*omega1 + 2n*omega2} with
    Im(omega2/omega1) > 0.  e_roots is ordered so that p(omega1) = e_roots[0],
    p(omega2) = e_roots[1], p(omega1+omega2) = e_roots[2]; exact_e carries the
    entries that are exactly rational (used for exact specialization points).
    """

    __slots__ = (
        "g2",
        "g3",
        "omega1",
        "omega2",
        "eta1",
        "eta2",
        "e_roots",
        "exact_e",
        "_coeffs",
        "_rho",
    )

    def __init__(self, g2, g3):
        self.g2 = complex(g2)
        self.g3 = complex(g3)
        disc = self.g2**3 - 27 * self.g3**2
        if abs(disc) < 1e-12 * max(1.0, abs(self.g2) ** 3, abs(self.g3) ** 2):
            raise DomainError(f"degenerate lattice: g2^3 - 27*g3^2 = {disc}")
        e1, e2, e3 = _cubic_roots(self.g2, self.g3)
        s13 = cmath.sqrt(e1 - e3)
        kp2 = (e1 - e2) / (e1 - e3)  # complementary modulus squared
        k2 = (e2 - e3) / (e1 - e3)
        omega1 = cmath.pi / (2 * agm(1.0, cmath.sqrt(kp2)) * s13)
        omega2 = 1j * cmath.pi / (2 * agm(1.0, cmath.sqrt(k2)) * s13)
        if (omega2 / omega1).imag < 0:
            omega2 = -omega2
        self.omega1 = omega1
        self.omega2 = omega2
        self._coeffs = [0j, 0j, self.g2 / 20.0, self.g3 / 28.0]
        self._rho = min(
            abs(2 * omega1),
            abs(2 * omega2),
            abs(2 * omega1 + 2 * omega2),
            abs(2 * omega1 - 2 * omega2),
        )
        self.eta1 = self._zeta_unreduced(self.omega1)
        self.eta2 = self._zeta_unreduced(self.omega2)
        roots = (e1, e2, e3)
        ordered = []
        for h in (self.omega1, self.omega2, self.omega1 + self.omega2):
            val = self._wp_unreduced(h)
            ordered.append(min(roots, key=lambda r: abs(r - val)))
        self.e_roots = tuple(ordered)
        self.exact_e = tuple(self._exact_root(e) for e in self.e_roots)

    def _exact_root(self, e: complex):
        if abs(e.imag) > 1e-9:
            return None
        cand = rational_reconstruct(e.real, max_den=10**4, tol=1e-8)
        if cand is None:
            return None
        g2r = _as_fraction(self.g2)
        g3r = _as_fraction(self.g3)
        if g2r is None or g3r is None:
            return None
        if 4 * cand**3 - g2r * cand - g3r == 0:
            return cand
        return None

    # -- series ---------------------------------------------------------------

    def _coeff(self, k: int) -> complex:
        cs = self._coeffs
        while len(cs) <= k:
            n = len(cs)
            acc = 0j
            for m in range(2, n - 1):
                if 2 <= n - m < len(cs):
                    acc += cs[m] * cs[n - m]
            cs.append(3.0 * acc / ((2 * n + 1) * (n - 3)))
        return cs[k]

    def _series_all(self, u: complex):
        """(p, p', zeta, sigma) by direct series; caller guarantees |u| small."""
        u2 = u * u
        wp = 1.0 / u2
        wpd = -2.0 / (u2 * u)
        zt = 1.0 / u
        sig_log = 0j
        power = u2  # u^(2k-2) for k = 2
        small_run = 0
        for k in range(2, _SERIES_MAX):
            c = self._coeff(k)
            t = c * power
            wp += t
            wpd += (2 * k - 2) * c * power / u
            zt -= t * u / (2 * k - 1)
            sig_log -= t * u2 / ((2 * k - 1) * (2 * k))
            # zero coefficients occur systematically (g3 = 0 kills odd k),
            # so require two consecutive negligible terms before stopping
            if abs(t) < 1e-17 * max(1.0, abs(wp)) and k > 6:
                small_run += 1
                if small_run >= 2:
                    break
            else:
                small_run = 0
            power *= u2
        else:
            raise DomainError("Weierstrass series did not converge (point too close to a period)")
        return wp, wpd, zt, u * cmath.exp(sig_log)

    def _eval_small(self, u: complex):
        """Series plus halving/duplication for any nonzero point of the cell."""
        halvings = 0
        while abs(u) > _HALVING_RATIO * self._rho and halvings < 48:
            u /= 2
            halvings += 1
        p, q, zt, sg = self._series_all(u)
        g2 = self.g2
        for _ in range(halvings):
            r = 6 * p * p - g2 / 2
            s3 = 12 * p * q
            if abs(q) < 1e-280:
                raise PoleError("duplication hit a critical point")
            p, q, zt, sg = (
                -2 * p + (r / (2 * q)) ** 2,
                -q + r * (s3 * q - r * r) / (4 * q**3),
                2 * zt + r / (2 * q),
                -(sg**4) * q,
            )
        return p, q, zt, sg

    def _wp_unreduced(self, u: complex) -> complex:
        return self._eval_small(u)[0]

    def _zeta_unreduced(self, u: complex) -> complex:
        return self._eval_small(u)[2]

    # -- reduction --------------------------------------------------------------

    def reduce(self, u: complex):
        """(u0, m, n) with u = u0 + 2m*omega1 + 2n*omega2 and |u0| minimal."""
        w1, w2 = 2 * self.omega1, 2 * self.omega2
        det = w1.real * w2.imag - w1.imag * w2.real
        s = (u.real * w2.imag - u.imag * w2.real) / det
        t = (w1.real * u.imag - w1.imag * u.real) / det
        m0, n0 = round(s), round(t)
        best = None
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                m, n = m0 + dm, n0 + dn
                u0 = u - m * w1 - n * w2
                if best is None or abs(u0) < best[3]:
                    best = (u0, m, n, abs(u0))
        return best[0], best[1], best[2]

    def lattice_distance(self, u: complex) -> float:
        return abs(self.reduce(u)[0])

    # -- public evaluation --------------------------------------------------------

    def eval_all(self, u: complex):
        """(p, p', zeta, sigma) at u, with quasi-periodic unreduction."""
        u = complex(u)
        u0, m, n = self.reduce(u)
        if abs(u0) < 1e-12:
            raise PoleError(f"lattice point: u = {u}")
        p, q, zt, sg = self._eval_small(u0)
        if m or n:
            eta_p = 2 * m * self.eta1 + 2 * n * self.eta2
            period = 2 * m * self.omega1 + 2 * n * self.omega2
            zt = zt + eta_p
            sign = -1.0 if (m + n + m * n) % 2 else 1.0
            sg = sign * cmath.exp(eta_p * (u0 + period / 2)) * sg
        return p, q, zt, sg

    def wp(self, u: complex) -> complex:
        return self.eval_all(u)[0]

    def wp_prime(self, u: complex) -> complex:
        return self.eval_all(u)[1]

    def zeta(self, u: complex) -> complex:
        return self.eval_all(u)[2]

    def sigma(self, u: complex) -> complex:
        u = complex(u)
        u0, m, n = self.reduce(u)
        if abs(u0) < 1e-12:
            # sigma is entire with simple zeros on the lattice
            return 0j
        return self.eval_all(u)[3]


def _as_fraction(z: complex):
    if abs(z.imag) > 1e-12:
        return None
    return rational_reconstruct(z.real, max_den=10**6, tol=1e-10)


def eval_weierstrass(lat: Lattice, which: str, u: complex) -> complex:
    """Single-function entry point: which in {wp, wp-prime, zeta, sigma}."""
    if which == "wp":
        return lat.wp(u)
    if which == "wp-prime":
        return lat.wp_prime(u)
    if which == "zeta":
        return lat.zeta(u)
    if which == "sigma":
        return lat.sigma(u)
    raise DomainError(f"unknown Weierstrass function {which!r}")
