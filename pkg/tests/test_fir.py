import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from trigsos import fir
from trigsos.errors import SpecError
from trigsos.fir import (
    FAMILIES,
    FilterSpec,
    build_filter_sdp,
    check_filter_certificate,
    design_filter,
    family_residuals,
    filter_certificate_from_json,
    filter_certificate_to_json,
    filter_report,
)

SMALL = FilterSpec(10, Fraction(1, 5), Fraction(2, 5), Fraction(1, 10), Fraction(1, 10))


@pytest.fixture(scope="module")
def small_design():
    return design_filter(SMALL)


def _amplitude(h, theta):
    """H = h_0 + 2 sum h_k cos(k theta) at 50 digits."""
    with mpmath.workdps(50):
        hs = [mpmath.mpf(x.numerator) / x.denominator for x in h]
        return hs[0] + 2 * mpmath.fsum(hs[k] * mpmath.cos(k * theta) for k in range(1, len(hs)))


class TestSpec:
    def test_inverted(self):
        with pytest.raises(SpecError):
            FilterSpec(5, Fraction(1, 4), Fraction(1, 5), Fraction(1, 10), Fraction(1, 10))

    @pytest.mark.parametrize("bad", [dict(d=0), dict(gamma_p=0), dict(gamma_s=-1), dict(omega_s=1)])
    def test_invalid(self, bad):
        kw = dict(d=5, omega_p=Fraction(1, 5), omega_s=Fraction(1, 4), gamma_p=Fraction(1, 10), gamma_s=Fraction(1, 10))
        kw.update(bad)
        with pytest.raises(SpecError):
            FilterSpec(**kw)

    def test_json(self):
        assert FilterSpec.from_json(SMALL.to_json()) == SMALL


class TestBuild:
    def test_toeplitz_values(self):
        data = build_filter_sdp(FilterSpec(25, Fraction(1, 5), Fraction(1, 4), Fraction(1, 10), Fraction(158, 10000)))
        assert data.c[0].center == Fraction(3, 4) and data.c[0].radius == 0
        assert data.c[4].center == 0 and data.c[4].radius == 0
        c1 = -np.sin(np.pi / 4) / np.pi
        assert abs(float(data.c[1].center) - c1) < 1e-15
        assert data.c[1].radius == Fraction(1, 1 << 128)

    def test_cosines(self):
        data = build_filter_sdp(FilterSpec(4, Fraction(1, 3), Fraction(1, 2), Fraction(1, 10), Fraction(1, 10)))
        assert data.cos_p.center == Fraction(1, 2) or abs(data.cos_p.center - Fraction(1, 2)) <= data.cos_p.radius
        assert data.cos_s.center == 0 and data.cos_s.radius == 0

    def test_out_of_range_is_zero(self):
        from trigsos.fir import _band_term, _diag_sum

        Q = [[Fraction(1)] * 3 for _ in range(3)]
        assert _diag_sum(Q, 3) == 0 and _diag_sum(Q, -5) == 0
        # at k = 4 only Phi_2 (the k-2 neighbour) is in range for a 3 x 3 block
        assert _band_term(Q, 4, Fraction(1), Fraction(0)) == Fraction(-1, 4)

    def test_c_tilde_psd(self):
        data = build_filter_sdp(SMALL)
        Ct = np.array([[float(x) for x in r] for r in data.C_tilde])
        assert np.linalg.eigvalsh(Ct)[0] > -1e-12


class TestDesign:
    def test_checks_pass(self, small_design):
        cert, data = small_design
        checks = check_filter_certificate(data, cert)
        assert len(checks) == 12 and all(ok for _, ok in checks)

    def test_identities_exact(self, small_design):
        cert, data = small_design
        Qs = [[list(r) for r in Q] for Q in cert.Qs]
        for fam in FAMILIES:
            assert not any(family_residuals(data, fam, cert.h, Qs))

    def test_modulus_spot_check(self, small_design):
        cert, data = small_design
        sp = cert.spec
        tol = 1e-30
        with mpmath.workdps(50):
            for theta in mpmath.linspace(0, mpmath.pi * sp.omega_p.numerator / sp.omega_p.denominator, 5000):
                H = _amplitude(cert.h, theta)
                assert 1 - sp.gamma_p - tol <= H <= 1 + sp.gamma_p + tol
            for theta in mpmath.linspace(mpmath.pi * sp.omega_s.numerator / sp.omega_s.denominator, mpmath.pi, 5000):
                H = _amplitude(cert.h, theta)
                assert -sp.gamma_s - tol <= H <= sp.gamma_s + tol

    def test_enclosure_width(self, small_design):
        cert, data = small_design
        d = data.d
        hmax = max(abs(x) for x in cert.h)
        assert cert.energy.width <= Fraction(16, 1 << cert.spec.spec_bits) * (d + 1) ** 2 * hmax ** 2
        assert cert.energy.contains(cert.energy.center)

    def test_numeric_energy_close(self, small_design):
        cert, _ = small_design
        assert abs(float(cert.energy.center) - cert.meta["numeric_energy"]) <= 1e-9

    def test_json_round_trip(self, small_design):
        cert, data = small_design
        back = filter_certificate_from_json(json.loads(json.dumps(filter_certificate_to_json(cert))))
        assert back == cert
        assert all(ok for _, ok in check_filter_certificate(data, back))

    def test_tampered_certificate_fails(self, small_design):
        cert, data = small_design
        from dataclasses import replace

        h = list(cert.h)
        h[0] += Fraction(1, 1 << 60)
        checks = dict(check_filter_certificate(data, replace(cert, h=tuple(h))))
        assert not all(checks.values())

    def test_report(self, small_design):
        cert, data = small_design
        text = filter_report(cert, check_filter_certificate(data, cert))
        assert "certified energy of the designed feasible filter" in text and "FAIL" not in text

    def test_loose_spec_zero_energy(self):
        cert, data = design_filter(FilterSpec(5, Fraction(1, 5), Fraction(1, 4), Fraction(1), Fraction(1)))
        assert float(cert.energy.hi) <= 1e-7

    def test_order_one(self):
        spec = FilterSpec(1, Fraction(1, 5), Fraction(1, 4), Fraction(1), Fraction(2))
        cert, data = design_filter(spec)
        assert all(ok for _, ok in check_filter_certificate(data, cert))
        # grid oracle over (h0, h1): constraints hold on the whole circle for d = 1
        th = np.linspace(0, np.pi, 1000)
        Ct = np.array([[float(x) for x in r] for r in data.C_tilde])
        best = np.inf
        for h0 in np.linspace(-1, 2, 61):
            for h1 in np.linspace(-1, 1, 41):
                H = h0 + 2 * h1 * np.cos(th)
                if H.min() >= 0 and H.max() <= 2:
                    best = min(best, np.array([h0, h1]) @ Ct @ np.array([h0, h1]))
        assert float(cert.energy.center) <= best + 1e-7


class TestProjection:
    def test_identity_on_feasible(self, small_design):
        cert, data = small_design
        Qs = [[list(r) for r in Q] for Q in cert.Qs]
        for fam in FAMILIES:
            a, b = data.band(fam)
            B = Qs[fam.B] if fam.B is not None else []
            targets = [data.const(fam, k) + fam.sign * cert.h[k] - fir._band_term(B, k, a, b) for k in range(data.d + 1)]
            assert fir._project_real(Qs[fam.A], targets) == Qs[fam.A]

    def test_perturbed_diagonal(self, small_design):
        cert, data = small_design
        Qs = [[list(r) for r in Q] for Q in cert.Qs]
        fam = FAMILIES[0]
        Q1 = [list(r) for r in Qs[0]]
        Q1[2][2] += Fraction(1, 1 << 40)
        Qs[0] = Q1
        assert any(family_residuals(data, fam, cert.h, Qs))
        targets = [data.const(fam, k) + fam.sign * cert.h[k] for k in range(data.d + 1)]
        Qs[0] = fir._project_real(Q1, targets)
        assert not any(family_residuals(data, fam, cert.h, Qs))
