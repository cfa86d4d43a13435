"""Acceptance criteria, one test per criterion.

Each test checks its stated tolerance and, where one is given, its runtime
budget. ``conftest.py`` prints a PASS/FAIL line per criterion at the end of
the run.
"""
import io
import itertools
import math
import time

import mpmath as mp
import numpy as np
import pytest
from scipy import special as sp

from fraccasimir import cli, topomass
from fraccasimir.epstein import epstein_zeta, epstein_zeta_deriv0
from fraccasimir.model import BoundarySpec, FieldSpec, PistonGeometry, TorusTopology
from fraccasimir.piston import (
    high_T_leading,
    massive_piston_energy,
    massive_piston_energy_zeroT,
    massive_piston_force,
    massive_piston_force_zeroT,
    massless_piston_force_rect,
)
from fraccasimir.specfun import bessel_k, digamma, riemann_zeta
from fraccasimir.thermo import free_energy_d0


class Budget:
    """Context manager asserting a wall-clock limit."""

    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            elapsed = time.perf_counter() - self.t0
            assert elapsed < self.seconds, f"took {elapsed:.1f} s, budget {self.seconds} s"


def rel(a, b):
    return abs(a - b) / abs(b)


def cli_csv(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    assert code == 0, err.getvalue()
    return out.getvalue()


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


# -- 1 ---------------------------------------------------------------------

def test_criterion_01_special_functions():
    with Budget(5):
        xs = np.geomspace(0.01, 50.0, 100)
        closed = {
            0.5: lambda x: math.sqrt(math.pi / (2 * x)) * math.exp(-x),
            1.5: lambda x: math.sqrt(math.pi / (2 * x)) * math.exp(-x) * (1 + 1 / x),
            2.5: lambda x: math.sqrt(math.pi / (2 * x)) * math.exp(-x) * (1 + 3 / x + 3 / x**2),
        }
        for nu, f in closed.items():
            for x in xs:
                assert rel(bessel_k(nu, x), f(x)) <= 1e-10
        for nu in (0.0, 0.3, 1.7, 4.2):
            for x in xs:
                lhs = bessel_k(nu + 1, x)
                rhs = bessel_k(nu - 1, x) + 2 * nu / x * bessel_k(nu, x)
                assert rel(lhs, rhs) <= 1e-8
        assert rel(riemann_zeta(2.0), math.pi**2 / 6) <= 1e-10
        assert rel(riemann_zeta(0.0), -0.5) <= 1e-10
        assert rel(riemann_zeta(-1.0), -1 / 12) <= 1e-10
        for x in np.linspace(0.05, 30.0, 100):
            assert rel(digamma(x + 1), digamma(x) + 1 / x) <= 1e-10


# -- 2 ---------------------------------------------------------------------

def square_lattice_brute(s, radius=1500):
    """Z_2(s; 1, 1) summed over |k| <= radius plus the smooth tail pi R^(2-2s)/(s-1).

    The leftover is set by the circle-problem remainder, about R^(2/3 - 2s).
    """
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    parts = []
    for k1 in range(-radius, radius + 1):
        q = k1 * k1 + k * k
        q = q[(q > 0) & (q <= radius * radius)]
        parts.append(math.fsum(q ** (-s)))
    return math.fsum(parts) + math.pi * radius ** (2 - 2 * s) / (s - 1)


def test_criterion_02_epstein():
    with Budget(30):
        for a in (0.4, 1.0, 2.3):
            for s in (-2.3, -0.7, 0.3, 0.8, 1.6, 4.0):
                assert rel(epstein_zeta(s, [a]), 2 * a ** (-2 * s) * riemann_zeta(2 * s)) <= 1e-10
        for s in (2.0, 3.0):
            ident = 4 * float(mp.zeta(s)) * float(mp.dirichlet(s, [0, 1, 0, -1]))
            brute = square_lattice_brute(s)
            assert rel(brute, ident) <= 1e-8
            assert rel(epstein_zeta(s, [1.0, 1.0]), ident) <= 1e-8
            assert rel(epstein_zeta(s, [1.0, 1.0]), brute) <= 1e-8
        for w in ([1.3], [1.0, 1.7], [0.8, 1.0, 1.4]):
            assert abs(epstein_zeta(0.0, w) + 1.0) <= 1e-8
            assert abs(epstein_zeta(1e-10, w) + 1.0) <= 1e-8
        for a in (0.2, 1.0, 2 * math.pi, 9.0):
            ref = 2 * math.log(a / (2 * math.pi))
            if ref == 0.0:
                assert abs(epstein_zeta_deriv0([a])) <= 1e-12
            else:
                assert rel(epstein_zeta_deriv0([a]), ref) <= 1e-8


# -- 3 ---------------------------------------------------------------------

def generic_grid(n, seed=3):
    """(p, q, gamma, L) points kept 0.05 away from gamma = q/2 and gamma = d/2."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        p, q = int(rng.integers(1, 4)), int(rng.integers(0, 4))
        g = float(rng.uniform(0.1, 3.0))
        if min(abs(g - q / 2), abs(g - (p + q) / 2)) < 0.05:
            continue
        pts.append((p, q, g, tuple(float(x) for x in rng.uniform(0.5, 2.0, p))))
    return pts


def test_criterion_03_functional_equation_cross_check():
    with Budget(60):
        for p, q, g, lengths in generic_grid(50):
            topo = TorusTopology(lengths, q)
            direct = topomass.generic_form_direct(g, 1.0, topo)
            dual = topomass.generic_form_dual(g, 1.0, topo)
            assert rel(direct, dual) <= 1e-8, (p, q, g, lengths)


# -- 4 ---------------------------------------------------------------------

def lattice_brute(nu, m, lengths, z_max):
    axes = [np.arange(0, int(z_max / (m * x)) + 2) for x in lengths]
    grids = np.meshgrid(*axes, indexing="ij")
    q = sum((x * g) ** 2 for x, g in zip(lengths, grids)).ravel()
    mult = np.prod([np.where(g == 0, 1, 2) for g in grids], axis=0).ravel()
    keep = (q > 0) & (m * np.sqrt(q) <= z_max)
    q, mult = q[keep], mult[keep]
    return math.fsum(mult * q ** (-nu / 2) * sp.kv(nu, m * np.sqrt(q)))


def test_criterion_04_massive_no_breaking():
    rng = np.random.default_rng(4)
    for i in range(200):
        m = float(rng.uniform(1.0, 3.0))
        g = float(rng.uniform(0.25, 2.5))
        lam = float(rng.uniform(0.1, 5.0))
        p, q = int(rng.integers(1, 4)), int(rng.integers(0, 4))
        lengths = tuple(float(x) for x in rng.uniform(0.7, 1.5, p))
        topo = TorusTopology(lengths, q)
        r = topomass.massive_renormalized_mass(m, FieldSpec.type_i(g), lam, topo)
        assert r.m_ren_2gamma > m ** (2 * g)
        assert not r.symmetry_broken
        if i % 10 == 0:
            nu = 0.5 * topo.d - g
            val, diag = topomass.lattice_bessel_sum(nu, m, lengths)
            assert rel(val, lattice_brute(nu, m, lengths, 2 * diag["z_cut"])) <= 1e-10


# -- 5 ---------------------------------------------------------------------

def test_criterion_05_symmetry_breaking_region(tmp_path):
    with Budget(60):
        ks = np.geomspace(0.25, 4.0, 9)
        s_grid = np.linspace(-1.45, 2.45, 79)
        pts, diag = topomass.symmetry_region_scan(2, topomass.preset_ratios(2, ks), s_grid)
        assert diag["claim_holds"]
        outside = [pt for pt in pts if not 0 < pt.s <= 1]
        inside = [pt for pt in pts if 0 < pt.s <= 1]
        assert outside and inside
        assert all(pt.value >= 0 for pt in outside)
        assert any(pt.value < 0 for pt in inside)
        # sign map as CSV: s on one axis, k on the other
        text = cli_csv("region-scan", "--p", "2", "--s", "0.05:1.45:57", "--k", "0.25:4:9:log")
        (tmp_path / "region.csv").write_text(text)
        header, rows = csv_rows(text)
        assert header[:2] == ["s[1]", "k[1]"]
        signs = {(float(r[0]), float(r[1])): int(r[-1]) for r in rows}
        assert all(v >= 0 for (s, _), v in signs.items() if s > 1)
        assert any(v < 0 for (s, _), v in signs.items() if s <= 1)


# -- 6 ---------------------------------------------------------------------

def test_criterion_06_massless_piston_signs():
    with Budget(30):
        a_grid = np.linspace(0.2, 3.0, 20)
        for T, g in itertools.product((0.3, 1.0, 3.0), (0.5, 1.0, 2.0)):
            for mu in (0.6, 0.8):
                for a in a_grid:
                    assert massless_piston_force_rect(g, mu, PistonGeometry(a, (1.0, 1.0)),
                                                      T).value > 0
            f0 = np.array([massless_piston_force_rect(g, 0.0, PistonGeometry(a, (1.0, 1.0)),
                                                      T).value for a in a_grid])
            assert np.all(f0 < 0)
            assert np.all(np.diff(np.abs(f0)) < 0)


# -- 7 ---------------------------------------------------------------------

def test_criterion_07_temperature_flip():
    geom = PistonGeometry(0.1, (1.0, 1.0))
    temps = np.geomspace(0.3, 30.0, 21)
    forces = [massless_piston_force_rect(1.0, 0.47, geom, T).value for T in temps]
    assert min(forces) < 0 < max(forces)
    # the type III route at alpha = 1, m = 0 agrees
    f3 = FieldSpec.type_iii(1.0, 1.0, 0.0)
    for T, f in zip(temps[::5], forces[::5]):
        other = massive_piston_force(f3, BoundarySpec(0.47), geom, T).value
        assert other == pytest.approx(f, rel=1e-8, abs=1e-10)


# -- 8 ---------------------------------------------------------------------

def transverse_modes(lengths, cutoff):
    ranges = [range(1, int(cutoff * x / math.pi) + 1) for x in lengths]
    out = []
    for ks in itertools.product(*ranges):
        w = math.sqrt(sum((math.pi * k / x) ** 2 for k, x in zip(ks, lengths)))
        if w <= cutoff:
            out.append(w)
    return out


def log_energy_oracle(alpha, g, mu, a, lengths, T):
    """alpha gamma T sum_k sum'_l ln(1 - 2 cos(pi mu) e^{-2 a w} + e^{-4 a w}) at m = 0.

    The primed l-sum runs over l >= 0 with the l = 0 term halved; the total is
    halved again at mu in {0, 1}. Terms are dropped once e^{-2 a w} < 1e-20.
    """
    cutoff = 23.0 / a
    total = []
    c = math.cos(math.pi * mu)
    for w in transverse_modes(lengths, cutoff):
        for l in itertools.count():
            om = math.hypot(w, 2 * math.pi * l * T)
            if om > cutoff:
                break
            x = math.exp(-2 * a * om)
            total.append((0.5 if l == 0 else 1.0) * math.log1p(-2 * c * x + x * x))
    val = alpha * g * T * math.fsum(total)
    return 0.5 * val if mu in (0.0, 1.0) else val


def test_criterion_08_massive_piston_oracle():
    with Budget(60):
        lengths, a, T = (1.0, 1.2), 0.8, 0.7
        for mu in (0.0, 0.3, 0.5, 0.7, 1.0):
            e = massive_piston_energy(FieldSpec.type_iii(0.7, 1.3, 0.0), BoundarySpec(mu),
                                      PistonGeometry(a, lengths), T).value
            assert rel(e, log_energy_oracle(0.7, 1.3, mu, a, lengths, T)) <= 1e-10
        w_min = math.pi * math.hypot(1 / lengths[0], 1 / lengths[1])
        h = 1e-4
        for m, mu in itertools.product((0.0, 0.2 * w_min), (0.0, 0.3)):
            f = FieldSpec.type_iii(0.7, 1.3, m)
            b = BoundarySpec(mu)

            def energy(x, temp):
                g = PistonGeometry(x, lengths)
                if temp == 0.0:
                    return massive_piston_energy_zeroT(f, b, g).value
                return massive_piston_energy(f, b, g, temp).value

            for temp in (T, 0.0):
                fd = -(energy(a + h, temp) - energy(a - h, temp)) / (2 * h)
                g0 = PistonGeometry(a, lengths)
                force = (massive_piston_force_zeroT(f, b, g0) if temp == 0.0
                         else massive_piston_force(f, b, g0, temp)).value
                assert rel(force, fd) <= 1e-5, (m, mu, temp)


# -- 9 ---------------------------------------------------------------------

def test_criterion_09_high_temperature_dominance():
    a, T = 1.0, 5.0
    geom = PistonGeometry(a, (1.0, 1.3))
    for alpha, m, mu in ((1.0, 0.0, 0.0), (0.7, 0.5, 0.3), (0.4, 1.5, 0.8)):
        f, b = FieldSpec.type_iii(alpha, 1.0, m), BoundarySpec(mu)
        full = massive_piston_energy(f, b, geom, T).value
        lead = high_T_leading(f, b, geom, T).value
        assert rel(lead, full) <= 0.01
        # the same block is far from the full energy at aT = 0.2
        low = massive_piston_energy(f, b, geom, 0.2).value
        assert rel(high_T_leading(f, b, geom, 0.2).value, low) > 0.1
    # at m = 0 the l = 0 block is alpha gamma T sum_k (1/2) ln(1 - 2 cos(pi mu) e^{-2aw} + e^{-4aw})
    f, b = FieldSpec.type_iii(0.6, 1.0, 0.0), BoundarySpec(0.3)
    c = math.cos(0.3 * math.pi)
    terms = [0.5 * math.log1p(-2 * c * math.exp(-2 * a * w) + math.exp(-4 * a * w))
             for w in transverse_modes((1.0, 1.3), 23.0 / a)]
    assert rel(high_T_leading(f, b, geom, T).value, 0.6 * T * math.fsum(terms)) <= 1e-10


# -- 10 --------------------------------------------------------------------

def test_criterion_10_free_energy_d0():
    rng = np.random.default_rng(10)
    for _ in range(100):
        alpha, bm = float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.05, 6.0))
        g = float(rng.uniform(0.1, 5.0))
        one = free_energy_d0(FieldSpec.type_iii(alpha, 1.0, 1.0), bm)
        assert free_energy_d0(FieldSpec.type_iii(alpha, g, 1.0), bm) == g * one
    # free-energy curves as CSV: F/m against beta m at m = 1
    text = cli_csv("free-energy-d0", "--axis1", "alpha:0.1:0.9:9", "--axis2", "beta:0.1:5:50",
                   "--mass", "1", "--gamma", "1")
    header, rows = csv_rows(text)
    assert header == ["alpha[1]", "beta[l]", "F[1/l]"] and len(rows) == 450
    vals = np.array([float(r[2]) for r in rows]).reshape(9, 50)
    assert np.all(np.isfinite(vals))
    # alpha = gamma = 1 against the zeta-regularized Matsubara product
    # m/2 + ln(1 - e^{-beta m})/beta, up to one additive constant
    betas = np.linspace(0.1, 5.0, 50)
    f = np.array([free_energy_d0(FieldSpec.type_iii(1.0, 1.0, 1.0), b) for b in betas])
    ref = 0.5 + np.log1p(-np.exp(-betas)) / betas
    c = float(np.mean(f - ref))
    assert np.all(np.abs(f - (ref + c)) <= 1e-6 * np.abs(ref + c))


# -- 11 --------------------------------------------------------------------

DETERMINISM_RUNS = [
    ["free-energy-d0", "--axis1", "alpha:0.1:0.9:5", "--axis2", "beta:0.1:5:12", "--mass", "1"],
    ["region-scan", "--p", "3", "--s", "0.1:1.4:8", "--k2", "0.5:2:3"],
    ["piston-force", "--D", "3", "--L", "0.01,0.01", "--mu", "0.47", "--T", "1",
     "--axis1", "a:0.0005:0.005:6", "--units", "SI"],
    ["sweep", "--target", "piston-energy", "--L", "1,1", "--a", "0.7", "--T", "1",
     "--mass", "0.3", "--alpha", "0.6", "--axis1", "mu:0:1:6"],
    ["topomass", "--L", "1,1.5", "--q", "2", "--axis1", "gamma:0.2:1.8:6"],
]


def test_criterion_11_determinism():
    for argv in DETERMINISM_RUNS:
        first = cli_csv(*argv).encode()
        assert cli_csv(*argv).encode() == first
        threaded = cli_csv(*argv, "--jobs", "2").encode()
        strip = [ln for ln in first.splitlines() if not ln.startswith(b"# command:")]
        assert [ln for ln in threaded.splitlines() if not ln.startswith(b"# command:")] == strip
