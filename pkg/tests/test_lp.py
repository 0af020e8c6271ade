"""Dyadic band decomposition: partition of unity, norm equivalence, commutator."""

import numpy as np
import pytest

from aggflow.initial import InitialSpec, make_initial_data
from aggflow.lp import (
    DEFAULT_BUMP,
    AliasWarning,
    commutator_check,
    equivalence_ratio_bounds,
    lp_max_level,
    lp_norm_equivalence,
    lp_project,
    lp_reconstruct,
)
from aggflow.spectral import Field, make_grid

# lhs/rhs bracket of the dyadic norm characterisation at sigma = 0.75,
# computed exactly from the per-radius weight scan (see
# equivalence_ratio_bounds); frozen with a slim safety margin.
EQUIV_BRACKET_075 = (0.40, 1.46)


def band_field(grid, seed, band):
    return make_initial_data(
        InitialSpec(kind="random_band_limited", seed=seed, band=band, amplitude=1.0),
        grid,
    )


class TestBumpProfile:
    def test_plateau_and_support(self):
        r = np.array([0.0, 0.5, 1.0, 1.04, 1.09, 1.1, 2.0])
        vals = DEFAULT_BUMP.phi0(r)
        assert np.all(vals[:3] == 1.0)
        assert 0.0 < vals[3] < 1.0
        assert 0.0 < vals[4] < vals[3]
        assert vals[5] == 0.0 and vals[6] == 0.0

    def test_band_symbol_vanishes_on_plateau_interior(self):
        # phi = phi0(r) - phi0(2r) is zero wherever both pieces are 1
        r = np.linspace(0.0, 0.5, 100)
        assert np.max(np.abs(DEFAULT_BUMP.phi(r))) == 0.0

    def test_telescoping_partition(self):
        r = np.linspace(0.0, 90.0, 10001)
        total = DEFAULT_BUMP.phi0(2 * r)
        for k in range(0, 9):
            total += DEFAULT_BUMP.phi(r / 2**k)
        keep = r <= 2**8  # partial sums are exactly 1 once 2^K covers r
        assert np.max(np.abs(total[keep] - 1.0)) < 1e-12

    def test_grad_sup_is_positive_and_stable(self):
        val = DEFAULT_BUMP.grad_phi_sup()
        assert 40.0 < val < 50.0


class TestProjections:
    def test_constant_lives_in_mean_band(self):
        g = make_grid(2, 32)
        f = Field(g, np.full(g.shape, 2.5))
        s_minus1 = lp_project(f, -1)
        assert np.max(np.abs(s_minus1.values - 2.5)) < 1e-13
        for k in range(0, lp_max_level(g) + 1):
            assert np.max(np.abs(lp_project(f, k).values)) < 1e-13

    def test_single_mode_on_annulus_interior(self):
        # |alpha| = 2^k sits where the band symbol equals 1
        g = make_grid(2, 64)
        x, _ = g.node_mesh()
        f = Field(g, np.cos(2 * np.pi * 4 * x))
        sk = lp_project(f, 2)
        assert np.max(np.abs(sk.values - f.values)) < 1e-13

    @pytest.mark.parametrize("n,dim", [(32, 1), (32, 2), (16, 3)])
    def test_reconstruction(self, n, dim):
        g = make_grid(dim, n)
        rng = np.random.default_rng(100 + n + dim)
        f = Field(g, rng.standard_normal(g.shape))
        rec = lp_reconstruct(f)
        assert np.max(np.abs(rec.values - f.values)) < 1e-12 * max(1.0, np.max(np.abs(f.values)))


class TestNormEquivalence:
    def test_both_sides_zero_for_constant(self):
        g = make_grid(2, 32)
        lhs, rhs = lp_norm_equivalence(Field(g, np.full(g.shape, 1.0)), 0.75)
        assert lhs == 0.0 and rhs == 0.0

    def test_cosine_exact_value(self):
        g = make_grid(2, 32)
        x, _ = g.node_mesh()
        lhs, rhs = lp_norm_equivalence(Field(g, np.cos(2 * np.pi * x)), 0.75)
        assert abs(lhs - 0.5) < 1e-13
        # at |alpha| = 1 only the k=0 band is active and its symbol is 1
        assert abs(rhs - 0.5) < 1e-13

    def test_frozen_bracket_contains_scan(self):
        lo, hi = equivalence_ratio_bounds(0.75, np.sqrt(2) * 128.0)
        assert EQUIV_BRACKET_075[0] <= lo <= hi <= EQUIV_BRACKET_075[1]

    @pytest.mark.parametrize("seed", range(6))
    def test_random_fields_within_bracket(self, seed):
        g = make_grid(2, 64)
        f = band_field(g, seed=400 + seed, band=20)
        lhs, rhs = lp_norm_equivalence(f, 0.75)
        ratio = lhs / rhs
        assert EQUIV_BRACKET_075[0] <= ratio <= EQUIV_BRACKET_075[1]


class TestCommutator:
    def test_constant_g_commutes(self):
        g = make_grid(2, 32)
        const = Field(g, np.full(g.shape, 3.0))
        f = band_field(g, seed=1, band=5)
        lhs, rhs = commutator_check(const, f, 2)
        assert lhs < 1e-13
        assert rhs == 0.0  # ghat carries no nonzero frequency

    def test_constant_f(self):
        g = make_grid(2, 64)
        gf = band_field(g, seed=2, band=6)
        f = Field(g, np.full(g.shape, 1.5))
        lhs, rhs = commutator_check(gf, f, 3)
        # S_k(g*c) - g*S_k(c) = c * S_k g for k >= 0
        sk_g = lp_project(gf, 3)
        expected = 1.5 * float(np.sqrt(np.mean(sk_g.values**2)))
        assert abs(lhs - expected) < 1e-12
        assert lhs <= rhs

    def test_corpus_inequality(self):
        g = make_grid(2, 64)
        rng = np.random.default_rng(9)
        for case in range(100):
            gf = band_field(g, seed=5000 + case, band=8)
            f = band_field(g, seed=6000 + case, band=20)
            k = int(rng.integers(0, 6))
            lhs, rhs = commutator_check(gf, f, k)
            assert lhs <= rhs, f"case {case}: lhs={lhs} rhs={rhs} k={k}"

    def test_alias_warning(self):
        g = make_grid(2, 32)
        gf = band_field(g, seed=3, band=10)
        f = band_field(g, seed=4, band=10)
        with pytest.warns(AliasWarning):
            commutator_check(gf, f, 2)
