import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import eig_spectrum, epr, random_physical, random_symplectic
from multient.gaussian import (
    AsymmetricCovarianceError,
    Covariance,
    ModePartition,
    covariance_from_json,
    covariance_to_json,
    enumerate_bipartitions,
    global_mirror,
    log_negativity,
    parse_partition,
    passive_symplectic,
    partial_transpose,
    ppt_report,
    symplectic_form,
    symplectic_spectrum,
    validate_covariance,
)


class TestSymplecticForm:
    def test_single_mode(self):
        np.testing.assert_array_equal(symplectic_form(1), [[0, 1], [-1, 0]])

    @pytest.mark.parametrize("n", [1, 2, 3, 7])
    def test_identities(self, n):
        om = symplectic_form(n)
        np.testing.assert_array_equal(om @ om, -np.eye(2 * n))
        np.testing.assert_array_equal(om.T, -om)
        np.testing.assert_array_equal(om.T @ om, np.eye(2 * n))

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_rejects_bad_mode_count(self, bad):
        with pytest.raises(ValueError):
            symplectic_form(bad)


class TestValidate:
    def test_vacuum_saturates(self):
        rep = validate_covariance(np.eye(4))
        assert rep.physical and rep.symmetric
        assert rep.min_eig_of_V_plus_iOmega == pytest.approx(0.0, abs=1e-14)

    def test_half_vacuum_unphysical(self):
        rep = validate_covariance(np.eye(4) / 2)
        assert not rep.physical
        assert rep.min_eig_of_V_plus_iOmega == pytest.approx(-0.5)

    def test_min_eig_matches_direct_eigensolve(self, rng):
        v, _ = random_physical(3, rng)
        direct = np.linalg.eigvalsh(v + 1j * symplectic_form(3))[0]
        assert validate_covariance(v).min_eig_of_V_plus_iOmega == pytest.approx(direct, abs=1e-12)

    def test_rejects_asymmetric(self):
        v = np.eye(2)
        v[0, 1] = 1e-6
        with pytest.raises(AsymmetricCovarianceError) as info:
            validate_covariance(v)
        assert info.value.max_asymmetry == pytest.approx(1e-6)

    def test_tiny_asymmetry_tolerated_but_flagged(self):
        v = np.eye(2)
        v[0, 1] = 1e-11
        rep = validate_covariance(v)
        assert rep.physical and not rep.symmetric

    @pytest.mark.parametrize("shape", [(3, 3), (2, 4), (4,)])
    def test_rejects_bad_shape(self, shape):
        with pytest.raises(ValueError):
            validate_covariance(np.ones(shape))


class TestSpectrum:
    def test_vacuum(self):
        np.testing.assert_allclose(symplectic_spectrum(np.eye(10)), np.ones(5), atol=1e-14)

    @pytest.mark.parametrize("sigma", [1e-3, 0.5, 7.0])
    def test_single_mode_squeezed_is_pure(self, sigma):
        assert symplectic_spectrum(np.diag([sigma, 1 / sigma]))[0] == pytest.approx(1.0, abs=1e-12)

    def test_epr_is_pure(self):
        np.testing.assert_allclose(symplectic_spectrum(epr(1.0)), [1, 1], atol=1e-12)

    def test_thermal(self):
        np.testing.assert_allclose(symplectic_spectrum(np.diag([3.0, 2.0, 3.0, 2.0])), [3, 2])

    def test_descending_and_matches_known_values(self, rng):
        for n in (1, 2, 4, 6):
            v, nu = random_physical(n, rng)
            spec = symplectic_spectrum(v)
            assert np.all(np.diff(spec) <= 0)
            np.testing.assert_allclose(spec, nu, rtol=1e-9)

    def test_agrees_with_eigensolver(self, rng):
        for _ in range(50):
            v, _ = random_physical(int(rng.integers(1, 6)), rng)
            np.testing.assert_allclose(symplectic_spectrum(v), eig_spectrum(v), atol=1e-9)

    def test_invariant_under_symplectic_congruence(self, rng):
        v, nu = random_physical(3, rng)
        s = random_symplectic(3, rng)
        np.testing.assert_allclose(symplectic_spectrum(s @ v @ s.T), symplectic_spectrum(v), atol=1e-9)

    def test_factor_and_matrix_routes_agree(self, rng):
        s = random_symplectic(3, rng)
        cov = Covariance.from_factor(s)
        np.testing.assert_allclose(symplectic_spectrum(cov), symplectic_spectrum(cov.matrix), atol=1e-9)

    @pytest.mark.parametrize("r", [4.0, 8.0])
    def test_factor_keeps_strong_squeezing_accurate(self, r):
        # EPR pair as a 50:50 mixer on opposite squeezers; its PT spectrum is
        # exactly {e^{2r}, e^{-2r}}
        bs = passive_symplectic(np.array([[1, 1], [1, -1]]) / math.sqrt(2))
        cov = Covariance.from_factor(bs @ np.diag(np.exp([r, -r, -r, r])))
        got = symplectic_spectrum(partial_transpose(cov, ModePartition(2, [1])))
        np.testing.assert_allclose(got, [math.exp(2 * r), math.exp(-2 * r)], rtol=1e-9)

    def test_not_positive_definite(self):
        with pytest.raises(ValueError):
            symplectic_spectrum(np.diag([1.0, -1.0]))


class TestPartition:
    def test_canonical_form_is_shared_with_complement(self):
        assert ModePartition(4, [2, 3, 4]) == ModePartition(4, [1])
        assert ModePartition(4, [2, 4]) == ModePartition(4, [1, 3])
        assert ModePartition(3, [1, 2]).alice == (3,)

    def test_labels(self):
        assert ModePartition(4, [3, 1]).label == "{1,3}"
        assert ModePartition(4, [1, 3]).bob == (2, 4)

    @pytest.mark.parametrize("alice", [[], [1, 2, 3], [0], [4]])
    def test_rejects_improper(self, alice):
        with pytest.raises(ValueError):
            ModePartition(3, alice)

    @pytest.mark.parametrize("label", ["1,3", "{1,3}", "P13", "p13", " {3,1} ", "2,4"])
    def test_parse(self, label):
        assert parse_partition(label, 4) == ModePartition(4, [1, 3])

    def test_parse_garbage(self):
        with pytest.raises(ValueError):
            parse_partition("one", 4)

    def test_four_mode_list(self):
        assert [p.label for p in enumerate_bipartitions(4)] == [
            "{1}", "{2}", "{3}", "{4}", "{1,2}", "{1,3}", "{1,4}"
        ]

    @pytest.mark.parametrize("n", range(2, 11))
    def test_counts_without_duplicates(self, n):
        parts = enumerate_bipartitions(n)
        assert len(parts) == 2 ** (n - 1) - 1
        cuts = {frozenset([frozenset(p.alice), frozenset(p.bob)]) for p in parts}
        assert len(cuts) == len(parts)

    def test_too_few_modes(self):
        with pytest.raises(ValueError):
            enumerate_bipartitions(1)


class TestPartialTranspose:
    def test_involution_is_bit_exact(self, rng):
        v, _ = random_physical(4, rng)
        for p in enumerate_bipartitions(4):
            np.testing.assert_array_equal(partial_transpose(partial_transpose(v, p), p), v)

    def test_vacuum_invariant(self):
        for p in enumerate_bipartitions(3):
            np.testing.assert_array_equal(partial_transpose(np.eye(6), p), np.eye(6))

    def test_global_mirror_keeps_spectrum(self, rng):
        v, _ = random_physical(3, rng)
        np.testing.assert_allclose(symplectic_spectrum(global_mirror(v)), symplectic_spectrum(v), atol=1e-9)

    def test_epr_spectrum(self):
        pt = partial_transpose(epr(1.0), ModePartition(2, [1]))
        np.testing.assert_allclose(symplectic_spectrum(pt), [math.e**2, math.e**-2], rtol=1e-12)
        np.testing.assert_allclose(eig_spectrum(pt), [math.e**2, math.e**-2], rtol=1e-12)

    def test_mode_count_mismatch(self):
        with pytest.raises(ValueError):
            partial_transpose(np.eye(4), ModePartition(3, [1]))


class TestPPTReport:
    def test_vacuum_undecided(self):
        rep = ppt_report(np.eye(4), ModePartition(2, [1]))
        assert rep.verdict == "undecided" and rep.log_negativity == 0 and rep.nu_product == 1

    def test_epr(self):
        rep = ppt_report(epr(0.5), ModePartition(2, [1]))
        assert rep.entangled
        assert rep.sub_unity[0] == pytest.approx(math.exp(-1))
        assert rep.log_negativity == pytest.approx(1 / math.log(2))

    def test_product_state_undecided(self, rng):
        sq = np.diag([4.0, 4.0, 0.25, 0.25])
        assert not ppt_report(sq, ModePartition(2, [1])).entangled

    def test_log_negativity_definition(self):
        assert log_negativity([0.5, 0.25]) == pytest.approx(3.0)
        assert log_negativity([]) == 0.0

    def test_to_dict_is_json(self):
        d = ppt_report(epr(0.3), ModePartition(2, [1])).to_dict()
        assert json.loads(json.dumps(d))["partition"] == "{1}"


class TestJson:
    def test_round_trip_is_exact(self, rng):
        v, _ = random_physical(3, rng)
        text = json.dumps(covariance_to_json(v))
        back = covariance_from_json(json.loads(text))
        np.testing.assert_array_equal(back.matrix, v)

    def test_flat_entries(self):
        obj = {"n_modes": 1, "ordering": "xxyy", "entries": [2.0, 0.0, 0.0, 0.5]}
        np.testing.assert_array_equal(covariance_from_json(obj).matrix, np.diag([2.0, 0.5]))

    def test_rejects_interleaved(self):
        with pytest.raises(ValueError):
            covariance_from_json({"n_modes": 1, "ordering": "xyxy", "entries": [[1, 0], [0, 1]]})

    def test_rejects_wrong_size(self):
        with pytest.raises(ValueError):
            covariance_from_json({"n_modes": 2, "entries": [[1, 0], [0, 1]]})


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 5),
    seed=st.integers(0, 2**32 - 1),
    squeeze=st.floats(0.0, 2.0),
)
def test_random_states_are_physical_and_spectra_agree(n, seed, squeeze):
    rng = np.random.default_rng(seed)
    v, nu = random_physical(n, rng, squeeze)
    assert validate_covariance(v).physical
    spec = symplectic_spectrum(v)
    assert np.all(spec >= 1 - 1e-10)
    np.testing.assert_allclose(spec, nu, rtol=1e-8)
