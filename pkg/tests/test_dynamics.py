import numpy as np
import pytest

from tpmaser import (
    AtomPrep,
    FockSpace,
    LeakageExceeded,
    ModelParams,
    apply_atom,
    block_unitary,
    full_unitary,
    kraus_pair,
    rabi_frequencies,
    recursion_oracle,
    thermal_state,
    unitary_exponential_oracle,
)
from tpmaser.dynamics import atom_exit_state

SP32 = FockSpace(32)
SP64 = FockSpace(64)


def params(chi=1.0, delta=1.0, eps=0.0, tau=8.9, space=SP32):
    return ModelParams(chi_over_lambda=chi, delta_over_lambda=delta,
                       eps=eps, tau=tau, space=space)


class TestAtomPrep:
    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            AtomPrep(1.0, 1.0)
        with pytest.raises(ValueError):
            AtomPrep(0.5, 0.5)
        AtomPrep(np.sqrt(0.5), np.sqrt(0.5), phi=0.3)

    def test_range_enforced(self):
        with pytest.raises(ValueError):
            AtomPrep(-0.6, 0.8)


class TestRabiFrequencies:
    def test_resonant_vacuum(self):
        rf = rabi_frequencies(params(chi=0.0, delta=0.0))
        assert rf.gamma[0] == pytest.approx(np.sqrt(2.0), abs=1e-15)
        assert rf.epsilon[0] == 0.0

    def test_unit_ratios(self):
        rf = rabi_frequencies(params(chi=1.0, delta=1.0))
        assert rf.gamma[0] == pytest.approx(np.sqrt(4.25), abs=1e-15)
        assert rf.epsilon[2] == pytest.approx(np.sqrt(4.25), abs=1e-15)

    def test_invariants(self):
        rf = rabi_frequencies(params(chi=0.7, delta=-1.3))
        assert np.all(rf.gamma > 0)
        assert np.all(rf.epsilon >= 0)
        # the sqrt(n(n-1)) term vanishes on the dark levels
        for n in (0, 1):
            bare = abs(-1.3 / 2 + 0.7 * (n - 1))
            assert rf.epsilon[n] == pytest.approx(bare, abs=1e-15)


class TestBlockUnitary:
    def test_zero_time_is_identity(self):
        u = block_unitary(params(tau=0.0))
        assert np.max(np.abs(u.matrix - np.eye(64))) == 0.0

    def test_resonant_half_period_swaps_vacuum_block(self):
        # gamma_0 = sqrt(2) at chi = delta = 0; a quarter rotation moves
        # |e,0> fully to |g,2>
        tau = (np.pi / 2) / np.sqrt(2.0)
        u = block_unitary(params(chi=0.0, delta=0.0, tau=tau))
        d = SP32.dim
        assert abs(u.matrix[d + 2, 0]) == pytest.approx(1.0, abs=1e-14)
        assert abs(u.matrix[0, 0]) == pytest.approx(0.0, abs=1e-14)

    def test_matches_exponential_oracle_random_draws(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(100):
            p = params(chi=float(rng.uniform(-2, 2)),
                       delta=float(rng.uniform(-4, 4)),
                       tau=float(rng.uniform(0, 12)))
            dev = np.max(np.abs(block_unitary(p).matrix
                                - unitary_exponential_oracle(p).matrix))
            worst = max(worst, dev)
        assert worst <= 1e-10

    def test_exactly_unitary(self):
        u = block_unitary(params(tau=8.9))
        assert u.unitarity_defect() <= 1e-13

    def test_oracle_unitarity(self):
        u = unitary_exponential_oracle(params(tau=8.9))
        assert u.unitarity_defect() <= 1e-11

    def test_two_photon_selection_rule(self):
        u = block_unitary(params(tau=3.3)).matrix
        d = SP32.dim
        ueg = u[:d, d:]
        mask = np.ones_like(ueg, dtype=bool)
        idx = np.arange(d - 2)
        mask[idx, idx + 2] = False
        assert np.max(np.abs(ueg[mask])) == 0.0


class TestFullUnitary:
    def test_no_drive_reduces_to_block_unitary(self):
        p = params(eps=0.0, tau=5.1)
        assert np.array_equal(full_unitary(p).matrix, block_unitary(p).matrix)

    def test_zero_time_identity_on_safe_block(self):
        p = params(eps=1.0, tau=0.0, space=SP64)
        u = full_unitary(p).matrix
        idx = np.r_[0:40, 64:104]
        assert np.max(np.abs(u[np.ix_(idx, idx)] - np.eye(80))) <= 1e-8

    def test_unitarity_defect_confined_to_top_levels(self):
        p = params(eps=1.0, tau=8.9, space=SP64)
        assert full_unitary(p).unitarity_defect(field_dim=40) <= 1e-7


class TestKrausChannel:
    def test_zero_time_kraus_are_scaled_identities(self):
        atom = AtomPrep(0.8, 0.6, phi=0.4)
        k = kraus_pair(params(eps=0.0, tau=0.0), atom)
        assert np.allclose(k.k_e, 0.8 * np.exp(0.4j) * np.eye(32), atol=1e-15)
        assert np.allclose(k.k_g, 0.6 * np.eye(32), atol=1e-15)

    def test_identity_channel_at_zero_time(self):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
        m = m @ m.conj().T
        m /= np.trace(m).real
        rho = thermal_state(1.0, SP32)
        rho = type(rho)(SP32, m)
        k = kraus_pair(params(eps=0.0, tau=0.0), AtomPrep(1.0, 0.0))
        out = apply_atom(rho, k)
        assert np.max(np.abs(out.matrix - rho.matrix)) <= 1e-12

    @pytest.mark.parametrize("eps,space", [(0.5, SP64), (1.0, SP64), (2.0, SP64)])
    def test_completeness_on_safe_block(self, eps, space):
        k = kraus_pair(params(eps=eps, tau=8.9, space=space), AtomPrep(1.0, 0.0))
        assert k.completeness_defect(k.safe_dim()) <= 1e-6

    def test_undriven_excited_channel_preserves_diagonality(self):
        rho = thermal_state(5.0, SP64)
        k = kraus_pair(params(eps=0.0, tau=8.9, space=SP64), AtomPrep(1.0, 0.0))
        out = apply_atom(rho, k)
        off = out.matrix - np.diag(out.matrix.diagonal())
        assert np.max(np.abs(off)) <= 1e-12

    def test_channel_output_is_physical(self):
        rho = thermal_state(5.0, SP64)
        k = kraus_pair(params(eps=1.0, tau=8.9, space=SP64), AtomPrep(1.0, 0.0))
        out, leak = apply_atom(rho, k, return_leakage=True)
        assert abs(out.trace() - 1.0) <= 1e-12
        assert out.hermiticity_defect() <= 1e-12
        assert out.min_eigenvalue() >= -1e-9
        assert 0 <= leak < 1e-3

    @pytest.mark.parametrize("tau", [2.0, 8.9, 12.0])
    def test_trace_preserved_for_states_inside_safe_block(self, tau):
        # the one-step trace drift is pure displacement-truncation damage, so
        # it vanishes for states whose (displaced, pumped) support stays
        # inside the safe block
        k = kraus_pair(params(eps=1.0, tau=tau, space=SP64), AtomPrep(1.0, 0.0))
        m = thermal_state(5.0, SP64).matrix.copy()
        cut = k.safe_dim() - 10
        m[cut:, cut:] = 0.0
        m /= np.trace(m).real
        out = k.k_e @ m @ k.k_e.conj().T + k.k_g @ m @ k.k_g.conj().T
        assert abs(np.trace(out).real - 1.0) <= 1e-6

    def test_leakage_guard_trips_on_undersized_cutoff(self):
        sp = FockSpace(16)
        rho = thermal_state(1.0, sp)
        k = kraus_pair(params(eps=2.0, tau=8.9, space=sp), AtomPrep(1.0, 0.0))
        with pytest.raises(LeakageExceeded):
            for _ in range(40):
                rho = apply_atom(rho, k)

    def test_parity_covariance_single_step(self):
        rho = thermal_state(5.0, SP64)
        atom = AtomPrep(1.0, 0.0)
        plus = apply_atom(rho, kraus_pair(params(eps=1.0, tau=8.9, space=SP64), atom))
        minus = apply_atom(rho, kraus_pair(params(eps=-1.0, tau=8.9, space=SP64), atom))
        n = np.arange(64)
        signs = (-1.0) ** (n[:, None] - n[None, :])
        assert np.max(np.abs(minus.matrix - signs * plus.matrix)) <= 1e-10

    def test_dark_states_fixed_under_undriven_ground_atoms(self):
        atom = AtomPrep(0.0, 1.0)
        k = kraus_pair(params(eps=0.0, tau=7.7), atom)
        for level in (0, 1):
            m = np.zeros((32, 32), dtype=complex)
            m[level, level] = 1.0
            rho = thermal_state(0.0, SP32)
            rho = type(rho)(SP32, m)
            out = apply_atom(rho, k)
            assert np.max(np.abs(out.matrix - m)) <= 1e-14


class TestRecursionOracle:
    SP24 = FockSpace(24)

    @pytest.mark.parametrize("eps", [0.0, 0.5])
    @pytest.mark.parametrize("atom", [
        AtomPrep(1.0, 0.0),
        AtomPrep(np.sqrt(0.5), np.sqrt(0.5), 0.0),
        AtomPrep(np.sqrt(0.5), np.sqrt(0.5), np.pi / 2),
    ])
    def test_matches_kraus_channel(self, eps, atom):
        p = params(eps=eps, tau=8.9, space=self.SP24)
        rho = thermal_state(1.0, self.SP24)
        via_kraus = apply_atom(rho, kraus_pair(p, atom))
        via_recursion = recursion_oracle(rho, p, atom)
        assert np.max(np.abs(via_kraus.matrix - via_recursion.matrix)) <= 1e-9

    def test_matches_on_random_mixed_state(self):
        # random mixed state supported well below the cutoff
        rng = np.random.default_rng(31)
        sub = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        sub = sub @ sub.conj().T
        m = np.zeros((24, 24), dtype=complex)
        m[:10, :10] = sub / np.trace(sub).real
        rho = type(thermal_state(0.0, self.SP24))(self.SP24, m)
        p = params(chi=0.6, delta=-0.9, eps=0.5, tau=4.2, space=self.SP24)
        atom = AtomPrep(0.6, 0.8, 1.1)
        via_kraus = apply_atom(rho, kraus_pair(p, atom))
        via_recursion = recursion_oracle(rho, p, atom)
        assert np.max(np.abs(via_kraus.matrix - via_recursion.matrix)) <= 1e-9

    def test_undriven_excited_case_reduces_to_two_terms(self):
        # with b = 0 and eps = 0 only the stay-excited and emission terms
        # survive, so the undriven two-photon step keeps diagonals diagonal
        p = params(eps=0.0, tau=8.9, space=self.SP24)
        rho = thermal_state(1.0, self.SP24)
        out = recursion_oracle(rho, p, AtomPrep(1.0, 0.0))
        off = out.matrix - np.diag(out.matrix.diagonal())
        assert np.max(np.abs(off)) <= 1e-14


class TestAtomExitState:
    def test_zero_time_exit_state_is_injection_state(self):
        atom = AtomPrep(0.8, 0.6, phi=0.7)
        k = kraus_pair(params(eps=0.0, tau=0.0), atom)
        rho = thermal_state(1.0, SP32)
        rho_a = atom_exit_state(rho, k)
        vec = np.array([0.8 * np.exp(0.7j), 0.6])
        assert np.max(np.abs(rho_a - np.outer(vec, vec.conj()))) <= 1e-12

    def test_exit_state_is_physical(self):
        k = kraus_pair(params(eps=1.0, tau=8.9, space=SP64), AtomPrep(1.0, 0.0))
        rho_a = atom_exit_state(thermal_state(5.0, SP64), k)
        assert abs(np.trace(rho_a).real - 1.0) <= 1e-12
        assert np.max(np.abs(rho_a - rho_a.conj().T)) <= 1e-12
        purity = float(np.trace(rho_a @ rho_a).real)
        assert 0.5 - 1e-9 <= purity <= 1.0 + 1e-9
