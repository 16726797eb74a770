import numpy as np
import pytest

from semcom.entropy import classical_entropy, message_entropy_classical
from semcom.errors import InvalidParameter
from semcom.kb import kb_mutual_information
from semcom.sources import (
    SpaceSpec,
    ZipfSource,
    random_space,
    synth_kb,
    zipf_index_variance,
    zipf_probs,
)


class TestZipfProbs:
    def test_flat_exponent_is_uniform(self):
        assert zipf_probs(5, 0.0) == pytest.approx([0.2] * 5)

    def test_harmonic_hand_values(self):
        assert zipf_probs(3, 1.0) == pytest.approx([6 / 11, 3 / 11, 2 / 11],
                                                   abs=1e-12)

    def test_large_exponent_degenerates(self):
        p = zipf_probs(16, 8.0)
        assert p[0] > 0.99

    def test_normalization_tolerance(self):
        for n in (1, 16, 64, 1000):
            assert abs(zipf_probs(n, 1.7).sum() - 1.0) < 1e-12

    def test_strictly_decreasing_for_positive_exponent(self):
        p = ZipfSource(64, 1.5).probs()
        assert np.all(np.diff(p) < 0)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameter):
            zipf_probs(0, 1.0)
        with pytest.raises(InvalidParameter):
            zipf_probs(4, -1.0)

    def test_entropy_decreases_along_sweep(self):
        for n in (16, 64):
            grid = np.arange(1.5, 4.01, 0.5)
            entropies = [classical_entropy(zipf_probs(n, a)) for a in grid]
            assert all(b < a for a, b in zip(entropies, entropies[1:]))
            variances = [zipf_index_variance(n, a) for a in grid]
            assert all(b < a for a, b in zip(variances, variances[1:]))


class TestRandomSpace:
    def test_same_seed_same_space(self):
        spec = SpaceSpec(2, (3, 4), "low", 42)
        a, b = random_space(spec), random_space(spec)
        assert [e.prob for e in a.entities] == [e.prob for e in b.entities]
        assert [e.coords for e in a.entities] == [e.coords for e in b.entities]

    def test_invariants_hold(self):
        space = random_space(SpaceSpec(3, (2, 3, 2), "high", 7))
        assert len(space.entities) == 12
        assert sum(e.prob for e in space.entities) == pytest.approx(1.0,
                                                                    abs=1e-9)
        # one-to-one correspondence by construction
        assert len(space.alphabet.elements) == len(space.entities)

    def test_variance_regimes_separate(self):
        def mean_sample_variance(mode):
            out = []
            for seed in range(100):
                space = random_space(SpaceSpec(2, (4, 4), mode, seed))
                out.append(np.var([e.prob for e in space.entities]))
            return float(np.mean(out))

        assert mean_sample_variance("high") > 4 * mean_sample_variance("low")

    def test_spec_validation(self):
        with pytest.raises(InvalidParameter):
            SpaceSpec(2, (3,), "low", 0)
        with pytest.raises(InvalidParameter):
            SpaceSpec(1, (0,), "low", 0)
        with pytest.raises(InvalidParameter):
            SpaceSpec(1, (2,), "medium", 0)


class TestSynthKb:
    def ids(self, n, tag="e"):
        return tuple(f"{tag}{i}" for i in range(n))

    def test_independent_when_rho_zero(self):
        marg = [(self.ids(4), [0.25] * 4), (self.ids(4, "f"), [0.4, 0.3,
                                                               0.2, 0.1])]
        ens, kb = synth_kb(marg, 0.0, 3)
        assert kb_mutual_information(ens, kb) == pytest.approx(0.0, abs=1e-12)

    def test_deterministic_bijection_gives_log_n(self):
        marg = [(self.ids(8), [1 / 8] * 8), (self.ids(8, "f"), [1 / 8] * 8)]
        ens, kb = synth_kb(marg, 1.0, 11)
        assert kb_mutual_information(ens, kb) == pytest.approx(3.0, abs=1e-9)

    def test_information_strictly_increasing_in_rho(self):
        marg = [(self.ids(5), zipf_probs(5, 1.0)),
                (self.ids(5, "f"), zipf_probs(5, 0.7))]
        values = []
        for rho in (0.0, 0.25, 0.5, 0.75, 1.0):
            ens, kb = synth_kb(marg, rho, 19)
            values.append(kb_mutual_information(ens, kb))
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_kb_matches_joint_exactly(self):
        marg = [(self.ids(3), [0.5, 0.3, 0.2]),
                (self.ids(3, "f"), [0.6, 0.3, 0.1]),
                (self.ids(2, "g"), [0.7, 0.3])]
        ens, kb = synth_kb(marg, 0.4, 23)
        for k in (1, 2):
            ctx = ens.prefix_mass(k)
            rows = kb.conditional_array(k)
            derived = ens.prefix_mass(k + 1) / ctx[..., None]
            assert np.abs(rows - derived).max() < 1e-12

    def test_joint_is_valid_and_seeded(self):
        marg = [(self.ids(4), [0.25] * 4)] * 3
        a, _ = synth_kb(marg, 0.6, 5)
        b, _ = synth_kb(marg, 0.6, 5)
        c, _ = synth_kb(marg, 0.6, 6)
        assert np.array_equal(a.joint, b.joint)
        assert not np.array_equal(a.joint, c.joint)
        assert message_entropy_classical(a) > 0

    def test_invalid_rho(self):
        with pytest.raises(InvalidParameter):
            synth_kb([(self.ids(2), [0.5, 0.5])], 1.5, 0)
        with pytest.raises(InvalidParameter):
            synth_kb([], 0.5, 0)
