import numpy as np

from qslkit import channels, validation


def test_random_density_is_a_state(rng):
    for rank in (1, 2, 4):
        rho = validation.random_density(rng, 4, rank)
        w = np.linalg.eigvalsh(rho)
        assert abs(np.trace(rho) - 1) < 1e-12 and w.min() > -1e-12
        assert np.sum(w > 1e-10) == rank


def test_filter_selects_by_substring():
    names = [p.name for p in validation.select("norms")]
    assert names == ["norms.chain", "qsl.norms_monotonicity"]
    assert len(validation.select(None)) == len(validation.PROPERTIES)
    assert validation.select("nothing-matches") == []


def test_fast_subset_passes():
    results, _ = validation.run_suite("hermitian,states,channels,nonmarkov")
    assert results and all(r.ok for r in results), [r for r in results if not r.ok]


def test_mutation_is_caught_and_undone():
    original = channels.decoherence_function
    results, _ = validation.run_suite("channels.p_consistency", mutate="pt-sign")
    assert [r.ok for r in results] == [False]
    assert channels.decoherence_function is original
    results, _ = validation.run_suite("channels.p_consistency")
    assert [r.ok for r in results] == [True]


def test_closed_form_flags_are_informational():
    results, flags = validation.run_suite("qsl.closed_forms")
    assert results[0].ok
    assert flags and all(f.startswith("printed form of") for f in flags)
