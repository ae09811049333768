import math

import pytest

import addyn


def test_version():
    assert addyn.__version__ == "0.1.0"


def test_fitness_matches_closed_form():
    m = addyn.gaussian_example(sigma_alpha=1.0)
    assert m.bounds == (-2.0, 2.0)
    assert addyn.monomorphic_equilibrium(m, -1.0) == pytest.approx(math.exp(-1 / 1.62), rel=1e-14)
    expected = 1 - math.exp(-0.5) * math.exp(-1 / 1.62)
    assert addyn.fitness(m, 0.0, -1.0) == pytest.approx(expected, rel=1e-14)
    assert addyn.fitness(m, 0.3, 0.3) == 0.0


def test_singularity_verdicts():
    for sa, verdict in ((0.7, "branching"), (1.0, "attracting_no_branching")):
        found = addyn.find_singularities(addyn.gaussian_example(sigma_alpha=sa))
        assert len(found) == 1
        r = found[0]
        assert abs(r["x_star"]) < 1e-9
        assert r["a"] == pytest.approx(1 / sa**2 - 1 / 0.81, rel=1e-12)
        assert r["classification"] == verdict


def test_coexistence_and_pair_equilibrium():
    m = addyn.gaussian_example(sigma_alpha=0.7)
    assert addyn.coexist(m, [-0.3, 0.4])
    n1, n2 = addyn.dimorphic_equilibrium(m, -0.3, 0.4)
    assert n1 > 0 and n2 > 0


def test_simulations_are_seeded():
    m = addyn.gaussian_example(sigma_alpha=0.7, sigma=0.3, epsilon=0.1)
    a = addyn.simulate_pes(m, -1.0, 50.0, seed=3)
    b = addyn.simulate_pes(m, -1.0, 50.0, seed=3)
    assert a == b
    times, traits = addyn.simulate_tss(m, -1.0, 0.05, 20.0, seed=2)
    assert times[0] == 0.0 and traits[0] == -1.0
    t, x = addyn.solve_canonical(m, -1.0, 50.0, samples=10)
    assert len(t) == 11
    assert all(b >= a for a, b in zip(x, x[1:]))


def test_run_command(tmp_path):
    code, out, err = addyn.run_command("analyze", "[model]\nsigma_alpha = 0.7\n", str(tmp_path))
    assert code == 0
    assert '"verdict": "branching"' in out
    assert (tmp_path / "analyze.json").exists()
    code, _, err = addyn.run_command("analyze", "[model]\nnope = 1\n", str(tmp_path))
    assert code == 2
    assert err


def test_errors_are_python_exceptions():
    m = addyn.gaussian_example()
    with pytest.raises(ValueError):
        addyn.fitness(m, 2.5, 0.0)
