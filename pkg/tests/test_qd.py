import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import rankdata

from qdcirc.gates import GATE_SETS, CircuitGrid, GateKind, PlacedGate, decode_genome, get_gate_set
from qdcirc.pipeline import CircuitEvaluator
from qdcirc.problems import ProblemKind, build_hamiltonian, generate_graph, objective_bounds
from qdcirc.qd import Archive, CMAEmitter, Measures, Scheduler, compute_measures, grid_shape, make_emitters

TINY = get_gate_set("tiny")


def sphere_eval(genomes):
    return -np.sum(genomes**2, axis=1), np.zeros((len(genomes), 2), dtype=int)


# -- measures -----------------------------------------------------------------

def test_measures_empty_circuit():
    assert compute_measures(CircuitGrid.identity(8, 4), TINY) == Measures(0, 0)


def test_measures_all_rx():
    c = decode_genome(np.full(32, 0.3), TINY, 8, 4)
    assert compute_measures(c, TINY) == Measures(32, 4)


def test_measures_layer_diversity():
    layer = (
        PlacedGate(GateKind.RX, 0, angle=1.0),
        PlacedGate(GateKind.CNOT, 1, target=0),
        PlacedGate(GateKind.RX, 2, angle=2.0),
        PlacedGate(GateKind.IDENTITY, 3),
    )
    assert compute_measures(CircuitGrid(4, 1, (layer,)), TINY) == Measures(3, 2)


def test_x_fallback_counts_as_own_kind():
    layer = (PlacedGate(GateKind.X, 0), PlacedGate(GateKind.CNOT, 1, target=0), PlacedGate(GateKind.RX, 2, angle=0.1))
    assert compute_measures(CircuitGrid(3, 1, (layer,)), TINY).diversity == 3


def test_measures_reject_foreign_kinds():
    layer = (PlacedGate(GateKind.H, 0),)
    with pytest.raises(ValueError):
        compute_measures(CircuitGrid(1, 1, (layer,)), TINY)


def test_grid_shape():
    assert grid_shape(8, 4, TINY) == (33, 13)


# -- archive ------------------------------------------------------------------

def test_alpha_zero_freezes_threshold():
    a = Archive((3, 3), alpha=0.0)
    a.thresholds[1, 1] = 5.0
    r = a.add(np.zeros(2), 7.0, Measures(1, 1))
    assert r.accepted and r.improvement == 2.0
    assert a.thresholds[1, 1] == 5.0


def test_alpha_one_replaces_threshold():
    a = Archive((3, 3), alpha=1.0)
    a.thresholds[1, 1] = 5.0
    assert a.add(np.zeros(2), 7.0, Measures(1, 1)).accepted
    assert a.thresholds[1, 1] == 7.0


def test_annealing_arithmetic():
    a = Archive((3, 3), alpha=0.3, threshold_min=0.0)
    r = a.add(np.zeros(2), 10.0, Measures(0, 0))
    assert r.improvement == 10.0
    assert a.thresholds[0, 0] == pytest.approx(3.0)


def test_rejected_solution_still_reports_improvement():
    a = Archive((2, 2), alpha=1.0)
    a.add(np.zeros(1), 4.0, Measures(0, 0))
    r = a.add(np.ones(1), 1.5, Measures(0, 0))
    assert not r.accepted and r.improvement == pytest.approx(-2.5)
    assert a.elite(Measures(0, 0)).objective == 4.0


def test_archive_bounds_and_validation():
    a = Archive((2, 2), alpha=0.5)
    with pytest.raises(IndexError):
        a.add(np.zeros(1), 1.0, Measures(2, 0))
    with pytest.raises(ValueError):
        Archive((2, 2), alpha=1.5)


def test_qd_score_and_snapshot():
    a = Archive((4, 4), alpha=0.5, qd_offset=-1.0)
    a.add(np.zeros(1), 2.0, Measures(3, 2))
    a.add(np.zeros(1), 1.0, Measures(0, 1))
    assert a.qd_score == pytest.approx(3.0 + 2.0)
    snap = a.snapshot()
    assert [(r["sparsity"], r["diversity"]) for r in snap] == [(0, 1), (3, 2)]
    assert set(snap[0]) == {"sparsity", "diversity", "objective", "threshold"}


# -- emitter ------------------------------------------------------------------

def test_tiny_sigma_samples_equal_mean():
    em = CMAEmitter(np.arange(4.0), 1e-300, 6, np.random.default_rng(0))
    np.testing.assert_allclose(em.ask(), np.tile(np.arange(4.0), (6, 1)), rtol=0, atol=1e-290)


def test_sample_variance_identity_covariance():
    em = CMAEmitter(np.zeros(3), 1.0, 1000, np.random.default_rng(42))
    draws = np.concatenate([em.ask() for _ in range(100)])
    assert draws.shape == (100_000, 3)
    np.testing.assert_allclose(draws.var(axis=0), 1.0, rtol=0.05)


def test_ask_is_seeded():
    a = CMAEmitter(np.zeros(5), 0.7, 5, np.random.default_rng(9)).ask()
    b = CMAEmitter(np.zeros(5), 0.7, 5, np.random.default_rng(9)).ask()
    np.testing.assert_array_equal(a, b)


def test_default_weights():
    em = CMAEmitter(np.zeros(10), 1.0, 10, np.random.default_rng(0))
    assert em.mu == 5
    assert em.weights[:5].sum() == pytest.approx(1.0)
    assert np.all(np.diff(em.weights[:5]) < 0)
    assert np.all(em.weights[5:] <= 0)


def test_tell_all_ties_recombines_first_mu():
    em = CMAEmitter(np.zeros(2), 1.0, 4, np.random.default_rng(0))
    xs = np.array([[1.0, 0.0], [0.0, 1.0], [5.0, 5.0], [-5.0, -5.0]])
    em.tell(xs, np.zeros(4), np.zeros(4))
    np.testing.assert_allclose(em.mean, em.weights[0] * xs[0] + em.weights[1] * xs[1])


def test_tell_ranks_by_improvement_then_objective():
    em = CMAEmitter(np.zeros(1), 1.0, 4, np.random.default_rng(0))
    xs = np.array([[1.0], [2.0], [3.0], [4.0]])
    em.tell(xs, np.array([0.0, 1.0, 1.0, 0.5]), np.array([0.0, 1.0, 2.0, 0.0]))
    np.testing.assert_allclose(em.mean, em.weights[0] * 3.0 + em.weights[1] * 2.0)


def test_tell_shape_check():
    em = CMAEmitter(np.zeros(3), 1.0, 4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        em.tell(np.zeros((3, 3)), np.zeros(3))


def test_sigma_grows_on_correlated_steps():
    em = CMAEmitter(np.zeros(4), 0.1, 8, np.random.default_rng(1))
    for _ in range(10):
        xs = em.ask()
        f = xs[:, 0]  # linear slope: selected steps keep pointing the same way
        em.tell(xs, f, f)
    assert em.sigma > 0.1


def test_sphere_dimension_8():
    em = make_emitters(1, 8, 10, 0.5, (-1.0, 1.0), seed=0)
    sched = Scheduler(em, Archive((1, 1), 0.0), sphere_eval)
    for gen in range(300):
        sched.step()
        if np.linalg.norm(em[0].mean) <= 1e-3:
            break
    assert np.linalg.norm(em[0].mean) <= 1e-3


def test_covariance_stays_positive_definite():
    em = make_emitters(1, 6, 6, 0.5, (-1.0, 1.0), seed=3)
    sched = Scheduler(em, Archive((1, 1), 0.0), sphere_eval)
    for _ in range(100):
        sched.step()
        C = em[0].C
        np.testing.assert_allclose(C, C.T)
        assert np.linalg.eigvalsh(C).min() > 1e-12


def test_restart_empty_archive():
    em = CMAEmitter(np.zeros(6), 0.5, 4, np.random.default_rng(0), bounds=(0.0, 3.0))
    em.sigma = 0.01
    em.restart(Archive((2, 2), 0.5))
    assert np.all((em.mean >= 0) & (em.mean < 3))
    assert em.sigma == 0.5 and em.restarts == 1
    np.testing.assert_array_equal(em.C, np.eye(6))
    assert not em.ps.any() and not em.pc.any()


def test_restart_from_elite():
    a = Archive((3, 3), 0.5)
    genomes = [np.full(4, k, dtype=float) for k in range(3)]
    for k, g in enumerate(genomes):
        a.add(g, float(k), Measures(k, k))
    em = CMAEmitter(np.zeros(4), 0.5, 4, np.random.default_rng(0))
    em.restart(a)
    assert any(np.array_equal(em.mean, g) for g in genomes)


def test_numerical_failure_flags_restart():
    em = CMAEmitter(np.zeros(3), 0.5, 4, np.random.default_rng(0))
    em.C = np.diag([1.0, 1.0, -1.0])
    em._decompose()
    assert em.needs_restart


# -- scheduler ----------------------------------------------------------------

def _circuit_scheduler(seed, alpha=0.3):
    g = generate_graph("erdos_renyi", 6, rng=np.random.default_rng(0))
    h = build_hamiltonian(ProblemKind.MAXCUT, g)
    ev = CircuitEvaluator(h, TINY, 4)
    archive = Archive(grid_shape(6, 4, TINY), alpha)
    emitters = make_emitters(20, ev.dim, 5, 1.5, (0.0, 3.0), seed)
    return Scheduler(emitters, archive, ev)


def test_step_evaluates_emitters_times_batch():
    sched = _circuit_scheduler(0)
    assert sched.step().evaluations == 100
    assert sched.step().evaluations == 200


def test_step_is_deterministic():
    a = _circuit_scheduler(5).run(5)
    b = _circuit_scheduler(5).run(5)
    assert [r.best_objective for r in a] == [r.best_objective for r in b]
    assert [r.qd_score for r in a] == [r.qd_score for r in b]
    np.testing.assert_array_equal(a[-1].best_genome, b[-1].best_genome)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0])
def test_qd_score_and_best_non_decreasing(alpha):
    reports = _circuit_scheduler(1, alpha).run(15)
    qd = [r.qd_score for r in reports]
    best = [r.best_objective for r in reports]
    assert all(b >= a for a, b in zip(qd, qd[1:]))
    assert all(b >= a for a, b in zip(best, best[1:]))


def test_cma_me_restarts_on_stagnation():
    sched = _circuit_scheduler(2, alpha=1.0)
    reports = sched.run(20)
    assert reports[-1].restarts > 0


def test_evaluator_matches_pipeline():
    g = generate_graph("ladder", 3)
    h = build_hamiltonian(ProblemKind.MAXCUT, g)
    ev = CircuitEvaluator(h, GATE_SETS["rotcnot"], 2)
    genomes = np.random.default_rng(0).uniform(0, 5, (4, 12))
    f, m = ev(genomes)
    for k in range(4):
        fk, mk = ev.evaluate_one(genomes[k])
        assert f[k] == fk and tuple(m[k]) == tuple(mk)
    assert math.isfinite(f.sum())


# -- properties ---------------------------------------------------------------

objective_values = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 1.0), st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), objective_values), min_size=1, max_size=60))
def test_archive_monotone_properties(alpha, stream):
    a = Archive((3, 3), alpha, threshold_min=-1e6, qd_offset=-1e6)
    qd, best = a.qd_score, -math.inf
    for s, d, f in stream:
        before = a.thresholds[s, d]
        r = a.add(np.zeros(1), f, Measures(s, d))
        assert a.thresholds[s, d] >= before
        assert r.accepted == (f > before)
        if alpha == 1.0 and r.accepted:
            assert a.thresholds[s, d] == f
        assert a.qd_score >= qd
        qd = a.qd_score
        cur = a.best().objective if len(a) else -math.inf
        assert cur >= best
        best = cur


def test_alpha_zero_improvement_ranks_match_objective_ranks():
    # 10^4 random batches: with a frozen threshold, ranking by improvement within
    # one cell equals ranking by objective
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        a = Archive((1, 1), 0.0, threshold_min=float(rng.normal()))
        f = rng.normal(size=6)
        delta = [a.add(np.zeros(1), x, Measures(0, 0)).improvement for x in f]
        np.testing.assert_array_equal(rankdata(delta), rankdata(f))


def test_measures_within_bounds_random_genomes():
    rng = np.random.default_rng(1)
    for gs in GATE_SETS.values():
        for _ in range(2_500):
            n, L = int(rng.integers(1, 9)), int(rng.integers(1, 5))
            c = decode_genome(rng.uniform(-1, len(gs) + 1, n * L), gs, n, L)
            m = compute_measures(c, gs)
            assert 0 <= m.sparsity <= n * L
            assert 0 <= m.diversity <= L * gs.max_layer_diversity(n) <= L * len(gs)
            assert m.sparsity >= m.diversity
            rows, cols = grid_shape(n, L, gs)
            assert m.sparsity < rows and m.diversity < cols


@pytest.mark.parametrize("problem", list(ProblemKind))
def test_objective_within_bounds_random_circuits(problem):
    rng = np.random.default_rng(2)
    g = generate_graph("erdos_renyi", 5, rng=rng)
    h = build_hamiltonian(problem, g)
    lo, hi = objective_bounds(problem, g)
    ev = CircuitEvaluator(h, GATE_SETS["rotcnot"], 3)
    f, _ = ev(rng.uniform(0, 5, (2_500, ev.dim)))
    assert np.all(f >= lo - 1e-9) and np.all(f <= hi + 1e-9)
