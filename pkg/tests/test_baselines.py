import numpy as np
import pytest

from selcand.baselines import BASELINES, DE, ES, PSO, JADE, SHADE, LSHADE
from selcand.baselines.adaptive import (
    JADEParams,
    LSHADEParams,
    SHADEParams,
    improvement_weights,
    jade_generate,
    jade_update_params,
    lehmer_mean,
    lshade_population_size,
    sample_cauchy_F,
    shade_memory_update,
)
from selcand.baselines.base import PopulationTooSmall, distinct_indices
from selcand.baselines.de import DEParams, de_crossover_bin, de_mutate_rand1, de_select
from selcand.baselines.es import ESParams, es_init_sigma, es_mutate, es_recombine
from selcand.baselines.pso import PSOParams, pso_step_particle
from selcand.core import BudgetCounter, Individual, Unevaluated, make_rng
from selcand.bench.functions import rastrigin, sphere

from conftest import make_problem


class ReplayRng:
    """Hands out pre-recorded draws, to replay operators by hand."""

    def __init__(self, uniforms=(), integers=(), normals=()):
        self.u = list(uniforms)
        self.i = list(integers)
        self.n = list(normals)

    def random(self, size=None):
        return self._take(self.u, size)

    def integers(self, low, high=None, size=None):
        return self._take(self.i, size).astype(np.int64)

    def standard_normal(self, size=None):
        return self._take(self.n, size)

    def _take(self, src, size):
        k = int(np.prod(size)) if size is not None else 1
        out = np.array([src.pop(0) for _ in range(k)], dtype=float)
        return out.reshape(size) if size is not None else out[0]


# --- DE -----------------------------------------------------------------


def test_rand1_arithmetic():
    pop = np.array([[9.0, 9.0], [1.0, 1.0], [2.0, 2.0], [0.0, 0.0]])
    # indices avoid 0: draws 0,0,0 shift to 1,2,3
    v, r = de_mutate_rand1(pop, 0, 0.5, ReplayRng(integers=[0, 0, 0]), return_indices=True)
    assert r == (1, 2, 3)
    assert v.tolist() == [2.0, 2.0]


def test_rand1_zero_F_copies_base(rng):
    pop = rng.normal(size=(6, 3))
    v, r = de_mutate_rand1(pop, 2, 0.0, rng, return_indices=True)
    assert np.array_equal(v, pop[r[0]])
    assert 2 not in r and len(set(r)) == 3


def test_rand1_seeded_hand_trace():
    pop = make_rng(5).uniform(-1, 1, (5, 3))
    v, (r1, r2, r3) = de_mutate_rand1(pop, 1, 0.7, make_rng(8), return_indices=True)
    expected = [pop[r1][j] + 0.7 * (pop[r2][j] - pop[r3][j]) for j in range(3)]
    assert np.allclose(v, expected, rtol=0, atol=1e-15)


def test_rand1_needs_four():
    with pytest.raises(PopulationTooSmall):
        de_mutate_rand1(np.zeros((3, 2)), 0, 0.5, make_rng(0))


def test_crossover_cr_one_and_zero(rng):
    t, m = np.zeros(6), np.ones(6)
    assert np.array_equal(de_crossover_bin(t, m, 1.0, rng), m)
    u = de_crossover_bin(t, m, 0.0, rng)
    assert u.sum() == 1.0


def test_crossover_replayed_mask():
    # u <= 0.5 at j = 0, 2; j_rand = 3 forced
    rng = ReplayRng(uniforms=[0.1, 0.9, 0.5, 0.7], integers=[3])
    u = de_crossover_bin(np.zeros(4), np.ones(4), 0.5, rng)
    assert u.tolist() == [1.0, 0.0, 1.0, 1.0]


def test_crossover_seeded_mask_reproducible():
    a = de_crossover_bin(np.zeros(4), np.ones(4), 0.5, make_rng(3))
    b = de_crossover_bin(np.zeros(4), np.ones(4), 0.5, make_rng(3))
    assert np.array_equal(a, b)


def test_select_le_rule():
    t = Individual(np.zeros(2), 2.0)
    assert de_select(t, Individual(np.ones(2), 1.0)).fitness == 1.0
    tie = Individual(np.ones(2), 2.0)
    assert de_select(t, tie) is tie
    with pytest.raises(Unevaluated):
        de_select(t, Individual(np.ones(2)))


def test_de_params_validation():
    with pytest.raises(ValueError):
        DEParams(NP=3)
    with pytest.raises(ValueError):
        DEParams(CR=1.5)


# --- ES -----------------------------------------------------------------


def test_es_sigma_examples():
    X = np.array([[0.0, 0.0], [3.0, 4.0]])
    s = es_init_sigma(X, np.array([0.0, 1.0]))
    assert s[1] == pytest.approx([5 / np.sqrt(2)] * 2)
    assert np.all(s[0] == 1e-12)
    X9 = np.zeros((2, 9))
    X9[1, 0] = 3.0
    assert es_init_sigma(X9, np.array([0.0, 1.0]))[1, 0] == pytest.approx(1.0)


def test_es_recombine_midpoint_and_identity():
    p = ESParams(mu=2, lam=4)
    X = np.array([[0.0], [2.0]])
    x, s, i, j = es_recombine(X, np.ones((2, 1)), make_rng(0), p)
    assert x.tolist() == [1.0] and {i, j} == {0, 1}
    same = np.array([[3.0], [3.0]])
    assert es_recombine(same, np.ones((2, 1)), make_rng(0), p)[0].tolist() == [3.0]


def test_es_recombine_seeded_hand_formula():
    p = ESParams(mu=4, lam=8, chi=0.5)
    X = make_rng(2).normal(size=(4, 3))
    x, _, i, j = es_recombine(X, np.ones((4, 3)), make_rng(4), p)
    assert i != j
    assert np.allclose(x, [X[i][k] + 0.5 * (X[j][k] - X[i][k]) for k in range(3)])


def test_es_mutate_zero_tau_keeps_sigma():
    p = ESParams(tau=0.0, tau_prime=0.0)
    x, s = es_mutate(np.zeros(3), np.full(3, 0.3), make_rng(0), p)
    assert np.array_equal(s, np.full(3, 0.3))


def test_es_mutate_replayed_normals():
    p = ESParams(tau=0.5, tau_prime=0.2)
    rng = ReplayRng(normals=[1.0, 0.0, 2.0, 0.5, -1.0])
    x, s = es_mutate(np.array([1.0, 1.0]), np.array([1.0, 2.0]), rng, p)
    s_hand = [1.0 * np.exp(0.2 * 1.0 + 0.5 * 0.0), 2.0 * np.exp(0.2 * 1.0 + 0.5 * 2.0)]
    assert np.allclose(s, s_hand)
    assert np.allclose(x, [1.0 + s_hand[0] * 0.5, 1.0 - s_hand[1]])


def test_es_sigma_positive_after_mutation():
    x, s = es_mutate(np.zeros(10), np.full(10, 1e-3), make_rng(1), ESParams())
    assert np.all(s > 0)


def test_es_params_validation():
    with pytest.raises(ValueError):
        ESParams(mu=10, lam=10)
    with pytest.raises(ValueError):
        ESParams(chi=1.0)


# --- PSO ----------------------------------------------------------------


def _particle(x, v, pbest):
    return Individual(np.asarray(x, float), 0.0, {"velocity": np.asarray(v, float), "pbest": np.asarray(pbest, float)})


def test_pso_inertia_only():
    p = PSOParams(w=1.0, c1=0.0, c2=0.0)
    v, x = pso_step_particle(_particle([1, 2], [0.5, -1], [0, 0]), np.zeros(2), p, make_rng(0))
    assert v.tolist() == [0.5, -1.0] and x.tolist() == [1.5, 1.0]


def test_pso_zero_attraction():
    p = PSOParams(w=0.9)
    v, _ = pso_step_particle(_particle([1, 2], [1, 1], [1, 2]), np.array([1.0, 2.0]), p, make_rng(0))
    assert np.allclose(v, [0.9, 0.9])


def test_pso_replayed_draws():
    p = PSOParams(w=0.5, c1=2.0, c2=2.0)
    rng = ReplayRng(uniforms=[0.25, 0.5, 0.1, 1.0])
    v, x = pso_step_particle(_particle([0, 0], [1, 2], [1, 1]), np.array([2.0, -2.0]), p, rng)
    v_hand = [0.5 * 1 + 2 * 0.25 * 1 + 2 * 0.1 * 2, 0.5 * 2 + 2 * 0.5 * 1 + 2 * 1.0 * -2]
    assert np.allclose(v, v_hand) and np.allclose(x, v_hand)


def test_pso_velocity_clamp():
    p = PSOParams(w=1.0, c1=0.0, c2=0.0)
    v, _ = pso_step_particle(_particle([0, 0], [5, -5], [0, 0]), np.zeros(2), p, make_rng(0), vmax=np.array([2.0, 2.0]))
    assert v.tolist() == [2.0, -2.0]


# --- adaptive DE ----------------------------------------------------------


def test_lehmer_hand_cases():
    assert lehmer_mean([0.2, 0.4]) == pytest.approx(1 / 3, abs=1e-15)
    assert lehmer_mean([0.5]) == 0.5
    assert lehmer_mean([1.0, 3.0], [0.25, 0.75]) == pytest.approx((0.25 + 6.75) / (0.25 + 2.25))


def test_jade_update_cases():
    assert jade_update_params(0.3, 0.6, [], []) == (0.3, 0.6)
    assert jade_update_params(0.3, 0.6, [0.5], [0.5], c=1.0) == (0.5, 0.5)
    mu_F, mu_CR = jade_update_params(0.5, 0.5, [0.2, 0.4], [0.1, 0.3], c=0.1)
    assert mu_F == pytest.approx(0.9 * 0.5 + 0.1 / 3)
    assert mu_CR == pytest.approx(0.9 * 0.5 + 0.1 * 0.2)


def test_cauchy_truncated_to_one():
    class BigCauchy:
        def standard_cauchy(self, shape):
            return np.full(shape, 50.0)

    assert sample_cauchy_F(BigCauchy(), np.array([0.5, 0.5])).tolist() == [1.0, 1.0]


def test_shade_memory_update_hand_case():
    M_F, M_CR = np.full(3, 0.5), np.full(3, 0.5)
    F, CR, k = shade_memory_update(M_F, M_CR, 1, [0.4], [0.8], [2.0])
    assert np.allclose(F, [0.5, 0.4, 0.5]) and np.allclose(CR, [0.5, 0.8, 0.5]) and k == 2
    # two successes weighted 1:3 by improvement
    F, CR, k = shade_memory_update(M_F, M_CR, 2, [0.2, 0.6], [0.4, 0.8], [1.0, 3.0])
    w = [0.25, 0.75]
    assert F[2] == pytest.approx((w[0] * 0.04 + w[1] * 0.36) / (w[0] * 0.2 + w[1] * 0.6))
    assert CR[2] == pytest.approx(0.25 * 0.4 + 0.75 * 0.8)
    assert k == 0


def test_shade_memory_no_success_and_single_cell():
    F, CR, k = shade_memory_update([0.5], [0.5], 0, [], [], [])
    assert (F.tolist(), CR.tolist(), k) == ([0.5], [0.5], 0)
    F, CR, k = shade_memory_update([0.5], [0.5], 0, [0.7], [0.9], [1.0])
    assert (F.tolist(), CR.tolist(), k) == ([0.7], [0.9], 0)


def test_lshade_terminal_cr():
    _, CR, _ = shade_memory_update([0.5], [0.5], 0, [0.7], [0.0], [1.0], lehmer_cr=True)
    assert np.isnan(CR[0])


def test_improvement_weights():
    assert improvement_weights([1.0, 3.0]).tolist() == [0.25, 0.75]


def test_lshade_sizes():
    assert lshade_population_size(180, 4, 0, 1000) == 180
    assert lshade_population_size(180, 4, 1000, 1000) == 4
    assert lshade_population_size(180, 4, 500, 1000) == 92
    assert LSHADEParams().initial_size(10) == 180


def test_jade_generate_greediest_and_replay():
    rng_pop = make_rng(11)
    X = rng_pop.uniform(-1, 1, (10, 4))
    fit = np.sum(X**2, axis=1)
    best = int(np.argmin(fit))
    i = (best + 1) % 10
    # p * NP = 0.05 * 10 rounds to 1, so pbest is the single best individual
    seed = 21
    u, cp = jade_generate(X, fit, np.empty((0, 4)), i, 0.5, 0.5, 0.05, make_rng(seed), -5.0, 5.0)
    assert 0 < cp["F"] <= 1 and 0 <= cp["CR"] <= 1
    # replay the same draws by hand
    r = make_rng(seed)
    CR = min(max(0.5 + 0.1 * r.standard_normal(1)[0], 0.0), 1.0)
    F = 0.5 + 0.1 * r.standard_cauchy(1)[0]
    while F <= 0:
        F = 0.5 + 0.1 * r.standard_cauchy(1)[0]
    F = min(F, 1.0)
    assert (cp["F"], cp["CR"]) == (F, CR)
    r.random()  # pbest slot, always 0 here
    r1, r2 = distinct_indices(r, 10, 1, np.array([i]))[0, 0], None
    r2 = distinct_indices(r, 10, 1, np.array([[i, r1]]))[0, 0]
    v = X[i] + F * (X[best] - X[i]) + F * (X[r1] - X[r2])
    mask = r.random((1, 4))[0] <= CR
    mask[r.integers(0, 4, size=1)[0]] = True
    assert np.array_equal(u, np.where(mask, v, X[i]))
    assert mask.any()


# --- whole-optimizer invariants -------------------------------------------


def _steps(cls, params, problem, seed=0, gens=30, limit=20_000):
    budget = BudgetCounter(problem, limit)
    opt = cls(problem, budget, make_rng(seed), params)
    opt.initialize()
    for _ in range(gens):
        if budget.exhausted:
            break
        before = opt.fit.copy() if cls is not PSO else (opt.pbest_fit.copy(), opt.gbest_fit)
        best_before = float(np.min(opt.fit)) if cls is ES else None
        opt.step()
        yield opt, before, best_before


@pytest.mark.parametrize("cls,params", [(DE, DEParams(NP=20)), (JADE, JADEParams(NP=20)), (SHADE, SHADEParams(NP=20))])
def test_de_family_elitism(cls, params):
    problem = make_problem(rastrigin, 5, 5.12)
    for opt, before, _ in _steps(cls, params, problem):
        assert np.all(opt.fit <= before)


def test_es_best_non_increasing():
    problem = make_problem(rastrigin, 5, 5.12)
    for opt, _, best_before in _steps(ES, ESParams(mu=5, lam=20), problem):
        assert np.min(opt.fit) <= best_before
        assert np.all(opt.sigma > 0)


def test_pso_pbest_gbest_non_increasing():
    problem = make_problem(rastrigin, 5, 5.12)
    for opt, (pb, gb), _ in _steps(PSO, PSOParams(), problem):
        assert np.all(opt.pbest_fit <= pb) and opt.gbest_fit <= gb
        assert opt.gbest_fit == np.min(opt.pbest_fit)


def test_lshade_shrinks_to_min():
    problem = make_problem(sphere, 5, 100.0)
    budget = BudgetCounter(problem, 3000)
    opt = LSHADE(problem, budget, make_rng(0), LSHADEParams())
    opt.run()
    assert budget.consumed == 3000
    assert len(opt.X) == 4
    assert len(opt.archive) <= round(2.6 * len(opt.X) + 0.5)


@pytest.mark.parametrize("name", list(BASELINES))
def test_every_baseline_uses_exact_budget(name):
    cls, params = BASELINES[name]
    problem = make_problem(sphere, 4, 10.0)
    budget = BudgetCounter(problem, 1234)
    cls(problem, budget, make_rng(3), params()).run()
    assert budget.consumed == 1234
    assert budget.best_fitness < 1e3


def test_distinct_indices_property():
    rng = make_rng(0)
    ex = np.arange(50) % 7
    out = distinct_indices(rng, 7, 3, ex)
    for row, e in zip(out, ex):
        assert len(set(row.tolist()) | {e}) == 4
        assert all(0 <= v < 7 for v in row)
