import itertools

import numpy as np
import pytest

from repairroute.bound import shortest_distances
from repairroute.core import cost1, standard_trp_cost
from repairroute.trp import (
    naive_route,
    solve_weighted_trp_bruteforce,
    solve_weighted_trp_dp,
)

from conftest import random_instance


def enumerate_routes(M):
    for tail in itertools.permutations(range(2, M + 1)):
        yield [1] + list(tail)


class TestDp:
    def test_two_node_closed_form(self):
        D = np.array([[0.0, 3.0], [7.0, 0.0]])
        w = [0.3, 0.8]
        sol = solve_weighted_trp_dp(w, D)
        assert sol.route == [1, 2]
        assert sol.cost == pytest.approx(0.8 * 3.0 + 0.3 * (3.0 + 7.0), rel=1e-14)

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        M = int(rng.integers(4, 8))
        w, D = random_instance(seed, M)
        a = solve_weighted_trp_dp(w, D)
        b = solve_weighted_trp_bruteforce(w, D)
        assert a.route == b.route
        assert a.cost == b.cost  # identical routes, identically recomputed cost

    @pytest.mark.parametrize("seed", range(15))
    def test_self_certifying_optimality(self, seed):
        w, D = random_instance(seed, 6)
        sol = solve_weighted_trp_dp(w, D)
        for route in enumerate_routes(6):
            assert sol.cost <= cost1(route, w, D) + 1e-9

    @pytest.mark.parametrize("seed", range(20))
    def test_equal_weights_reduce_to_plain_repairman(self, seed):
        rng = np.random.default_rng(seed)
        M = int(rng.integers(4, 7))
        _, D = random_instance(seed, M)
        p = float(rng.uniform(0.05, 1.0))
        sol = solve_weighted_trp_dp(np.full(M, p), D)
        best_plain = min(standard_trp_cost(r, D) for r in enumerate_routes(M))
        assert sol.cost == pytest.approx(p * best_plain, rel=1e-12)

    def test_unit_distance_tie_breaks_lexicographic(self):
        M = 5
        D = np.ones((M, M)) - np.eye(M)
        w = np.full(M, 0.4)  # every route ties exactly
        assert solve_weighted_trp_dp(w, D).route == [1, 2, 3, 4, 5]
        assert solve_weighted_trp_bruteforce(w, D).route == [1, 2, 3, 4, 5]

    @pytest.mark.parametrize("seed", range(10))
    def test_cost_matches_recomputation(self, seed):
        w, D = random_instance(seed, 7)
        sol = solve_weighted_trp_dp(w, D)
        assert sol.cost == pytest.approx(cost1(sol.route, w, D), rel=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_weight_and_distance_scaling(self, seed):
        w, D = random_instance(seed, 5)
        base = solve_weighted_trp_dp(w, D)
        assert solve_weighted_trp_dp(3.0 * w, D).cost == pytest.approx(
            3.0 * base.cost, rel=1e-12
        )
        assert solve_weighted_trp_dp(w, 2.0 * D).cost == pytest.approx(
            2.0 * base.cost, rel=1e-12
        )

    @pytest.mark.parametrize("seed", range(10))
    def test_relabeling_symmetry(self, seed):
        # Renaming the non-start nodes must not change the optimal cost.
        rng = np.random.default_rng(seed)
        w, D = random_instance(seed, 6)
        perm = np.concatenate(([0], rng.permutation(np.arange(1, 6))))
        w2 = w[perm]
        D2 = D[np.ix_(perm, perm)]
        assert solve_weighted_trp_dp(w2, D2).cost == pytest.approx(
            solve_weighted_trp_dp(w, D).cost, rel=1e-12
        )

    @pytest.mark.parametrize("seed", range(15))
    def test_shortest_distance_lower_bound(self, seed):
        w, D = random_instance(seed, 6)
        sol = solve_weighted_trp_dp(w, D)
        floor = float(w @ shortest_distances(D))
        assert sol.cost >= floor - 1e-9

    def test_rejects_oversized(self):
        M = 21
        D = np.ones((M, M)) - np.eye(M)
        with pytest.raises(ValueError):
            solve_weighted_trp_dp(np.ones(M), D)
        with pytest.raises(ValueError):
            solve_weighted_trp_bruteforce(np.ones(11), np.ones((11, 11)) - np.eye(11))

    def test_rejects_negative_weights(self):
        D = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError):
            solve_weighted_trp_dp([-0.1, 1.0], D)


class TestBruteForce:
    def test_three_nodes_enumerates_two_routes(self):
        _, D = random_instance(0, 3)
        sol = solve_weighted_trp_bruteforce([0.5, 0.4, 0.3], D)
        assert sol.nodes_expanded == 2

    def test_solver_labels(self):
        w, D = random_instance(1, 4)
        assert solve_weighted_trp_dp(w, D).solver == "dp"
        assert solve_weighted_trp_bruteforce(w, D).solver == "brute_force"


class TestNaiveRoute:
    def test_orders_by_weight(self):
        assert naive_route([0.2, 0.9, 0.1, 0.5]) == [1, 2, 4, 3]

    def test_ties_break_by_index(self):
        assert naive_route([0.9, 0.5, 0.5, 0.5]) == [1, 2, 3, 4]

    def test_start_fixed_even_if_heavy(self):
        assert naive_route([9.0, 0.1, 0.2]) == [1, 3, 2]
