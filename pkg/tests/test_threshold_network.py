from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classlab.games.threshold_network import (
    Connection,
    CycleDetectedError,
    InputSignalError,
    Neuron,
    NeuronKind,
    PoolSizeMismatchError,
    ThresholdNetwork,
    apply_assignment,
    decide,
    decision_is_positive,
    propagate,
    render_trace,
    reweigh_search,
    validate_network,
)

from _oracles import enumerate_reweigh, random_network, recursive_activation


def paper_network() -> ThresholdNetwork:
    return ThresholdNetwork(
        neurons=(
            Neuron("R", 0, NeuronKind.INPUT),
            Neuron("B", 2, NeuronKind.HIDDEN),
            Neuron("C", 2, NeuronKind.HIDDEN),
            Neuron("D", 2, NeuronKind.HIDDEN),
            Neuron("E", 3, NeuronKind.OUTPUT),
        ),
        connections=(
            Connection("R", "B", 1),
            Connection("R", "C", 2),
            Connection("B", "D", 1),
            Connection("C", "D", 1),
            Connection("D", "E", 3),
        ),
    )


class TestPropagate:
    def test_worked_example_trace(self):
        state = propagate(paper_network(), {"R": 1})
        assert state.sums == {"R": 0, "B": 1, "C": 2, "D": 1, "E": 0}
        assert state.bits == {"R": 1, "B": 0, "C": 1, "D": 0, "E": 0}

    def test_zero_input_all_quiet(self):
        state = propagate(paper_network(), {"R": 0})
        assert all(bit == 0 for bit in state.bits.values())

    def test_activation_at_equality(self):
        # C receives exactly its threshold (1 x 2 = 2) and must fire
        state = propagate(paper_network(), {"R": 1})
        assert state.bits["C"] == 1

    def test_missing_signal(self):
        with pytest.raises(InputSignalError):
            propagate(paper_network(), {})

    def test_extra_signal(self):
        with pytest.raises(InputSignalError):
            propagate(paper_network(), {"R": 1, "B": 1})

    def test_cycle_detected(self):
        network = ThresholdNetwork(
            neurons=(
                Neuron("a", 0, NeuronKind.INPUT),
                Neuron("b", 1, NeuronKind.HIDDEN),
                Neuron("c", 1, NeuronKind.OUTPUT),
            ),
            connections=(
                Connection("a", "b", 1),
                Connection("b", "c", 1),
                Connection("c", "b", 1),
            ),
        )
        with pytest.raises(CycleDetectedError):
            propagate(network, {"a": 1})

    def test_trace_format(self):
        state = propagate(paper_network(), {"R": 1})
        lines = render_trace(paper_network(), state)
        assert lines[0] == "R 0 - 1"
        assert lines[2] == "C 2 2 1"
        assert lines[-1] == "E 0 3 0"

    def test_matches_recursive_oracle_on_random_dags(self):
        rng = random.Random(20)
        for _ in range(200):
            network, inputs = random_network(rng)
            for pattern in range(2 ** len(inputs)):
                signals = {nid: (pattern >> i) & 1 for i, nid in enumerate(inputs)}
                state = propagate(network, signals)
                assert state.bits == recursive_activation(network, signals)


class TestDecide:
    def test_paper_decision_negative(self):
        bits = decide(paper_network(), {"R": 1})
        assert bits == {"E": 0}
        assert not decision_is_positive(bits)

    def test_identity_network(self):
        network = ThresholdNetwork(
            neurons=(Neuron("in", 0, NeuronKind.INPUT), Neuron("out", 1, NeuronKind.OUTPUT)),
            connections=(Connection("in", "out", 1),),
        )
        assert decide(network, {"in": 1}) == {"out": 1}
        assert decide(network, {"in": 0}) == {"out": 0}

    def test_multi_output_conjunction(self):
        # positive iff every output fires, checked over all input patterns
        network = ThresholdNetwork(
            neurons=(
                Neuron("x", 0, NeuronKind.INPUT),
                Neuron("y", 0, NeuronKind.INPUT),
                Neuron("p", 1, NeuronKind.OUTPUT),
                Neuron("q", 2, NeuronKind.OUTPUT),
            ),
            connections=(
                Connection("x", "p", 1),
                Connection("x", "q", 1),
                Connection("y", "q", 1),
            ),
        )
        for x in (0, 1):
            for y in (0, 1):
                bits = decide(network, {"x": x, "y": y})
                assert decision_is_positive(bits) == all(b == 1 for b in bits.values())


class TestReweighSearch:
    def test_pool_that_fires_the_output(self):
        assignment = reweigh_search(paper_network(), {"R": 1}, {"E": 1}, [2, 2, 1, 1, 3])
        assert assignment is not None
        rewired = apply_assignment(paper_network(), assignment)
        assert decide(rewired, {"R": 1}) == {"E": 1}
        # the hand-checkable assignment: every neuron lands exactly on threshold
        assert assignment == {
            ("R", "B"): 2,
            ("R", "C"): 2,
            ("B", "D"): 1,
            ("C", "D"): 1,
            ("D", "E"): 3,
        }

    def test_original_pool_matches_full_enumeration(self):
        pool = [1, 2, 1, 1, 3]
        expected = enumerate_reweigh(paper_network(), {"R": 1}, {"E": 1}, pool)
        assert expected is None
        assert reweigh_search(paper_network(), {"R": 1}, {"E": 1}, pool) is None

    def test_short_circuit_returns_current_weights(self):
        network = paper_network()
        current = {(c.source, c.target): c.weight for c in network.connections}
        result = reweigh_search(network, {"R": 1}, {"E": 0}, [5, 5, 5, 5, 5])
        assert result == current

    def test_pool_size_mismatch(self):
        with pytest.raises(PoolSizeMismatchError):
            reweigh_search(paper_network(), {"R": 1}, {"E": 1}, [1, 2])

    def test_agrees_with_enumeration_on_random_networks(self):
        rng = random.Random(77)
        checked = 0
        while checked < 40:
            network, inputs = random_network(rng, max_neurons=5)
            if not 1 <= len(network.connections) <= 5:
                continue
            checked += 1
            signals = {nid: rng.randint(0, 1) for nid in inputs}
            desired = {nid: rng.randint(0, 1) for nid in network.output_ids}
            pool = [rng.randint(1, 3) for _ in network.connections]
            got = reweigh_search(network, signals, desired, pool)
            expected = enumerate_reweigh(network, signals, desired, pool)
            if got is None:
                assert expected is None
            else:
                assert expected is not None
                assert decide(apply_assignment(network, got), signals) == desired


class TestValidateNetwork:
    def test_paper_network_clean(self):
        report = validate_network(paper_network())
        assert report.ok
        assert not report.warnings

    def test_self_loop_is_cycle_error(self):
        network = ThresholdNetwork(
            neurons=(Neuron("a", 0, NeuronKind.INPUT), Neuron("b", 1, NeuronKind.OUTPUT)),
            connections=(Connection("b", "b", 1), Connection("a", "b", 1)),
        )
        report = validate_network(network)
        assert any("acyclic" in issue.message for issue in report.errors)

    def test_unreachable_output_warning(self):
        network = ThresholdNetwork(
            neurons=(
                Neuron("a", 0, NeuronKind.INPUT),
                Neuron("b", 1, NeuronKind.OUTPUT),
                Neuron("c", 1, NeuronKind.OUTPUT),
            ),
            connections=(Connection("a", "b", 1),),
        )
        report = validate_network(network)
        assert report.ok
        assert any("unreachable" in issue.message for issue in report.warnings)

    def test_nonpositive_weight_and_duplicates(self):
        network = ThresholdNetwork(
            neurons=(Neuron("a", 0, NeuronKind.INPUT), Neuron("b", 1, NeuronKind.OUTPUT)),
            connections=(Connection("a", "b", 0), Connection("a", "b", 2)),
        )
        report = validate_network(network)
        messages = [issue.message for issue in report.errors]
        assert any(">= 1" in m for m in messages)
        assert any("duplicate connection" in m for m in messages)


@st.composite
def dag_cases(draw):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = random.Random(seed)
    network, inputs = random_network(rng)
    signals = {nid: draw(st.integers(min_value=0, max_value=1)) for nid in inputs}
    return network, signals


class TestProperties:
    @settings(max_examples=120, deadline=None)
    @given(dag_cases())
    def test_monotone_in_any_single_weight(self, case):
        # raising one rope weight can never silence a neuron
        network, signals = case
        if not network.connections:
            return
        before = propagate(network, signals).bits
        for idx, conn in enumerate(network.connections):
            bumped = ThresholdNetwork(
                neurons=network.neurons,
                connections=network.connections[:idx]
                + (Connection(conn.source, conn.target, conn.weight + 1),)
                + network.connections[idx + 1 :],
            )
            after = propagate(bumped, signals).bits
            for nid in before:
                assert not (before[nid] == 1 and after[nid] == 0)

    @settings(max_examples=120, deadline=None)
    @given(dag_cases())
    def test_locality_of_non_ancestor_edits(self, case):
        network, signals = case
        if not network.connections:
            return
        before = propagate(network, signals).bits
        # ancestors per neuron
        incoming: dict[str, list[str]] = {n.id: [] for n in network.neurons}
        for conn in network.connections:
            incoming[conn.target].append(conn.source)

        def ancestors(nid: str) -> set[str]:
            seen: set[str] = set()
            stack = [nid]
            while stack:
                for src in incoming[stack.pop()]:
                    if src not in seen:
                        seen.add(src)
                        stack.append(src)
            return seen

        for idx, conn in enumerate(network.connections):
            bumped = ThresholdNetwork(
                neurons=network.neurons,
                connections=network.connections[:idx]
                + (Connection(conn.source, conn.target, conn.weight + 1),)
                + network.connections[idx + 1 :],
            )
            after = propagate(bumped, signals).bits
            for neuron in network.neurons:
                touched = ancestors(neuron.id) | {neuron.id}
                if conn.target not in touched:
                    assert after[neuron.id] == before[neuron.id]
