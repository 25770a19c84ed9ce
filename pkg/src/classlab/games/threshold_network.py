"""Feedforward binary-threshold network: the hand-raising neuron game.

Students are neurons wearing numbered t-shirts (thresholds), connected by
weighted ropes. A neuron raises its hand (bit 1) when the weighted sum of
raised hands feeding it reaches its shirt number. The module provides
propagation, output decisions, network validation, and the corrective
"swap the ropes" search that reassigns a fixed pool of rope weights until
the network produces a desired decision.

Activation fires at equality (sum >= threshold): the canonical worked
lesson activates a threshold-2 neuron on an incoming sum of exactly 2, so
equality is the authoritative rule.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Iterator, Mapping, Sequence

from ..errors import EngineError, IllegalActionError
from ..model import DisplayMode, DrawSource, LessonConfig, Outcome
from ..validation import ValidationReport


class CycleDetectedError(EngineError):
    code = "cycle-detected"


class InputSignalError(EngineError):
    code = "missing-input-signal"


class PoolSizeMismatchError(EngineError):
    code = "pool-size-mismatch"


class NeuronKind(str, Enum):
    INPUT = "input"
    HIDDEN = "hidden"
    OUTPUT = "output"


@dataclass(frozen=True)
class Neuron:
    """One student-neuron. ``threshold`` is the shirt number; input neurons
    bypass it and simply repeat their external signal."""

    id: str
    threshold: int
    kind: NeuronKind


@dataclass(frozen=True)
class Connection:
    """A rope from ``source`` to ``target`` with positive integer weight."""

    source: str
    target: str
    weight: int


@dataclass(frozen=True)
class ThresholdNetwork:
    neurons: tuple[Neuron, ...]
    connections: tuple[Connection, ...]

    def neuron(self, neuron_id: str) -> Neuron:
        for neuron in self.neurons:
            if neuron.id == neuron_id:
                return neuron
        raise KeyError(neuron_id)

    @property
    def input_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.neurons if n.kind is NeuronKind.INPUT)

    @property
    def output_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.neurons if n.kind is NeuronKind.OUTPUT)


@dataclass(frozen=True)
class ActivationState:
    """Per-neuron weighted input sums and hand bits, in topological order."""

    order: tuple[str, ...]
    sums: Mapping[str, int]
    bits: Mapping[str, int]


def find_cycle(network: ThresholdNetwork) -> list[str] | None:
    """Return one directed cycle as a node list (closed), or None."""
    outgoing: dict[str, list[str]] = {n.id: [] for n in network.neurons}
    for conn in network.connections:
        if conn.source in outgoing and conn.target in outgoing:
            outgoing[conn.source].append(conn.target)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in outgoing}
    trail: list[str] = []

    def visit(nid: str) -> list[str] | None:
        color[nid] = GREY
        trail.append(nid)
        for nxt in outgoing[nid]:
            if color[nxt] == GREY:
                start = trail.index(nxt)
                return trail[start:] + [nxt]
            if color[nxt] == WHITE:
                found = visit(nxt)
                if found:
                    return found
        trail.pop()
        color[nid] = BLACK
        return None

    for nid in outgoing:
        if color[nid] == WHITE:
            found = visit(nid)
            if found:
                return found
    return None


def topological_order(network: ThresholdNetwork) -> tuple[str, ...]:
    """Kahn order, breaking ties by neuron declaration order (stable traces)."""
    indegree = {n.id: 0 for n in network.neurons}
    outgoing: dict[str, list[str]] = {n.id: [] for n in network.neurons}
    for conn in network.connections:
        indegree[conn.target] += 1
        outgoing[conn.source].append(conn.target)
    queue = deque(nid for nid, deg in indegree.items() if deg == 0)
    order: list[str] = []
    while queue:
        nid = queue.popleft()
        order.append(nid)
        for nxt in outgoing[nid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    if len(order) != len(network.neurons):
        cycle = find_cycle(network)
        path = " -> ".join(cycle) if cycle else "?"
        raise CycleDetectedError(f"network must be acyclic; cycle: {path}")
    return tuple(order)


def propagate(network: ThresholdNetwork, input_signals: Mapping[str, int]) -> ActivationState:
    """Evaluate every neuron once, in topological order.

    ``input_signals`` must cover exactly the input neurons with bits 0/1.
    Each non-input neuron receives sum(source bit x rope weight) over its
    incoming ropes and raises its hand iff the sum reaches its threshold.
    """
    order = topological_order(network)
    inputs = set(network.input_ids)
    missing = sorted(inputs - set(input_signals))
    if missing:
        raise InputSignalError(f"missing signal for input neuron(s): {', '.join(missing)}")
    extra = sorted(set(input_signals) - inputs)
    if extra:
        raise InputSignalError(f"signal supplied for non-input neuron(s): {', '.join(extra)}")
    for nid, bit in input_signals.items():
        if bit not in (0, 1):
            raise InputSignalError(f"signal for {nid} must be 0 or 1, got {bit!r}")

    incoming: dict[str, list[Connection]] = {n.id: [] for n in network.neurons}
    for conn in network.connections:
        incoming[conn.target].append(conn)

    sums: dict[str, int] = {}
    bits: dict[str, int] = {}
    for nid in order:
        total = sum(bits[c.source] * c.weight for c in incoming[nid])
        sums[nid] = total
        neuron = network.neuron(nid)
        if neuron.kind is NeuronKind.INPUT:
            bits[nid] = input_signals[nid]
        else:
            bits[nid] = int(total >= neuron.threshold)
    return ActivationState(order=order, sums=sums, bits=bits)


def decide(network: ThresholdNetwork, input_signals: Mapping[str, int]) -> dict[str, int]:
    """Project propagation onto the output neurons."""
    state = propagate(network, input_signals)
    return {nid: state.bits[nid] for nid in network.output_ids}


def decision_is_positive(output_bits: Mapping[str, int]) -> bool:
    """The network's verdict is positive iff every output neuron fired."""
    return bool(output_bits) and all(bit == 1 for bit in output_bits.values())


def render_trace(network: ThresholdNetwork, state: ActivationState) -> list[str]:
    """One line per neuron in topological order: ``id sum threshold bit``.

    Input neurons render ``-`` for the threshold column (bypassed).
    """
    lines = []
    for nid in state.order:
        neuron = network.neuron(nid)
        threshold = "-" if neuron.kind is NeuronKind.INPUT else str(neuron.threshold)
        lines.append(f"{nid} {state.sums[nid]} {threshold} {state.bits[nid]}")
    return lines


def apply_assignment(
    network: ThresholdNetwork, assignment: Mapping[tuple[str, str], int]
) -> ThresholdNetwork:
    """Return the network with rope weights replaced per ``assignment``."""
    connections = tuple(
        replace(conn, weight=assignment[(conn.source, conn.target)])
        for conn in network.connections
    )
    return replace(network, connections=connections)


def _multiset_permutations(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations of a multiset in lexicographic order."""
    counts = Counter(items)
    keys = sorted(counts)
    total = len(items)
    current: list[int] = []

    def rec() -> Iterator[tuple[int, ...]]:
        if len(current) == total:
            yield tuple(current)
            return
        for key in keys:
            if counts[key]:
                counts[key] -= 1
                current.append(key)
                yield from rec()
                current.pop()
                counts[key] += 1

    yield from rec()


def reweigh_search(
    network: ThresholdNetwork,
    input_signals: Mapping[str, int],
    desired_output: Mapping[str, int],
    weight_pool: Sequence[int],
) -> dict[tuple[str, str], int] | None:
    """Exhaustively reassign the rope-weight pool until the decision matches.

    Connections are ordered canonically by (source, target); the pool is
    enumerated as distinct multiset permutations in lexicographic order, so
    the first satisfying assignment found is the lexicographically smallest.
    Returns the current weights unchanged when they already satisfy the
    desired output, or None when no assignment works. Cost grows
    factorially with the number of ropes; intended for classroom-sized
    networks.
    """
    if len(weight_pool) != len(network.connections):
        raise PoolSizeMismatchError(
            f"pool has {len(weight_pool)} weights for {len(network.connections)} connections"
        )
    for weight in weight_pool:
        if not isinstance(weight, int) or isinstance(weight, bool) or weight < 1:
            raise PoolSizeMismatchError(f"pool weights must be positive integers, got {weight!r}")
    outputs = set(network.output_ids)
    if set(desired_output) != outputs:
        raise IllegalActionError(
            "desired output must cover exactly the output neurons: " + ", ".join(sorted(outputs))
        )

    desired = {nid: int(bit) for nid, bit in desired_output.items()}
    if decide(network, input_signals) == desired:
        return {(c.source, c.target): c.weight for c in network.connections}

    pairs = sorted((c.source, c.target) for c in network.connections)
    for weights in _multiset_permutations(sorted(weight_pool)):
        assignment = dict(zip(pairs, weights))
        if decide(apply_assignment(network, assignment), input_signals) == desired:
            return assignment
    return None


def validate_network(network: ThresholdNetwork, path: str = "") -> ValidationReport:
    """Static checks that the network is playable."""
    report = ValidationReport()

    def loc(suffix: str) -> str:
        return f"{path}.{suffix}" if path else suffix

    seen_ids: set[str] = set()
    for idx, neuron in enumerate(network.neurons):
        if neuron.id in seen_ids:
            report.error(loc(f"neurons[{idx}]"), f"duplicate neuron id {neuron.id!r}")
        seen_ids.add(neuron.id)
        if neuron.threshold < 0:
            report.error(loc(f"neurons[{idx}]"), "threshold must be a non-negative integer")

    if not network.input_ids:
        report.error(loc("neurons"), "network needs at least one input neuron")
    if not network.output_ids:
        report.error(loc("neurons"), "network needs at least one output neuron")

    known = {n.id for n in network.neurons}
    seen_pairs: set[tuple[str, str]] = set()
    for idx, conn in enumerate(network.connections):
        where = loc(f"connections[{idx}]")
        if conn.source not in known:
            report.error(where, f"unknown neuron {conn.source!r}")
        if conn.target not in known:
            report.error(where, f"unknown neuron {conn.target!r}")
        if conn.weight < 1:
            report.error(where, "weight must be >= 1")
        pair = (conn.source, conn.target)
        if pair in seen_pairs:
            report.error(where, f"duplicate connection {conn.source} -> {conn.target}")
        seen_pairs.add(pair)

    if report.ok:
        cycle = find_cycle(network)
        if cycle:
            report.error(loc("connections"), "network must be acyclic; cycle: " + " -> ".join(cycle))
        else:
            reachable = set(network.input_ids)
            frontier = list(reachable)
            outgoing: dict[str, list[str]] = {n.id: [] for n in network.neurons}
            for conn in network.connections:
                outgoing[conn.source].append(conn.target)
            while frontier:
                nid = frontier.pop()
                for nxt in outgoing[nid]:
                    if nxt not in reachable:
                        reachable.add(nxt)
                        frontier.append(nxt)
            for out in network.output_ids:
                if out not in reachable:
                    report.warn(loc("connections"), f"output neuron {out!r} unreachable from any input")
            incoming_to_input = sorted(
                c.target for c in network.connections if c.target in set(network.input_ids)
            )
            for nid in incoming_to_input:
                report.warn(loc("connections"), f"input neuron {nid!r} has incoming ropes (ignored)")
    return report


# --- lesson payload -------------------------------------------------------

@dataclass(frozen=True)
class NetworkPayload:
    network: ThresholdNetwork
    input_assignment: Mapping[str, int] | None

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "neurons": [
                {"id": n.id, "threshold": n.threshold, "kind": n.kind.value}
                for n in self.network.neurons
            ],
            "connections": [
                {"from": c.source, "to": c.target, "weight": c.weight}
                for c in self.network.connections
            ],
        }
        if self.input_assignment is not None:
            doc["input_assignment"] = dict(self.input_assignment)
        return doc


def _as_int(value: Any) -> int | None:
    if isinstance(value, bool) or not isinstance(value, int):
        return None
    return value


def parse_payload(raw: Any, report: ValidationReport, path: str = "payload") -> NetworkPayload | None:
    if not isinstance(raw, Mapping):
        report.error(path, "payload must be an object")
        return None
    for key in raw:
        if key not in ("neurons", "connections", "input_assignment"):
            report.warn(f"{path}.{key}", "unknown field")

    neurons: list[Neuron] = []
    raw_neurons = raw.get("neurons")
    if not isinstance(raw_neurons, list) or not raw_neurons:
        report.error(f"{path}.neurons", "must be a non-empty list")
        return None
    for idx, entry in enumerate(raw_neurons):
        where = f"{path}.neurons[{idx}]"
        if not isinstance(entry, Mapping):
            report.error(where, "must be an object")
            continue
        nid = entry.get("id")
        if not isinstance(nid, str) or not nid:
            report.error(where, "id must be a non-empty string")
            continue
        kind_raw = entry.get("kind")
        try:
            kind = NeuronKind(kind_raw)
        except ValueError:
            report.error(where, f"kind must be one of input/hidden/output, got {kind_raw!r}")
            continue
        threshold = entry.get("threshold", 0 if kind is NeuronKind.INPUT else None)
        threshold_int = _as_int(threshold)
        if threshold_int is None or threshold_int < 0:
            report.error(where, "threshold must be a non-negative integer")
            continue
        neurons.append(Neuron(id=nid, threshold=threshold_int, kind=kind))

    connections: list[Connection] = []
    raw_connections = raw.get("connections")
    if not isinstance(raw_connections, list):
        report.error(f"{path}.connections", "must be a list")
        return None
    for idx, entry in enumerate(raw_connections):
        where = f"{path}.connections[{idx}]"
        if not isinstance(entry, Mapping):
            report.error(where, "must be an object")
            continue
        source = entry.get("from")
        target = entry.get("to")
        weight = _as_int(entry.get("weight"))
        if not isinstance(source, str) or not isinstance(target, str):
            report.error(where, "'from' and 'to' must be neuron ids")
            continue
        if weight is None:
            report.error(where, "weight must be an integer")
            continue
        connections.append(Connection(source=source, target=target, weight=weight))

    if not report.ok:
        return None

    network = ThresholdNetwork(neurons=tuple(neurons), connections=tuple(connections))
    report.merge(validate_network(network, path=path))
    if not report.ok:
        return None

    input_assignment = None
    raw_assignment = raw.get("input_assignment")
    if raw_assignment is not None:
        if not isinstance(raw_assignment, Mapping):
            report.error(f"{path}.input_assignment", "must be an object of input id -> bit")
            return None
        inputs = set(network.input_ids)
        assignment: dict[str, int] = {}
        for key, value in raw_assignment.items():
            if key not in inputs:
                report.error(f"{path}.input_assignment.{key}", "not an input neuron")
            elif value not in (0, 1) or isinstance(value, bool):
                report.error(f"{path}.input_assignment.{key}", "signal must be 0 or 1")
            else:
                assignment[key] = value
        if not report.ok:
            return None
        input_assignment = assignment

    return NetworkPayload(network=network, input_assignment=input_assignment)


# --- session integration --------------------------------------------------

@dataclass(frozen=True)
class CnnState:
    network: ThresholdNetwork
    last_signals: Mapping[str, int] | None = None
    last_activation: ActivationState | None = None


def initial_state(config: LessonConfig) -> CnnState:
    return CnnState(network=config.payload.network)


def _signals_for(state: CnnState, config: LessonConfig, action: Mapping[str, Any]) -> dict[str, int]:
    signals = action.get("signals")
    if signals is None:
        signals = state.last_signals if state.last_signals is not None else config.payload.input_assignment
    if signals is None:
        raise InputSignalError("no signals given and the lesson has no input_assignment")
    if not isinstance(signals, Mapping):
        raise IllegalActionError("'signals' must be an object of input id -> bit")
    return {str(k): v for k, v in signals.items()}


def _activation_outcome(
    network: ThresholdNetwork, signals: Mapping[str, int], activation: ActivationState
) -> Outcome:
    outputs = {nid: activation.bits[nid] for nid in network.output_ids}
    decision = "positive" if decision_is_positive(outputs) else "negative"
    return Outcome(
        kind="activation",
        data={
            "signals": dict(signals),
            "sums": dict(activation.sums),
            "bits": dict(activation.bits),
            "outputs": outputs,
            "decision": decision,
            "trace": render_trace(network, activation),
        },
    )


def apply_action(
    config: LessonConfig,
    state: CnnState,
    actor: str,
    action: Mapping[str, Any],
    draws: DrawSource,
) -> tuple[CnnState, Outcome]:
    kind = action["type"]
    if kind == "show_input":
        signals = _signals_for(state, config, action)
        activation = propagate(state.network, signals)
        outcome = _activation_outcome(state.network, signals, activation)
        return replace(state, last_signals=signals, last_activation=activation), outcome
    if kind == "reweigh":
        pool = action.get("pool")
        desired = action.get("desired")
        if not isinstance(pool, list):
            raise IllegalActionError("'pool' must be a list of positive integer weights")
        if not isinstance(desired, Mapping):
            raise IllegalActionError("'desired' must be an object of output id -> bit")
        signals = _signals_for(state, config, action)
        assignment = reweigh_search(state.network, signals, desired, pool)
        if assignment is None:
            return state, Outcome(kind="reweigh", data={"found": False, "assignment": None})
        network = apply_assignment(state.network, assignment)
        outcome_data = {
            "found": True,
            "assignment": {f"{src}->{dst}": w for (src, dst), w in sorted(assignment.items())},
        }
        activation = propagate(network, signals)
        outputs = {nid: activation.bits[nid] for nid in network.output_ids}
        outcome_data["outputs"] = outputs
        outcome_data["decision"] = "positive" if decision_is_positive(outputs) else "negative"
        new_state = CnnState(network=network, last_signals=signals, last_activation=activation)
        return new_state, Outcome(kind="reweigh", data=outcome_data)
    raise IllegalActionError(f"unknown action type {kind!r} for the neural network game")


def snapshot(config: LessonConfig, state: CnnState, view: DisplayMode) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "neurons": [
            {"id": n.id, "threshold": n.threshold, "kind": n.kind.value}
            for n in state.network.neurons
        ],
        "connections": [
            {"from": c.source, "to": c.target, "weight": c.weight}
            for c in state.network.connections
        ],
        "input_assignment": dict(config.payload.input_assignment)
        if config.payload.input_assignment is not None
        else None,
    }
    if state.last_activation is None:
        doc["last"] = None
    else:
        activation = state.last_activation
        outputs = {nid: activation.bits[nid] for nid in state.network.output_ids}
        doc["last"] = {
            "signals": dict(state.last_signals or {}),
            "sums": dict(activation.sums),
            "bits": dict(activation.bits),
            "outputs": outputs,
            "decision": "positive" if decision_is_positive(outputs) else "negative",
            "trace": render_trace(state.network, activation),
        }
    return doc


def materials_lines(config: LessonConfig) -> list[str]:
    payload: NetworkPayload = config.payload
    lines = ["t-shirts:"]
    for neuron in payload.network.neurons:
        if neuron.kind is NeuronKind.INPUT:
            lines.append(f"  shirt {neuron.id}: colored t-shirt (input neuron, reacts to its signal card)")
        else:
            lines.append(f"  shirt {neuron.id}: numbered t-shirt {neuron.threshold} ({neuron.kind.value} neuron)")
    lines.append("ropes:")
    for conn in payload.network.connections:
        lines.append(f"  rope {conn.source} -> {conn.target}: weight {conn.weight}")
    lines.append("signal cards:")
    for nid in payload.network.input_ids:
        lines.append(f"  card for input {nid} (showing it = signal 1)")
    return lines
