"""Shared generators for randomized tests."""
import random

from zkpol.circuit import CircuitBuilder, compute_witness


def random_circuit(field, rng: random.Random, max_ops: int = 8):
    """A random circuit of 1..max_ops operations over linear-combination operands."""
    b = CircuitBuilder(field)
    n_in = rng.randint(1, 3)
    live = [b.input(f"in{k}") for k in range(n_in)]

    def operand():
        terms = {}
        for v in rng.sample([0] + live, k=min(len(live) + 1, rng.randint(1, 3))):
            terms[v] = rng.randrange(1, field.p)
        return terms

    for j in range(rng.randint(1, max_ops)):
        live.append(b.mul(operand(), operand(), f"w{j}"))
    num_public = rng.randint(0, len(b.names) - 1)
    return b.build(num_public)


def random_assignment(circuit, rng: random.Random, corrupt: bool):
    inputs = {i: rng.randrange(circuit.field.p) for i in circuit.inputs}
    w = compute_witness(circuit, inputs)
    if corrupt:
        i = rng.randrange(1, len(w.values))
        w = w.replace(i, w.values[i] + rng.randrange(1, circuit.field.p))
    return w
