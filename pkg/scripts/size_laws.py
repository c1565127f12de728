"""Measure translation sizes against their shape functions on random inputs."""

from __future__ import annotations

import argparse
import random
import statistics

from netlogic.circuit import bnl_to_circuit, parity_circuit
from netlogic.fully_open import to_fully_open
from netlogic.generators import random_program, random_sc_program
from netlogic.nn import Edge, NeuralNetwork, Node, Threshold
from netlogic.program import measure
from netlogic.sc import measure_sc, sc_to_bnl
from netlogic.softfloat import FloatSystem, PiecewisePolynomial
from netlogic.translate import bnl_to_nn, build_network_program


def summary(label: str, ratios: list[float]) -> None:
    print(f"{label:42} min {min(ratios):8.2f}  median {statistics.median(ratios):8.2f}  max {max(ratios):8.2f}")


def sc_and_open(rng: random.Random, samples: int) -> None:
    sc = [measure(sc_to_bnl(p))[0] / measure_sc(p) for p in (random_sc_program(rng) for _ in range(samples))]
    summary("sc_to_bnl size / source size", sc)
    opened, nodes = [], []
    for _ in range(samples):
        p = random_program(rng, variables=rng.randint(1, 8), inputs=rng.randint(0, 4), depth=rng.randint(0, 4))
        size, depth = measure(p)
        q, _ = to_fully_open(p)
        opened.append(measure(q)[0] / (size * max(depth, 1)))
        nodes.append(len(bnl_to_nn(p, "relu", FloatSystem(2, 1, 10)).nodes) / size)
    summary("fully-open size / (s·max(d,1))", opened)
    summary("bnl_to_nn node count / program size", nodes)
    depth = []
    for _ in range(samples):
        p = random_program(rng, variables=rng.randint(2, 8), inputs=rng.randint(0, 4), depth=rng.randint(1, 5))
        c = bnl_to_circuit(p, "balanced").circuit
        size = measure(p)[0]
        depth.append(c.depth / max(1.0, size.bit_length() - 1))
    summary("balanced circuit depth / log2(size)", depth)
    summary("parity |C_n| / n, n=1..64", [parity_circuit(n).circuit.size / n for n in range(1, 65)])


def network_grid(rng: random.Random) -> None:
    system = FloatSystem(3, 2, 2)
    r, beta = system.r, system.beta
    print("\nnn_to_bnl size against N(Δ+PΩ²)(r⁴+r³β²+rβ⁴), two quadratic pieces per node")
    print(f"{'N':>3}{'Δ':>3}{'size':>10}{'ratio':>9}")
    for nodes in (2, 4, 6):
        for degree in (1, 2, 3):
            ids = [f"n{i}" for i in range(nodes)]

            def quadratic():
                return tuple(system.random_value(rng, 0) for _ in range(3))

            node_list = tuple(
                Node(
                    i,
                    system.random_value(rng, 0),
                    PiecewisePolynomial(system, (system.random_value(rng, 0),), (quadratic(), quadratic())),
                    None if k == 0 else system.random_value(rng),
                )
                for k, i in enumerate(ids)
            )
            edges = tuple(Edge(s, t, system.random_value(rng, 0)) for t in ids for s in rng.sample(ids, min(degree, nodes)))
            net = NeuralNetwork(system, node_list, edges, (ids[0],), (ids[-1],), (Threshold(ids[-1], system.zero()),))
            size = measure(build_network_program(net).program)[0]
            shape = nodes * (net.degree + 2 * 4) * (r**4 + r**3 * beta**2 + r * beta**4)
            print(f"{nodes:>3}{net.degree:>3}{size:>10}{size / shape:>9.2f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--skip-networks", action="store_true", help="skip the slower network grid")
    args = parser.parse_args()
    rng = random.Random(args.seed)
    sc_and_open(rng, args.samples)
    if not args.skip_networks:
        network_grid(rng)


if __name__ == "__main__":
    main()
