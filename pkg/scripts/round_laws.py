"""Print measured output rounds of the compiled arithmetic next to their growth laws."""

from __future__ import annotations

import argparse
import math

from netlogic.fpcompile import build_fp_op
from netlogic.integers import build_int_op
from netlogic.softfloat import (
    FloatSystem,
    PiecewisePolynomial,
    heaviside_pieces,
    relu_pieces,
)


def integer_table(betas: list[int], widths: list[int]) -> None:
    print("integer operations: output round by (p, β)")
    print(f"{'op':8}{'p':>4}{'β':>4}{'round':>8}{'log2 p + log2 β':>18}")
    for kind in ("compare", "add", "mul"):
        for beta in betas:
            for p in widths:
                rounds = build_int_op(kind, p, beta).output_round
                print(f"{kind:8}{p:>4}{beta:>4}{rounds:>8}{math.log2(p) + math.log2(beta):>18.2f}")


def polynomial(system: FloatSystem, degree: int) -> PiecewisePolynomial:
    coeffs = tuple(system.one() for _ in range(degree + 1))
    return PiecewisePolynomial(system, (system.zero(),), (coeffs, coeffs))


def float_table(system: FloatSystem) -> None:
    print(f"\nfloating point over {system}: output round")
    for kind in ("normalize", "add", "mul"):
        print(f"  {kind:10}{build_fp_op(kind, system).output_round:>6}")
    tables = {"relu": relu_pieces(system), "heaviside": heaviside_pieces(system)}
    tables.update({f"degree {d}": polynomial(system, d) for d in (1, 2, 4)})
    for name, pieces in tables.items():
        law = (math.log2(max(pieces.order, 1)) + 1) * (math.log2(system.r) + math.log2(system.beta))
        rounds = build_fp_op("piecewise", system, pieces).output_round
        print(f"  {name:10}{rounds:>6}   Ω={pieces.order}  (log2 Ω + 1)(log2 r + log2 β) = {law:.2f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--betas", type=int, nargs="+", default=[2, 10])
    parser.add_argument("--widths", type=int, nargs="+", default=[2, 4, 8, 16])
    parser.add_argument("--system", default="3,2,2", help="P,Q,B for the float table")
    args = parser.parse_args()
    integer_table(args.betas, args.widths)
    float_table(FloatSystem(*(int(v) for v in args.system.split(","))))


if __name__ == "__main__":
    main()
