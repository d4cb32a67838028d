"""Walk through the parity datasets: MI values, forward selection traces and Bayes risk."""

import math
from pathlib import Path

from mifwd import conditional_entropy, conditional_mi, forward_select, mutual_information
from mifwd.bayes_risk import mbr_discrete
from mifwd.pmf_io import parse_pmf_file
from mifwd.selection import PUBLISHED_METHODS, TARGET_METHODS, MethodSpec

DATA = Path(__file__).resolve().parent.parent / "data"


def show_trace(pmf, kind):
    state = forward_select(pmf, MethodSpec(kind), "C")
    print(f"  {kind.value:14s} order: {', '.join(state.selected)}")
    for rec in state.trace:
        vals = ", ".join(f"{c}={v:+.4f}" for c, v in rec.values.items())
        tie = f"  tie {sorted(rec.ties)}" if len(rec.ties) > 1 else ""
        print(f"      step {rec.step}: {vals}{tie}")


def main():
    par = parse_pmf_file((DATA / "parity.pmf.jsonl").read_text())
    print("parity: C = (X + Y)^2 with X, Y independent signs")
    print(f"  MI(C, X)      = {mutual_information(par, 'C', 'X'):.6f}")
    print(f"  MI(C, Y | X)  = {conditional_mi(par, 'C', 'Y', 'X'):.6f}  (ln 2 = {math.log(2):.6f})")
    print(f"  H(C | X, Y)   = {conditional_entropy(par, 'C', ['X', 'Y']):.6f}")
    print(f"  MBR with X    = {mbr_discrete(par, 'C', ['X'])[0]:.3f}")
    print(f"  MBR with X, Y = {mbr_discrete(par, 'C', ['X', 'Y'])[0]:.3f}")

    noisy = parse_pmf_file((DATA / "parity_noise.pmf.jsonl").read_text())
    print("\nparity with noise bits W and Z")
    for kind in (*PUBLISHED_METHODS, *TARGET_METHODS):
        show_trace(noisy, kind)


if __name__ == "__main__":
    main()
