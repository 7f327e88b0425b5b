#!/usr/bin/env python3
"""Run the synthetic trend experiments and print tab-separated tables.

Experiments:
  pR_recall          recall vs. the neighbor-draw probability p_r
  pRa_precision      precision vs. the ambiguous-relationship rate p_r_a
  level_convergence  per-level query accuracy as the expansion depth grows
"""

import argparse

from qer.evalkit import run_trend_experiment
from qer.similarity import SimilarityConfig
from qer.synthgen import GenParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("kind", choices=("pR_recall", "pRa_precision",
                                     "level_convergence"))
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--entities", type=int, default=100)
    ap.add_argument("--relationships", type=int, default=200)
    ap.add_argument("--hyperedges", type=int, default=500)
    ap.add_argument("--p-a", type=float, default=0.5)
    ap.add_argument("--p-c", type=float, default=0.5)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--delta", type=float, default=0.7)
    ap.add_argument("--epsilon", type=float, default=0.9)
    ap.add_argument("--grid", type=float, nargs="+",
                    help="settings for the varied parameter")
    ap.add_argument("--thresholds", type=float, nargs="+",
                    default=[0.25, 0.3, 0.34, 0.38, 0.42, 0.46])
    ap.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()

    if args.grid is None:
        args.grid = {"pR_recall": [0.2, 0.5, 1.0],
                     "pRa_precision": [0.0, 0.3, 0.6],
                     "level_convergence": []}[args.kind]
    base = GenParams(n_entities=args.entities,
                     n_relationships=args.relationships,
                     n_hyperedges=args.hyperedges,
                     p_a=args.p_a, p_c=args.p_c)
    cfg = SimilarityConfig(alpha=args.alpha, epsilon=args.epsilon,
                           delta=args.delta, merge_threshold=0.0)
    report = run_trend_experiment(args.kind, args.grid, range(args.seeds),
                                  base, cfg, thresholds=args.thresholds,
                                  levels=tuple(args.levels))
    print(report.to_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
