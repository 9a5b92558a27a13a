"""How often does a reinforced simulation lock onto the greedy limit cycle?

Runs seeded replicas for several epsilon values and prints the share of
converged runs whose realized cycle equals the greedy one.

    python scripts/agreement_study.py --model healthcare --runs 200
"""
import argparse
from collections import Counter

from mclim.catalog import BUNDLED, bundled, maintenance_model
from mclim.limit_cycle import limit_of
from mclim.reinforcement_sim import SimConfig, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--model", default="paper_6state", choices=BUNDLED + ("maintenance",))
    ap.add_argument("--start", default=None)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--epsilons", default="0.01,0.05,0.2,0.5")
    ap.add_argument("--delta", type=float, default=0.01)
    args = ap.parse_args()

    model = maintenance_model() if args.model == "maintenance" else bundled(args.model)
    start = model.index(args.start) if args.start else 0
    greedy = limit_of(model, start)
    print(f"model {args.model}, start {model.names[start]}, greedy limit {greedy.format(model)}")
    for eps in (float(e) for e in args.epsilons.split(",")):
        realized = Counter()
        events = []
        for seed in range(args.runs):
            res = run(model, SimConfig(epsilon=eps, delta=args.delta, seed=seed, start=start))
            realized[res.realized] += 1
            events.append(res.events_used)
        conv = args.runs - realized[None]
        agree = realized[greedy]
        print(
            f"eps={eps:<5} converged {conv}/{args.runs}  agreement {agree}/{conv}"
            f"  median events {sorted(events)[len(events) // 2]}"
        )
        for cyc, count in realized.most_common():
            if cyc is not None and cyc != greedy:
                print(f"    other cycle {cyc.format(model)}: {count}")


if __name__ == "__main__":
    main()
