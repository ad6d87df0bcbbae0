"""Block-frequency deviation of each desk prefix as the prefix grows.

Run: python3 demos/desk_convergence.py [--k-max 3] [--floor 0.01]
"""

import argparse

from munormal import presets
from munormal.counting import audit_blocks, count_blocks
from munormal.stream import stream_prefix

DESKS = ["qary-b2-desk", "beta-golden-desk", "lueroth-desk", "lueroth-deep-desk", "cf-desk"]
SIZES = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=3)
    ap.add_argument("--floor", type=float, default=0.01)
    args = ap.parse_args()

    print(f"max |N_n(b)/n - mu(b)| / mu(b) over |b| <= {args.k_max}, mu(b) >= {args.floor}")
    print(f"{'preset':<20}" + "".join(f"{n:>12,}" for n in SIZES) + "   worst block at 10^6")
    for name in DESKS:
        cfg = presets.get_preset(name)
        W = presets.build_schedule(cfg, name)
        mu = presets.target_measure(cfg)
        targets = [b for b in audit_blocks(mu, args.k_max, args.floor) if mu(b) > 0]
        prefix = stream_prefix(W, max(SIZES))
        row, worst = [], None
        for n in SIZES:
            rep = count_blocks(prefix[:n], targets, measure=mu)
            row.append(rep.max_rel_dev)
            worst = max(rep.records, key=lambda r: r.rel_dev).block
        print(f"{name:<20}" + "".join(f"{v:>12.4f}" for v in row) + f"   {list(worst)}")


if __name__ == "__main__":
    main()
