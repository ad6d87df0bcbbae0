"""Growth-condition ratios of the formula schedules, in log space.

Prints r1..r4 at a few stages for every symbolic preset, then shows how a
constant tolerance breaks the first condition.
"""

from munormal import presets
from munormal.schedule import validate_symbolic

STAGES = (5, 10, 20, 29)


def show(cfg: dict, label: str) -> None:
    W = presets.build_schedule(cfg, label)
    rep = validate_symbolic(W, 30)
    print(f"{label}: {'all decreasing' if rep.passed else 'failed ' + ', '.join(rep.failed())}")
    for t in rep.trends:
        vals = "  ".join(f"i={i}: {t.value_at(i):9.3e}" for i in STAGES if i in t.indices)
        print(f"  {t.name}  {vals}")


def main() -> None:
    for name in ("qary-b2", "lueroth", "beta-golden", "cf"):
        show(presets.get_preset(name), name)
    broken = presets.get_preset("qary-b2")
    broken["eps"] = 0.25
    show(broken, "qary-b2 with eps fixed at 0.25")


if __name__ == "__main__":
    main()
