"""First digits of the golden-ratio desk sequence and the number they expand.

Shows the stage blocks, the padding inserted between copies, that every
window of the prefix is admissible (no "11"), and the value with its
certified enclosure.
"""

import itertools

import mpmath

from munormal import presets
from munormal.counting import count_all_of_length
from munormal.numerals import beta_value
from munormal.stream import stream_prefix

NAME = "beta-golden-desk"


def main() -> None:
    cfg = presets.get_preset(NAME)
    W = presets.build_schedule(cfg, NAME)
    lang = W.language
    for i in (1, 2):
        info = W.info(i)
        word = "".join(map(str, W.block(i).as_word()))
        print(f"stage {i}: block of {info.length} digits x {info.copies}, "
              f"pad between copies {info.self_pad or '()'}; block ends ...{word[-60:]}")

    prefix = stream_prefix(W, 200_000)
    # pools are lexicographic, so each block opens with its run of zeros
    cut = W.L(1)
    print(f"digits {cut - 39}..{cut + 40} across the first stage boundary:")
    print("  " + "".join(map(str, prefix[cut - 40:cut])) + " | " + "".join(map(str, prefix[cut:cut + 40])))
    census = count_all_of_length(prefix, 12)
    print(f"distinct windows of length 12: {len(census.counts())}, all admissible: "
          f"{all(lang.is_admissible(b) for b in census.counts())}")
    print(f"admissible words of length 12 in the golden shift: "
          f"{sum(1 for w in itertools.product((0, 1), repeat=12) if lang.is_admissible(w))}")

    v = beta_value(prefix[:400].tolist(), presets.parry_data(cfg), precision=200)
    print("value:", v)
    lo, hi = v.extension_interval()
    print(f"every continuation lies in [{mpmath.nstr(lo, 20)}, {mpmath.nstr(hi, 20)}]")


if __name__ == "__main__":
    main()
