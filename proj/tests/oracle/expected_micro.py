#!/usr/bin/env python3
"""Reference computation for the micro-corpus acceptance fixture.

Recomputes, from first principles and independently of the C++ code, every
value the end-to-end fixture asserts: per-composer Shannon entropy, the full
KL and JS matrices on the smoothed scale-degree marginals, and the Zipf fits
on both bases. Run it to regenerate the frozen constants in
tests/acceptance.cpp:

    python3 tests/oracle/expected_micro.py
"""
import math

PATTERNS = {
    "alder": (["C", "F", "G", "Am", "Dm", "C", "G", "Em"], 0),
    "birch": (["C", "Bb", "F", "C", "Gm", "Ab", "C", "F#"], 0),
    "cedar": (["Cm", "G", "Cm", "Fm", "G", "Cm", "Bb", "Eb"], 7),
}
COMPOSERS = ["alder", "birch", "cedar"]
N_PIECES = 12
N_EVENTS = 40
ALPHA = 0.5

LETTER_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
# Canonical 15-symbol order.
DEGREES = ["I", "i", "bII", "II", "bIII", "III", "IV", "iv",
           "#IV", "V", "v", "bVI", "VI", "bVII", "VII"]


def label_events(composer, j):
    pattern, _ = PATTERNS[composer]
    k = COMPOSERS.index(composer)
    out = []
    for t in range(N_EVENTS):
        if k == 1 and (t + j) % 11 == 0:
            out.append("N")
        else:
            out.append(pattern[(t * (k + 1) + j) % len(pattern)])
    return out


def degree_of(label, tonic):
    if label == "N":
        return None
    pc = LETTER_PC[label[0]]
    rest = label[1:]
    if rest.startswith("#"):
        pc += 1
        rest = rest[1:]
    elif rest.startswith("b"):
        pc -= 1
        rest = rest[1:]
    minor = rest == "m"
    interval = (pc - tonic) % 12
    table = {0: ("I", "i"), 1: ("bII",) * 2, 2: ("II",) * 2,
             3: ("bIII",) * 2, 4: ("III",) * 2, 5: ("IV", "iv"),
             6: ("#IV",) * 2, 7: ("V", "v"), 8: ("bVI",) * 2,
             9: ("VI",) * 2, 10: ("bVII",) * 2, 11: ("VII",) * 2}
    return DEGREES.index(table[interval][1 if minor else 0])


def piece_degrees(composer, j):
    _, tonic = PATTERNS[composer]
    seq = []
    for label in label_events(composer, j):
        d = degree_of(label, tonic)
        if d is None:
            continue  # dropped before collapsing
        if not seq or seq[-1] != d:
            seq.append(d)
    return seq


def counts_for(composer):
    marginal = [0] * 15
    trans = [[0] * 15 for _ in range(15)]
    for j in range(N_PIECES):
        seq = piece_degrees(composer, j)
        for i, d in enumerate(seq):
            marginal[d] += 1
            if i:
                trans[seq[i - 1]][d] += 1
    return marginal, trans


def smooth(counts, alpha=ALPHA):
    total = sum(counts) + alpha * len(counts)
    return [(c + alpha) / total for c in counts]


def entropy(p):
    return -sum(v * math.log2(v) for v in p)


def kl(p, q):
    return sum(a * math.log2(a / b) for a, b in zip(p, q))


def js(p, q):
    m = [(a + b) / 2 for a, b in zip(p, q)]
    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def zipf(probs):
    ranked = sorted(probs, reverse=True)
    xs = [math.log(r + 1) for r in range(len(ranked))]
    ys = [math.log(v) for v in ranked]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    syy = sum((y - my) ** 2 for y in ys)
    slope = sxy / sxx
    r2 = sxy * sxy / (sxx * syy)
    return -slope, r2


def main():
    marginals, flats = {}, {}
    for c in COMPOSERS:
        marginal, trans = counts_for(c)
        marginals[c] = smooth(marginal)
        flats[c] = smooth([v for row in trans for v in row])
        print(f"// {c}: events={sum(marginal)}")

    def fmt(v):
        return f"{v:.17g}"

    print("H:", {c: fmt(entropy(marginals[c])) for c in COMPOSERS})
    for a in COMPOSERS:
        print("KL", a, [fmt(kl(marginals[a], marginals[b])) for b in COMPOSERS])
    for a in COMPOSERS:
        print("JS", a, [fmt(js(marginals[a], marginals[b])) for b in COMPOSERS])
    for c in COMPOSERS:
        sm, rm = zipf(marginals[c])
        st, rt = zipf(flats[c])
        print(f"ZIPF {c} marginal slope={fmt(sm)} r2={fmt(rm)} "
              f"transitions slope={fmt(st)} r2={fmt(rt)}")


if __name__ == "__main__":
    main()
