#!/usr/bin/env python3
"""Regenerates the shipped example decks under data/decks/.

Example 2 is fully pinned. Examples 1 and 3 only publish bandwidth and
distance ranges, so their per-net values are drawn from those ranges with a
fixed seed; treat them as approximate.
"""
import csv
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "decks")
NET_HEADER = ["net", "chiplet_a", "edge_a", "chiplet_b", "edge_b", "distance_mm", "bw_gbps"]


def write(deck, name, header, rows, note):
    path = os.path.join(ROOT, deck)
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, name), "w", newline="") as f:
        for line in note:
            f.write(f"# {line}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def example2():
    note = ["Example 2: 16 tiles of one 12x12 mm compute die and two 12x6 mm memory dies.",
            "Fully pinned: every net carries 1604 Gbps."]
    dies, nets = [], []
    for i in range(16):
        dies += [(f"cmp{i}", 12, 12), (f"memA{i}", 12, 6), (f"memB{i}", 12, 6)]
        nets.append((f"cm{i}a", f"cmp{i}", "north", f"memA{i}", "south", 5, 1604))
        nets.append((f"cm{i}b", f"cmp{i}", "south", f"memB{i}", "north", 5, 1604))
    for i in range(16):
        nets.append((f"ring{i}", f"cmp{i}", "east", f"cmp{(i + 1) % 16}", "west", 5, 1604))
    for j, d in enumerate([60, 66, 72, 80]):
        nets.append((f"mm{j}", f"memA{j}", "north", f"memB{j + 8}", "south", d, 1604))
    write("example2", "floorplan.csv", ["chiplet", "width_mm", "height_mm"], dies, note)
    write("example2", "netlist.csv", NET_HEADER, nets, note)


def example1(rng):
    note = ["Example 1: 6 chiplets. APPROXIMATE: per-net bandwidths are drawn from the",
            "published 2033-7228 Gbps range with a fixed seed; the two 6 mm nets are pinned at 1604 Gbps."]
    dies = [("soc0", 8, 8), ("soc1", 8, 8)] + [(f"io{i}", 3.44, 3.44) for i in range(4)]
    nets = []
    sides = ["north", "east", "south", "west"]
    k = 0
    for i in range(4):
        for s in range(2):
            nets.append((f"n{k}", f"soc{s}", sides[i], f"io{i}", sides[(i + 2) % 4] if s == 0 else sides[(i + 1) % 4],
                         0.5, rng.randint(2033, 7228)))
            k += 1
    for j in range(4):
        nets.append((f"n{k}", "soc0", "east" if j < 2 else "south", "soc1", "west" if j < 2 else "north",
                     0.5, rng.randint(2033, 7228)))
        k += 1
    nets.append((f"n{k}", "io0", "west", "io2", "east", 6, 1604))
    nets.append((f"n{k + 1}", "io1", "west", "io3", "east", 6, 1604))
    write("example1", "floorplan.csv", ["chiplet", "width_mm", "height_mm"], dies, note)
    write("example1", "netlist.csv", NET_HEADER, nets, note)


def example3(rng):
    note = ["Example 3: wafer-scale, 40 dies of 40x40 mm. APPROXIMATE: bandwidths and distances are",
            "drawn from the published ranges with a fixed seed (short nets 0.5-25 mm at 26-600 Gbps,",
            "long nets 35-75 mm at 26-1200 Gbps)."]
    sides = ["north", "east", "south", "west"]
    dies = [(f"d{i}", 40, 40) for i in range(40)]
    # keep every edge feasible for the densest long-reach electrical link
    cap = 20.0 * 557.0 * 0.97
    load = {}
    nets = []

    def place(prefix, count, dlo, dhi, bwlo, bwhi):
        made = 0
        while made < count:
            a, b = rng.sample(range(40), 2)
            ea, eb = rng.choice(sides), rng.choice(sides)
            bw = rng.randint(bwlo, bwhi)
            ka, kb = (a, ea), (b, eb)
            if load.get(ka, 0) + bw > cap or load.get(kb, 0) + bw > cap:
                continue
            load[ka] = load.get(ka, 0) + bw
            load[kb] = load.get(kb, 0) + bw
            d = round(rng.uniform(dlo, dhi), 2)
            nets.append((f"{prefix}{made}", f"d{a}", ea, f"d{b}", eb, d, bw))
            made += 1

    place("s", 100, 0.5, 25.0, 26, 600)
    place("l", 780, 35.0, 75.0, 26, 1200)
    write("example3", "floorplan.csv", ["chiplet", "width_mm", "height_mm"], dies, note)
    write("example3", "netlist.csv", NET_HEADER, nets, note)


if __name__ == "__main__":
    example2()
    example1(random.Random(20240101))
    example3(random.Random(20240303))
