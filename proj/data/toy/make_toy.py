"""Regenerates the toy CSVs in this directory (deterministic)."""
import csv
import random
from pathlib import Path

rng = random.Random(7)
here = Path(__file__).parent

genres = ["jazz", "rock", "pop", "folk", "metal"]
directors = ["d1", "d2", "d3", "d4"]
items = [f"i{k:02d}" for k in range(15)]
users = [f"u{k:02d}" for k in range(20)]
daytime = ["morning", "evening", "night"]
companion = ["alone", "friends"]

catalog = {}
with open(here / "features.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["item_id", "feature_type", "feature_value"])
    for i in items:
        gs = rng.sample(genres, rng.randint(1, 2))
        d = rng.choice(directors)
        catalog[i] = (gs, d)
        for g in gs:
            w.writerow([i, "genre", g])
        w.writerow([i, "director", d])

taste = {u: {g: rng.uniform(-1, 1) for g in genres + directors} for u in users}
mood = {c: rng.uniform(-0.6, 0.6) for c in daytime + companion}

with open(here / "interactions.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["user_id", "item_id", "rating", "daytime", "companion"])
    for _ in range(400):
        u, i = rng.choice(users), rng.choice(items)
        dt, cp = rng.choice(daytime), rng.choice(companion)
        gs, d = catalog[i]
        s = sum(taste[u][g] for g in gs) / len(gs) * 0.7 + taste[u][d] * 0.3
        s += mood[dt] * (1 if gs[0] in ("jazz", "folk") else -1) + mood[cp]
        r = min(5, max(1, round(3 + 1.5 * s + rng.gauss(0, 0.3))))
        w.writerow([u, i, r, dt if rng.random() > 0.05 else "", cp])
