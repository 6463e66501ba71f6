"""Write the data files used by the CLI tests.

    python scripts/make_cli_fixtures.py

normal_1000.txt uses the first seed (counting from 0) at which all seven
tests fail to reject; the seed is written into the file's comment line.
laplace_1000.txt and laplace_1000.csv use a fixed seed.
"""
from pathlib import Path

import numpy as np

from ecfnorm import TEST_NAMES, run_test

OUT = Path(__file__).resolve().parents[1] / "tests" / "data"
LAPLACE_SEED = 1000


def write_column(path, x, seed, what):
    lines = [f"# {what}, numpy default_rng({seed}), n={x.size}"] + [repr(float(v)) for v in x]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    seed = 0
    while True:
        x = np.random.default_rng(seed).standard_normal(1000)
        if not any(run_test(name, x).reject for name in TEST_NAMES):
            break
        seed += 1
    write_column(OUT / "normal_1000.txt", x, seed, "standard normal")
    print(f"normal_1000.txt: seed {seed}")

    y = np.random.default_rng(LAPLACE_SEED).laplace(size=1000)
    write_column(OUT / "laplace_1000.txt", y, LAPLACE_SEED, "Laplace(0, 1)")
    rows = ["id,group,value"] + [f"{i},{'a' if i % 2 else 'b'},{v!r}" for i, v in enumerate(y.tolist())]
    (OUT / "laplace_1000.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print("ECFT on laplace_1000:", run_test("ECFT", y))


if __name__ == "__main__":
    main()
