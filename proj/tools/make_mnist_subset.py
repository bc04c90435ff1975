#!/usr/bin/env python3
# Copyright 2026 The qsfl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds a cached MNIST subset in IDX format from the `mnist` npm package.

The npm package ships 10k genuine MNIST digits as normalized floats. This
script re-quantizes them to bytes and writes the standard IDX file pair for
a train and a test split (first 80% of each digit to train).

    tools/make_mnist_subset.py --out data/mnist-subset
"""
import argparse
import json
import pathlib
import struct
import subprocess
import tarfile
import tempfile

PIXELS = 28 * 28


def fetch_digits(workdir: pathlib.Path) -> pathlib.Path:
    subprocess.run(["npm", "pack", "mnist@1.1.0"], cwd=workdir, check=True,
                   stdout=subprocess.DEVNULL)
    tgz = next(workdir.glob("mnist-*.tgz"))
    with tarfile.open(tgz) as tar:
        tar.extractall(workdir)
    return workdir / "package" / "src" / "digits"


def write_idx(path: pathlib.Path, images, labels):
    with open(path.with_name(path.name + "-images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))
    with open(path.with_name(path.name + "-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/mnist-subset")
    ap.add_argument("--digits", help="existing digits/ directory (skips npm)")
    ap.add_argument("--train-fraction", type=float, default=0.8)
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        digits = pathlib.Path(args.digits) if args.digits else fetch_digits(pathlib.Path(tmp))
        train, test = [], []
        for d in range(10):
            flat = json.loads((digits / f"{d}.json").read_text())["data"]
            assert len(flat) % PIXELS == 0
            samples = [
                [min(255, max(0, round(v * 255))) for v in flat[i:i + PIXELS]]
                for i in range(0, len(flat), PIXELS)
            ]
            cut = int(len(samples) * args.train_fraction)
            train += [(s, d) for s in samples[:cut]]
            test += [(s, d) for s in samples[cut:]]
    # Interleave labels so prefixes of the files stay class-balanced.
    for name, rows in (("train", train), ("t10k", test)):
        by_label = [[r for r in rows if r[1] == d] for d in range(10)]
        mixed = []
        for i in range(max(len(b) for b in by_label)):
            mixed += [b[i] for b in by_label if i < len(b)]
        write_idx(out / name, [r[0] for r in mixed], [r[1] for r in mixed])
        print(f"{name}: {len(mixed)} samples")


if __name__ == "__main__":
    main()
