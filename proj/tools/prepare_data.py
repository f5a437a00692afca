#!/usr/bin/env python3
"""Build Fashion-MNIST IDX files.

Preferred source is the official distribution (four .gz files in --source).
When those are unreachable, the npm package `fashion-mnist` (per-class JSON)
can be used instead: `npm pack fashion-mnist && tar xzf fashion-mnist-*.tgz`,
then pass the extracted `package/src/clothes` directory as --source.

Output: train-images-idx3-ubyte, train-labels-idx1-ubyte,
t10k-images-idx3-ubyte, t10k-labels-idx1-ubyte in --out. The JSON route
takes 6000 images per class for the training file and the next 1000 for the
test file, shuffled with a fixed seed so the files are reproducible.
"""
import argparse
import gzip
import json
import os
import random
import shutil
import struct
import sys

TRAIN_PER_CLASS = 6000
TEST_PER_CLASS = 1000
ROWS = COLS = 28

IDX_NAMES = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
]


def write_idx(out_dir, prefix, records):
    images = os.path.join(out_dir, prefix + "-images-idx3-ubyte")
    labels = os.path.join(out_dir, prefix + "-labels-idx1-ubyte")
    with open(images, "wb") as fi, open(labels, "wb") as fl:
        fi.write(struct.pack(">iiii", 0x803, len(records), ROWS, COLS))
        fl.write(struct.pack(">ii", 0x801, len(records)))
        for label, pixels in records:
            fi.write(bytes(pixels))
            fl.write(bytes([label]))
    print(f"wrote {images} ({len(records)} records)")


def from_json(src, out_dir, seed):
    train, test = [], []
    for c in range(10):
        path = os.path.join(src, f"{c}.json")
        with open(path) as f:
            data = json.load(f)["data"]
        # the npm export contains occasional malformed rows; drop them
        data = [row for row in data if len(row) == ROWS * COLS]
        if len(data) < TRAIN_PER_CLASS + TEST_PER_CLASS:
            sys.exit(f"{path}: only {len(data)} images, need 7000")
        train += [(c, row) for row in data[:TRAIN_PER_CLASS]]
        test += [(c, row) for row in data[TRAIN_PER_CLASS:TRAIN_PER_CLASS + TEST_PER_CLASS]]
    rng = random.Random(seed)
    rng.shuffle(train)
    rng.shuffle(test)
    write_idx(out_dir, "train", train)
    write_idx(out_dir, "t10k", test)


def from_gz(src, out_dir):
    for name in IDX_NAMES:
        with gzip.open(os.path.join(src, name + ".gz"), "rb") as f:
            with open(os.path.join(out_dir, name), "wb") as g:
                shutil.copyfileobj(f, g)
        print(f"wrote {os.path.join(out_dir, name)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--source", required=True,
                    help="directory with official *.gz files or npm clothes/*.json")
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", type=int, default=20230301)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    if os.path.exists(os.path.join(args.source, IDX_NAMES[0] + ".gz")):
        from_gz(args.source, args.out)
    else:
        from_json(args.source, args.out, args.seed)


if __name__ == "__main__":
    main()
