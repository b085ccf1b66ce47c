#!/usr/bin/env python3
# Copyright 2026 The SmartHand Authors. All Rights Reserved.
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
"""Trains the reference graph briefly on synthetic grasp patterns and writes
SHW1 weights plus SHGA golden activations into tests/fixtures/.

    python3 scripts/make_goldens.py [--out tests/fixtures] [--seed 7]

The model is built by interpreting the graph file, so it always matches the
engine's layer list.
"""
import argparse
import math
import os
import struct
import zlib

import numpy as np
import torch
from torch import nn

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CLASSES = 17
EMPTY = 16

F32, U16 = 0, 2


# ---------------------------------------------------------------- graph file

def parse_graph(path):
    layers = []
    for raw in open(path):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        kind, name, *kv = line
        attrs = dict(item.split("=", 1) for item in kv)
        if "src" in attrs:
            src = attrs.pop("src").split(",")
        elif kind == "input":
            src = []
        else:
            src = [layers[-1]["name"]]
        layers.append({"kind": kind, "name": name, "src": src, **attrs})
    return layers


class GraphNet(nn.Module):
    def __init__(self, layers):
        super().__init__()
        self.layers = layers
        self.mods = nn.ModuleDict()
        shapes = {}
        for l in layers:
            k, n = l["kind"], l["name"]
            if k == "input":
                shapes[n] = tuple(int(x) for x in l["shape"].split("x"))
                continue
            s = shapes[l["src"][0]]
            if k == "conv":
                out, ks = int(l["out"]), int(l.get("k", 1))
                st, pad = int(l.get("stride", 1)), int(l.get("pad", 0))
                self.mods[n] = nn.Conv2d(s[0], out, ks, st, pad, bias=True)
                h = (s[1] + 2 * pad - ks) // st + 1
                w = (s[2] + 2 * pad - ks) // st + 1
                shapes[n] = (out, h, w)
            elif k == "bn":
                self.mods[n] = nn.BatchNorm2d(s[0], eps=float(l.get("eps", 1e-5)))
                shapes[n] = s
            elif k == "maxpool":
                p = int(l.get("size", 2))
                shapes[n] = (s[0], s[1] // p, s[2] // p)
            elif k == "gap":
                shapes[n] = (s[0],)
            elif k == "concat":
                shapes[n] = (sum(shapes[x][0] for x in l["src"]),)
            elif k == "fc":
                self.mods[n] = nn.Linear(int(np.prod(s)), int(l["out"]))
                shapes[n] = (int(l["out"]),)
            else:
                shapes[n] = s
        self.shapes = shapes

    def forward(self, frame, imu=None, keep=False):
        acts = {}
        for l in self.layers:
            k, n, src = l["kind"], l["name"], l["src"]
            x = acts[src[0]] if src else None
            if k == "input":
                y = frame if not acts else imu
            elif k in ("conv", "bn", "fc"):
                y = self.mods[n](x)
            elif k == "relu":
                y = torch.relu(x)
            elif k == "maxpool":
                y = nn.functional.max_pool2d(x, int(l.get("size", 2)))
            elif k == "add":
                y = x + acts[src[1]]
            elif k == "gap":
                y = x.mean(dim=(2, 3))
            elif k == "concat":
                y = torch.cat([acts[s] for s in src], dim=1)
            elif k == "softmax":
                y = torch.softmax(x, dim=1)
            else:
                raise ValueError(k)
            acts[n] = y
        last = self.layers[-1]
        logits = acts[last["src"][0]] if last["kind"] == "softmax" else acts[last["name"]]
        return (logits, acts) if keep else logits


# ---------------------------------------------------------------- synthetic data

def load_mask():
    b = open(os.path.join(ROOT, "data", "hand_mask.shmk"), "rb").read()
    return np.frombuffer(b[4:4 + 1024], dtype=np.uint8).reshape(32, 32).astype(np.float32)


def class_blobs(rng):
    blobs = []
    for c in range(CLASSES - 1):
        n = 2 + c % 3
        blobs.append([(rng.uniform(4, 28), rng.uniform(6, 26), rng.uniform(2.0, 5.0)) for _ in range(n)])
    return blobs


def sample(rng, blobs, mask, label, n):
    yy, xx = np.mgrid[0:32, 0:32].astype(np.float32)
    frames = np.zeros((n, 32, 32), dtype=np.float32)
    imu = np.zeros((n, 3), dtype=np.float32)
    for i in range(n):
        img = rng.uniform(0, 80) + rng.normal(0, 25, (32, 32))
        if label != EMPTY:
            amp = rng.uniform(0.6, 1.0)
            for (cy, cx, s) in blobs[label]:
                cy += rng.normal(0, 1.0)
                cx += rng.normal(0, 1.0)
                img += amp * 3200 * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * s * s))
        frames[i] = np.clip(np.rint(img), 0, 4095) * mask
        # orientation weakly tied to the class
        base = (label % 5 - 2) * 0.4
        imu[i] = [base + rng.normal(0, 0.3), rng.normal(0, 0.5), 0.0]
    return frames, imu


def dataset(rng, blobs, mask, per_class):
    xs, ims, ys = [], [], []
    for c in range(CLASSES):
        f, m = sample(rng, blobs, mask, c, per_class)
        xs.append(f)
        ims.append(m)
        ys += [c] * per_class
    return np.concatenate(xs), np.concatenate(ims), np.array(ys)


# ---------------------------------------------------------------- record files

def record(name, dims, dtype, values):
    fmt = "<%d%s" % (len(values), "f" if dtype == F32 else "H")
    nb = name.encode()
    head = struct.pack("<H", len(nb)) + nb + struct.pack("<BB", dtype, len(dims))
    head += b"".join(struct.pack("<I", d) for d in dims)
    return head + struct.pack(fmt, *values)


def write_records(path, magic, recs):
    body = magic + struct.pack("<HI", 1, len(recs)) + b"".join(recs)
    with open(path, "wb") as f:
        f.write(body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF))


def f32list(t):
    return t.detach().cpu().numpy().astype(np.float32).ravel().tolist()


def export_weights(net, path):
    recs = []
    for l in net.layers:
        n = l["name"]
        if n not in net.mods:
            continue
        for key, t in net.mods[n].state_dict().items():
            if key == "num_batches_tracked":
                continue
            recs.append(record(n + "." + key, list(t.shape), F32, f32list(t)))
    write_records(path, b"SHW1", recs)
    return len(recs)


def export_goldens(net, frames, imu, full, path, with_imu):
    recs = []
    with torch.no_grad():
        for i in range(len(frames)):
            codes = frames[i].astype(np.uint16)
            x = torch.from_numpy(codes.astype(np.float32) / np.float32(4095.0)).view(1, 1, 32, 32)
            m = torch.from_numpy(imu[i:i + 1]) if with_imu else None
            logits, acts = net(x, m, keep=True)
            p = "%04d/" % i
            recs.append(record(p + "input", [32, 32], U16, codes.ravel().tolist()))
            if with_imu:
                recs.append(record(p + "imu", [3], F32, imu[i].tolist()))
            if i < full:
                for l in net.layers:
                    if l["kind"] == "input":
                        continue
                    a = acts[l["name"]][0]
                    recs.append(record(p + "layer/" + l["name"], list(a.shape), F32, f32list(a)))
            recs.append(record(p + "logits", [logits.shape[1]], F32, f32list(logits[0])))
    write_records(path, b"SHGA", recs)


# ---------------------------------------------------------------- main

def train(net, x, m, y, epochs, seed, with_imu):
    torch.manual_seed(seed)
    opt = torch.optim.Adam(net.parameters(), lr=3e-3)
    xt = torch.from_numpy(x / np.float32(4095.0)).unsqueeze(1)
    mt = torch.from_numpy(m)
    yt = torch.from_numpy(y)
    n = len(y)
    for ep in range(epochs):
        net.train()
        perm = torch.randperm(n)
        total = 0.0
        for b in range(0, n, 64):
            idx = perm[b:b + 64]
            opt.zero_grad()
            out = net(xt[idx], mt[idx] if with_imu else None)
            loss = nn.functional.cross_entropy(out, yt[idx])
            loss.backward()
            opt.step()
            total += loss.item() * len(idx)
        print("  epoch %d loss %.4f" % (ep, total / n))
    net.eval()


def build(name, graph_file, with_imu, args, blobs, mask):
    torch.manual_seed(args.seed)
    net = GraphNet(parse_graph(os.path.join(ROOT, "data", graph_file)))
    rng = np.random.default_rng(args.seed + 1)
    x, m, y = dataset(rng, blobs, mask, args.per_class)
    print("%s: training on %d frames" % (name, len(y)))
    train(net, x, m, y, args.epochs, args.seed, with_imu)

    test_rng = np.random.default_rng(args.seed + 2)
    tx, tm, ty = dataset(test_rng, blobs, mask, math.ceil(args.goldens / CLASSES))
    order = test_rng.permutation(len(ty))[: args.goldens]
    tx, tm, ty = tx[order], tm[order], ty[order]
    with torch.no_grad():
        pred = net(torch.from_numpy(tx / np.float32(4095.0)).unsqueeze(1), torch.from_numpy(tm) if with_imu else None)
    acc = (pred.argmax(1).numpy() == ty).mean()
    print("  held-out accuracy %.3f" % acc)

    os.makedirs(args.out, exist_ok=True)
    n = export_weights(net, os.path.join(args.out, name + ".shw1"))
    export_goldens(net, tx, tm, args.full, os.path.join(args.out, name + ".shga"), with_imu)
    print("  wrote %d weight records, %d goldens (%d with layers)" % (n, len(ty), args.full))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(ROOT, "tests", "fixtures"))
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--per-class", type=int, default=120)
    ap.add_argument("--epochs", type=int, default=6)
    ap.add_argument("--goldens", type=int, default=200)
    ap.add_argument("--full", type=int, default=20, help="goldens that also carry per-layer activations")
    args = ap.parse_args()
    torch.set_num_threads(max(1, os.cpu_count() or 1))

    mask = load_mask()
    blobs = class_blobs(np.random.default_rng(args.seed))
    build("reference", "reference.graph", False, args, blobs, mask)
    build("reference_imu", "reference_imu.graph", True, args, blobs, mask)


if __name__ == "__main__":
    main()
