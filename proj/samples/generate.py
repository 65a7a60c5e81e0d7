#!/usr/bin/env python3
# Copyright 2026 The lttext Authors
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

"""Regenerates the synthetic sample corpus in this directory.

Output is a pure function of SEED; rerunning overwrites every file.
"""

import json
import math
import random
from pathlib import Path

SEED = 20260417
ROOT = Path(__file__).resolve().parent

CATEGORIES = [
    "blurred", "artistic", "glass", "single_char", "distorted", "inverse", "delimited",
    "dense", "overlapped", "occluded", "low_contrast", "complex_background", "others",
]
WORDS = ["OPEN", "exit", "Sale", "CAFÉ", "pizza", "24h", "STOP", "hotel", "bank", "No.7",
         "park", "Main St", "east", "tea", "bus", "museum"]


def write(rel, text):
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def dump(rel, obj, compact=False):
    text = json.dumps(obj, ensure_ascii=False, separators=(",", ":")) if compact else \
        json.dumps(obj, ensure_ascii=False, indent=1)
    write(rel, text + "\n")


def quad(x, y, w, h, tilt=0.0):
    c, s = math.cos(tilt), math.sin(tilt)
    cx, cy = x + w / 2, y + h / 2
    out = []
    for dx, dy in ((-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)):
        out.append([round(cx + dx * c - dy * s, 1), round(cy + dx * s + dy * c, 1)])
    return out


def curved(x, y, w, h, bend, n=6):
    top, bottom = [], []
    for k in range(n + 1):
        t = k / n
        off = bend * math.sin(math.pi * t)
        top.append([round(x + w * t, 1), round(y - off, 1)])
        bottom.append([round(x + w * t, 1), round(y + h - off, 1)])
    return top + bottom[::-1]


def jitter(poly, rng, amount):
    dx, dy = rng.uniform(-amount, amount), rng.uniform(-amount, amount)
    s = rng.uniform(0.9, 1.1)
    cx = sum(p[0] for p in poly) / len(poly)
    cy = sum(p[1] for p in poly) / len(poly)
    return [[round(cx + (p[0] - cx) * s + dx, 1), round(cy + (p[1] - cy) * s + dy, 1)] for p in poly]


def make_image(rng, image_id, source, width=640, height=480, max_words=8):
    instances = []
    n = rng.randint(1, max_words)
    for k in range(n):
        col, row = k % 4, k // 4
        x = 20 + col * 150 + rng.uniform(0, 20)
        y = 30 + row * 110 + rng.uniform(0, 30)
        w, h = rng.uniform(60, 120), rng.uniform(24, 48)
        poly = curved(x, y, w, h, rng.uniform(5, 15)) if rng.random() < 0.2 else quad(x, y, w, h, rng.uniform(-0.2, 0.2))
        care = rng.random() > 0.12
        word = rng.choice(WORDS) if care else None
        cats = sorted(rng.sample(CATEGORIES, rng.choice([0, 0, 1, 1, 2, 3]))) if care else []
        instances.append({
            "polygon": poly, "care": care, "transcription": word, "categories": cats,
            "word_level": word is None or " " not in word,
            "script": "unknown" if word is None else "latin",
        })
    return {"image_id": image_id, "file_name": image_id + ".jpg", "width": width, "height": height,
            "source_dataset": source, "instances": instances}


def manifest(name, split, images):
    return {"schema_version": "1.0", "dataset": {"name": name, "split": split, "images": images}}


def detections(name, gt_images, rng, recall, care_bias):
    results = []
    for img in gt_images:
        polys, scores = [], []
        for inst in img["instances"]:
            hard = len(inst["categories"]) > 0
            p = recall * (care_bias if hard else 1.0)
            if rng.random() < p:
                polys.append(jitter(inst["polygon"], rng, 6))
                scores.append(round(rng.uniform(0.5, 1.0), 3))
        for _ in range(rng.randint(0, 2)):
            polys.append(quad(rng.uniform(0, 500), rng.uniform(0, 400), rng.uniform(30, 90), rng.uniform(15, 40)))
            scores.append(round(rng.uniform(0.1, 0.7), 3))
        results.append({"image_id": img["image_id"], "polygons": polys, "scores": scores})
    return {"schema_version": "1.0", "detector": name, "results": results}


def pgm(rel, width, height, pixels):
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(f"P5\n{width} {height}\n255\n".encode() + bytes(pixels))


def scene(rng, width, height):
    # smooth gradient with a few rectangles
    gx, gy, base = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(60, 190)
    px = [int(base + gx * 40 * x / width + gy * 40 * y / height) for y in range(height) for x in range(width)]
    for _ in range(rng.randint(2, 5)):
        x0, y0 = rng.randrange(width - 8), rng.randrange(height - 8)
        x1, y1 = rng.randint(x0 + 4, width), rng.randint(y0 + 4, height)
        v = rng.randrange(256)
        for y in range(y0, y1):
            for x in range(x0, x1):
                px[y * width + x] = v
    return [min(255, max(0, v)) for v in px]


def main():
    rng = random.Random(SEED)

    # Category-annotated benchmark and two detectors.
    ltb = [make_image(rng, f"ltb_{i:04d}", "ltb") for i in range(200)]
    dump("ltb/ltb_gt.json", manifest("ltb_sample", "test", ltb))
    dump("ltb/det_strong.json", detections("strong", ltb, rng, 0.9, 0.8))
    dump("ltb/det_weak.json", detections("weak", ltb, rng, 0.7, 0.5))

    # Source formats.
    for i in range(5):
        img = make_image(rng, f"img_{i + 1}", "ic15", 1280, 720)
        lines = []
        for inst in img["instances"]:
            coords = ",".join(str(int(round(v))) for p in inst["polygon"][:4] for v in p) if len(inst["polygon"]) == 4 \
                else ",".join(str(int(round(v))) for v in (inst["polygon"][0] + inst["polygon"][len(inst["polygon"]) // 2 - 1] +
                                                          inst["polygon"][len(inst["polygon"]) // 2] + inst["polygon"][-1]))
            lines.append(coords + "," + (inst["transcription"] or "###"))
        write(f"formats/icdar/gt_img_{i + 1}.txt", "\n".join(lines) + "\n")
    write("formats/icdar/sizes.csv", "image_id,width,height\n" + "".join(f"img_{i + 1},1280,720\n" for i in range(5)))
    for i in range(3):
        img = make_image(rng, f"tt_{i}", "total_text")
        lines = []
        for inst in img["instances"]:
            xs = " ".join(str(int(round(p[0]))) for p in inst["polygon"])
            ys = " ".join(str(int(round(p[1]))) for p in inst["polygon"])
            word = inst["transcription"] or "#"
            ornt = "#" if word == "#" else ("c" if len(inst["polygon"]) > 4 else "h")
            lines.append(f"x: [[{xs}]], y: [[{ys}]], ornt: [u'{ornt}'], transcriptions: [u'{word}']")
        write(f"formats/total_text/poly_gt_tt_{i}.txt", "\n".join(lines) + "\n")
    coco = {"imgs": {}, "anns": {}}
    ann = 1000
    for i in range(4):
        coco["imgs"][str(i + 1)] = {"file_name": f"COCO_train2014_{i + 1:012d}.jpg", "width": 640, "height": 480,
                                    "set": "train" if i < 3 else "val"}
        for _ in range(rng.randint(1, 4)):
            x, y = rng.uniform(0, 500), rng.uniform(0, 400)
            w, h = rng.uniform(30, 120), rng.uniform(15, 40)
            legible = rng.random() < 0.8
            a = {"image_id": i + 1, "bbox": [round(x, 1), round(y, 1), round(w, 1), round(h, 1)],
                 "legibility": "legible" if legible else "illegible",
                 "language": "english" if rng.random() < 0.85 else "not english"}
            if legible:
                a["utf8_string"] = rng.choice(WORDS)
            coco["anns"][str(ann)] = a
            ann += 1
    dump("formats/coco_text.json", coco)

    # Per-dataset manifests and a merge plan.
    sizes = {"ic13": (229, 233), "ic15": (1000, 500), "art": (120, None), "mlt": (200, None), "lsvt": (90, None)}
    plan = ['name = "joint_sample"', "require_at_least_one_instance = true", ""]
    for name, (a, b) in sizes.items():
        def images(tag, n):
            out = []
            for k in range(n):
                img = make_image(rng, f"{name}_{tag}{k:04d}", name, max_words=5)
                if rng.random() < 0.04:
                    img["instances"] = []
                if name == "mlt" and rng.random() < 0.3:
                    for inst in img["instances"]:
                        inst["script"] = "non_latin"
                        inst["transcription"] = "مرحبا" if inst["care"] else None
                out.append(img)
            return out
        if b is None:
            dump(f"jdl/{name}.json", manifest(name, "unsplit", images("", a)), compact=True)
            policy = "english_only_then_ratio" if name == "mlt" else "ratio"
            plan += ["[[datasets]]", f'name = "{name}"', f'policy = "{policy}"', "train_fraction = 0.8",
                     f'manifests = ["{name}.json"]', ""]
        else:
            dump(f"jdl/{name}_train.json", manifest(name, "train", images("tr", a)), compact=True)
            dump(f"jdl/{name}_test.json", manifest(name, "test", images("te", b)), compact=True)
            plan += ["[[datasets]]", f'name = "{name}"', 'policy = "keep_original"',
                     f'manifests = ["{name}_train.json", "{name}_test.json"]', ""]
    write("jdl/plan.toml", "\n".join(plan))

    # Images for near-duplicate detection: 24 scenes, some with light edits.
    for i in range(24):
        w, h = 48, 36
        px = scene(rng, w, h)
        pgm(f"images/scene_{i:02d}.pgm", w, h, px)
        if i % 4 == 0:
            stamped = list(px)
            for y in range(h - 5, h - 2):
                for x in range(w - 9, w - 3):
                    stamped[y * w + x] = 255
            pgm(f"images/scene_{i:02d}_copy.pgm", w, h, stamped)
        if i % 8 == 0:
            brighter = [min(255, v + 12) for v in px]
            pgm(f"images/scene_{i:02d}_bright.pgm", w, h, brighter)

    # Reconstruction-loss triple.
    w, h = 64, 48
    image = scene(rng, w, h)
    recon = [min(255, max(0, v + rng.randint(-20, 20))) for v in image]
    guide = [0] * (w * h)
    for y in range(12, 30):
        for x in range(8, 56):
            guide[y * w + x] = 230
    pgm("loss/image.pgm", w, h, image)
    pgm("loss/recon.pgm", w, h, recon)
    pgm("loss/guidance.pgm", w, h, guide)

    # Cross-dataset F-measures for the gap report.
    rows = ["method,train,test,f_measure"]
    sets = ["TotalText", "CTW1500", "ICDAR15"]
    for method, base in (("ModelA", 86.0), ("ModelB", 84.0)):
        for tr in sets:
            for te in sets:
                f = base + rng.uniform(-2, 2) - (0 if tr == te else rng.uniform(4, 15))
                rows.append(f"{method},{tr},{te},{f:.1f}")
    write("gap_results.csv", "\n".join(rows) + "\n")

    write("config.toml", 'threads = "4"\nlog-level = "warn"\n')


if __name__ == "__main__":
    main()
