"""Regenerates the synthetic 10-scene mini-database under minidb/.

    python3 make_minidb.py
"""
import os

import numpy as np

W, H = 96, 80
HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "minidb")
yy, xx = np.mgrid[0:H, 0:W].astype(float)


def smooth_noise(rng, scale):
    coarse = rng.random((H // scale + 2, W // scale + 2))
    ys = np.linspace(0, coarse.shape[0] - 2, H)
    xs = np.linspace(0, coarse.shape[1] - 2, W)
    y0, x0 = ys.astype(int), xs.astype(int)
    fy, fx = (ys - y0)[:, None], (xs - x0)[None, :]
    c = coarse
    return (c[y0][:, x0] * (1 - fy) * (1 - fx) + c[y0 + 1][:, x0] * fy * (1 - fx)
            + c[y0][:, x0 + 1] * (1 - fy) * fx + c[y0 + 1][:, x0 + 1] * fy * fx)


def fractal(rng, octaves=(16, 8, 4, 2)):
    img = sum(smooth_noise(rng, s) / (i + 1) for i, s in enumerate(octaves))
    img -= img.min()
    return img / img.max()


def facade(rng):
    img = np.full((H, W), 0.75)
    for y in range(6, H - 10, 14):
        for x in range(6, W - 8, 13):
            img[y:y + 9, x:x + 7] = 0.2
    return img


def clutter(rng):
    img = np.full((H, W), 0.5)
    for _ in range(40):
        x, y = rng.integers(0, W - 4), rng.integers(0, H - 4)
        w, h = rng.integers(4, 22), rng.integers(4, 18)
        img[y:y + h, x:x + w] = rng.random()
    return img


def pebbles(rng):
    img = 0.35 + 0.1 * fractal(rng)
    for _ in range(25):
        cx, cy = rng.random() * W, rng.random() * H
        rx, ry = 3 + rng.random() * 7, 3 + rng.random() * 6
        d = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2
        img = np.where(d < 1, 0.5 + 0.45 * rng.random() * (1 - d), img)
    return img


def hills(rng):
    horizon = 40 + 8 * np.sin(xx / 13.0) + 4 * np.sin(xx / 5.0 + 1)
    return np.where(yy < horizon, 0.85 - 0.3 * yy / H, 0.3 + 0.1 * xx / W)


def tiles(rng):
    return np.where(((xx // 12) + (yy // 12)) % 2 == 0, 0.2, 0.8)


def text(rng):
    img = np.full((H, W), 0.9)
    for row in range(6, H - 8, 11):
        x = 4
        while x < W - 6:
            glyph = rng.random((7, 5)) < 0.45
            img[row:row + 7, x:x + 5] = np.where(glyph, 0.1, img[row:row + 7, x:x + 5])
            x += 7 + (4 if rng.random() < 0.2 else 0)
    return img


def fruit(rng):
    img = np.full((H, W), 0.15)
    for cx, cy, r, v in [(28, 36, 14, 0.85), (58, 30, 11, 0.7), (70, 55, 12, 0.95)]:
        img = np.where((xx - cx) ** 2 + (yy - cy) ** 2 < r * r, v, img)
    return img


def bark(rng):
    n = fractal(rng, (8, 4, 2))
    stripes = np.sin(xx / 2.5 + 6 * n)
    return 0.5 + 0.35 * stripes * (0.6 + 0.4 * n)


def street(rng):
    img = np.where(yy > 35, 0.35, 0.7 - 0.2 * yy / 35)
    for s in (-1.2, -0.4, 0.4, 1.2):
        line = np.abs(xx - (48 + s * (yy - 35))) < 1.0
        img = np.where(line & (yy > 35), 0.95, img)
    for x0, w, h, v in [(4, 18, 30, 0.25), (26, 12, 22, 0.55), (66, 14, 28, 0.2), (82, 12, 18, 0.6)]:
        img[35 - h:35, x0:x0 + w] = v
    return img + 0.08 * (fractal(rng) - 0.5)


# (generator, outdoor, human-made, simple)
SCENES = [
    (facade, 1, 1, 1),
    (clutter, 0, 1, 0),
    (lambda rng: fractal(rng), 1, 0, 0),
    (pebbles, 1, 0, 0),
    (hills, 1, 0, 1),
    (tiles, 0, 1, 1),
    (text, 0, 1, 0),
    (fruit, 0, 0, 1),
    (bark, 1, 0, 0),
    (street, 1, 1, 0),
]


def main():
    refs = os.path.join(OUT, "refs")
    os.makedirs(refs, exist_ok=True)
    rows = ["scene_id,f,g,h"]
    for i, (gen, f, g, h) in enumerate(SCENES, start=1):
        rng = np.random.default_rng(1000 + i)
        img = gen(rng)
        img = img + rng.normal(0.0, 2.0 / 255.0, img.shape)
        data = np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
        with open(os.path.join(refs, f"scene_{i:02d}.pgm"), "wb") as fh:
            fh.write(f"P5\n{W} {H}\n255\n".encode())
            fh.write(data.tobytes())
        rows.append(f"{i},{f},{g},{h}")
    with open(os.path.join(OUT, "labels.csv"), "w") as fh:
        fh.write("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
