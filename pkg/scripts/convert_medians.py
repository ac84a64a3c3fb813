"""Convert a public stroke-median file to the vtrkit stroke schema.

Input: one JSON object per line with "character" and "medians" (the layout
used by graphics.txt of the Make Me a Hanzi project). Those coordinates are
y-up with the baseline at y = 900 in a 1024 box, so each point is flipped to
y_down = 900 - y and clamped into [0, 1024].

    python scripts/convert_medians.py graphics.txt strokes.jsonl
"""
import argparse
import json


def convert_point(x, y, em=1024.0, baseline=900.0):
    return [min(max(float(x), 0.0), em), min(max(baseline - float(y), 0.0), em)]


def convert_line(rec):
    strokes = []
    for median in rec["medians"]:
        pts = [convert_point(x, y) for x, y in median]
        dedup = [p for i, p in enumerate(pts) if i == 0 or p != pts[i - 1]]
        if len(dedup) >= 2:
            strokes.append(dedup)
    return {"character": rec["character"], "strokes": strokes}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src")
    ap.add_argument("dst")
    args = ap.parse_args()
    n = skipped = 0
    with open(args.src, encoding="utf-8") as fin, open(args.dst, "w", encoding="utf-8") as fout:
        for line in fin:
            if not line.strip():
                continue
            out = convert_line(json.loads(line))
            if not out["strokes"]:
                skipped += 1
                continue
            fout.write(json.dumps(out, ensure_ascii=False) + "\n")
            n += 1
    print(f"converted {n} glyphs, skipped {skipped}")


if __name__ == "__main__":
    main()
