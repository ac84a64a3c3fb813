"""Measure reward-service throughput.

In-process mode times ``handle_score`` directly, which is the per-request cost
a worker pays. ``--url`` additionally fires the same requests at a running
``vtrkit serve`` instance.

    python scripts/bench_service.py --tokens 1 8 32 64
    python scripts/bench_service.py --url http://127.0.0.1:8000 --concurrency 16
"""
import argparse
import asyncio
import random
import statistics
import string
import time

from vtrkit.service import handle_score


def make_requests(n, lengths, seed=0, vocab_size=3000):
    rnd = random.Random(seed)
    vocab = ["".join(rnd.choice(string.ascii_lowercase) for _ in range(rnd.randint(2, 9)))
             for _ in range(vocab_size)]
    reqs = []
    for _ in range(n):
        target = [rnd.choice(vocab) for _ in range(rnd.choice(lengths))]
        pred = []
        for w in target:
            r = rnd.random()
            if r < 0.1:
                continue  # dropped word
            if r < 0.25:
                w = w[:-1] + rnd.choice(string.ascii_lowercase)
            if rnd.random() < 0.05:
                w = f"[[{w[0]}]]{w[1:]}"
            pred.append(w)
        if rnd.random() < 0.3:
            rnd.shuffle(pred)
        reqs.append({"target": " ".join(target), "prediction": " ".join(pred), "language": "en"})
    return reqs


def in_process(reqs, windows, seconds):
    rates = []
    for _ in range(windows):
        done, t0 = 0, time.perf_counter()
        while time.perf_counter() - t0 < seconds:
            for r in reqs:
                handle_score(r)
            done += len(reqs)
        rates.append(done / (time.perf_counter() - t0))
    return statistics.median(rates)


async def over_http(url, reqs, concurrency):
    import httpx

    limits = httpx.Limits(max_connections=concurrency)
    async with httpx.AsyncClient(base_url=url, limits=limits, timeout=60.0) as client:
        t0 = time.perf_counter()
        resps = await asyncio.gather(*(client.post("/score", json=r) for r in reqs))
        elapsed = time.perf_counter() - t0
    bad = sum(r.status_code != 200 for r in resps)
    return len(reqs) / elapsed, bad


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tokens", type=int, nargs="+", default=[1, 8, 16, 32, 64],
                    help="target lengths in words; each is timed separately")
    ap.add_argument("--mixed", type=int, default=64, help="also time lengths drawn uniformly from 1..N (0 to skip)")
    ap.add_argument("--requests", type=int, default=1000)
    ap.add_argument("--windows", type=int, default=5)
    ap.add_argument("--seconds", type=float, default=1.0)
    ap.add_argument("--url", help="base URL of a running service")
    ap.add_argument("--concurrency", type=int, default=16)
    args = ap.parse_args()

    handle_score({"target": "warm up", "prediction": "warm [[u]]p", "language": "en"})
    cases = [(str(n), [n]) for n in args.tokens]
    if args.mixed:
        cases.append((f"1-{args.mixed}", list(range(1, args.mixed + 1))))
    for label, lengths in cases:
        reqs = make_requests(args.requests, lengths, seed=len(label))
        rate = in_process(reqs, args.windows, args.seconds)
        line = f"tokens {label:>6}: {rate:8.0f} scores/s in-process"
        if args.url:
            http_rate, bad = asyncio.run(over_http(args.url, reqs, args.concurrency))
            line += f", {http_rate:6.0f}/s over HTTP ({bad} non-200)"
        print(line)


if __name__ == "__main__":
    main()
