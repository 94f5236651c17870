"""Normalize generated terms under several strategies and compare the results.

Every step is type-checked (subject reduction), and the normal forms reached
by leftmost-outermost, rightmost-innermost and seeded random strategies must
be alpha-equivalent.
"""

import argparse
import random
import time
from dataclasses import dataclass

from hilbertsem.generators import kernel_context, random_term
from hilbertsem.lam import alpha_eq, show_term, type_eq, type_of
from hilbertsem.normalize import LEFTMOST_OUTERMOST, RIGHTMOST_INNERMOST, RandomRedex, step_once


@dataclass(frozen=True)
class ConfluenceConfig:
    terms: int = 1000
    random_strategies: int = 5
    max_depth: int = 4
    seed: int = 0


def run(cfg: ConfluenceConfig) -> int:
    ctx = kernel_context()
    problems = steps = 0
    for n in range(cfg.terms):
        seed = cfg.seed + n
        term = random_term(seed, cfg.max_depth)
        ty = type_of(ctx, term)
        strategies = [LEFTMOST_OUTERMOST, RIGHTMOST_INNERMOST]
        strategies += [RandomRedex(seed * 10 + k) for k in range(cfg.random_strategies)]
        normals = []
        for strategy in strategies:
            rng = random.Random(strategy.seed) if isinstance(strategy, RandomRedex) else None
            current = term
            while (step := step_once(current, strategy, rng=rng)) is not None:
                current = step.result
                steps += 1
                if not type_eq(type_of(ctx, current), ty):
                    problems += 1
                    print(f"seed {seed}: type changed at {show_term(current)}")
            normals.append(current)
        if not all(alpha_eq(x, normals[0]) for x in normals):
            problems += 1
            print(f"seed {seed}: normal forms differ")
    print(f"{cfg.terms} terms, {len(strategies)} strategies, {steps} steps checked: {problems} problems")
    return problems


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--terms", type=int, default=ConfluenceConfig.terms)
    p.add_argument("--random-strategies", type=int, default=ConfluenceConfig.random_strategies)
    p.add_argument("--max-depth", type=int, default=ConfluenceConfig.max_depth)
    p.add_argument("--seed", type=int, default=ConfluenceConfig.seed)
    a = p.parse_args()
    start = time.perf_counter()
    problems = run(ConfluenceConfig(a.terms, a.random_strategies, a.max_depth, a.seed))
    print(f"{time.perf_counter() - start:.1f}s")
    return 1 if problems else 0


if __name__ == "__main__":
    raise SystemExit(main())
