"""Check the epsilon axiom exhaustively on small one-sorted models.

For each generated open formula F, compares ``exists x. F`` with
``F[x := eps x. F]`` (and the universal/tau dual) in every model with up to
``max_size`` atoms, two unary predicates and every admissible choice function.
"""

import argparse
import time
from dataclasses import dataclass

from hilbertsem.generators import UNARY_SIGNATURE, epsilon_axiom_family
from hilbertsem.logic import Epsilon, Exists, ForAll, Tau, pretty, substitute
from hilbertsem.models import enumerate_models, eval_formula


@dataclass(frozen=True)
class SweepConfig:
    formulas: int = 20
    seed: int = 0
    max_size: int = 3
    show: bool = False


def sweep(cfg: SweepConfig) -> int:
    family = epsilon_axiom_family(cfg.formulas, cfg.seed)
    models = list(enumerate_models(UNARY_SIGNATURE, cfg.max_size))
    failures = 0
    for f in family:
        eps = substitute(f, "x", Epsilon("x", "e", f))
        tau = substitute(f, "x", Tau("x", "e", f))
        bad = sum(
            (eval_formula(m, Exists("x", "e", f)) != eval_formula(m, eps))
            + (eval_formula(m, ForAll("x", "e", f)) != eval_formula(m, tau))
            for m in models
        )
        failures += bad
        if cfg.show:
            print(f"{bad:4d}  {pretty(f)}")
    print(f"{len(family)} formulas x {len(models)} models: {failures} failures")
    return failures


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--formulas", type=int, default=SweepConfig.formulas)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--max-size", type=int, default=SweepConfig.max_size)
    p.add_argument("--show", action="store_true")
    a = p.parse_args()
    start = time.perf_counter()
    failures = sweep(SweepConfig(a.formulas, a.seed, a.max_size, a.show))
    print(f"{time.perf_counter() - start:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
