"""Tunable knobs shared by the engine, the evaluators and the CLI."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    # listing-fidelity switch: keep ground comparisons symbolic, keep guard
    # conjunct order significant and restrict guard-entailment reasoning to
    # syntactic equality
    defer_comparisons: bool = False
    # reduction budgets
    hnf_fuel: int = 1000
    ueval_fuel: int = 1000
    small_step_fuel: int = 10_000
    # recursion bound for expanding one rule against a fact set
    expansion_depth: int = 64
    # stored derivations per fact
    trace_cap: int = 16
    # clean behaviour: auto | optimized | general
    clean_mode: str = "auto"
    # steps used to probe rule productivity for the auto clean mode
    productivity_probe: int = 4

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


DEFAULT = Config()
