from meloid.strategy.syntax import (
    BUILTIN_STRATEGIES,
    Atomic,
    DynamicInduct,
    Ors,
    Ref,
    Repeat,
    StrategyError,
    StrategyExpr,
    Thens,
    parse_strategy,
    pretty_strategy,
)

__all__ = [
    "BUILTIN_STRATEGIES",
    "Atomic",
    "DynamicInduct",
    "Ors",
    "Ref",
    "Repeat",
    "StrategyError",
    "StrategyExpr",
    "Thens",
    "parse_strategy",
    "pretty_strategy",
]
