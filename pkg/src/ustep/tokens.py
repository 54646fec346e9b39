"""Tokenization and regex-mask preprocessing for raw log lines."""

import re
from dataclasses import dataclass
from typing import Union

#: External rendering of a variable slot.
WILDCARD_TEXT = "<*>"


class _Wildcard:
    """Sentinel for a variable position; never equal to any literal token."""

    __slots__ = ()

    def __repr__(self):
        return WILDCARD_TEXT


WILDCARD = _Wildcard()

Token = Union[str, _Wildcard]


class ConfigError(ValueError):
    """Bad miner configuration (invalid sigma/phi or mask rule)."""


def compile_rules(patterns):
    """Compile mask-rule patterns, raising ConfigError on any bad regex."""
    compiled = []
    for pat in patterns:
        try:
            compiled.append(re.compile(pat))
        except re.error as exc:
            raise ConfigError(f"invalid mask rule {pat!r}: {exc}") from exc
    return compiled


def preprocess(raw, rules):
    """Replace every span matched by a rule with the wildcard marker.

    Rules are applied in list order, each over the output of the previous
    one.  A match inside a larger token only replaces the matched span.
    """
    for rule in rules:
        raw = rule.sub(WILDCARD_TEXT, raw)
    return raw


@dataclass
class TokenizedMessage:
    """A log line split on whitespace, with masked tokens as wildcards."""

    tokens: list
    raw: str = ""

    @property
    def length(self):
        return len(self.tokens)


def tokenize(masked, raw=None):
    """Split a (possibly masked) line into tokens.

    Maximal whitespace-free runs become tokens; a token exactly equal to
    the wildcard marker becomes the wildcard sentinel.  Empty or
    whitespace-only input yields a zero-length message.
    """
    parts = masked.split()
    tokens = [WILDCARD if p == WILDCARD_TEXT else p for p in parts]
    return TokenizedMessage(tokens, masked if raw is None else raw)


def render(tokens):
    """Join tokens with single spaces, wildcards as the external marker."""
    return " ".join(WILDCARD_TEXT if t is WILDCARD else t for t in tokens)
