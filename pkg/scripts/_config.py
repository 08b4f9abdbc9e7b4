"""Command-line parsing for dataclass configs shared by the experiment scripts."""

from __future__ import annotations

import argparse
import dataclasses
from typing import TypeVar

C = TypeVar("C")


def parse_config(cls: type[C], description: str, argv=None) -> C:
    """Build ``cls`` from flags named after its fields (``--field-name``)."""
    parser = argparse.ArgumentParser(description=description)
    defaults = cls()
    for f in dataclasses.fields(cls):
        value = getattr(defaults, f.name)
        flag = "--" + f.name.replace("_", "-")
        if isinstance(value, bool):
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=value)
        elif isinstance(value, tuple):
            parser.add_argument(flag, type=type(value[0]), nargs="+", default=list(value))
        else:
            parser.add_argument(flag, type=type(value) if value is not None else str, default=value)
    ns = vars(parser.parse_args(argv))
    return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in ns.items()})
