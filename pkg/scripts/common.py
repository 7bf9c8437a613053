"""Turn a config dataclass into command-line flags and back."""
import argparse
import dataclasses


def parse_config(cls, argv=None, description=None):
    parser = argparse.ArgumentParser(description=description or cls.__doc__)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        flag = "--" + f.name.replace("_", "-")
        if isinstance(default, bool):
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=default)
        elif isinstance(default, tuple):
            kind = type(default[0]) if default else int
            parser.add_argument(flag, nargs="+", type=kind, default=default)
        else:
            parser.add_argument(flag, type=type(default), default=default)
    ns = parser.parse_args(argv)
    return cls(**{f.name: tuple(v) if isinstance(v, list) else v for f, v in
                  ((f, getattr(ns, f.name)) for f in dataclasses.fields(cls))})
