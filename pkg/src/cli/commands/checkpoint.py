import argparse
import json

from src.core.exceptions import UsageError
from src.nn.checkpoint import read_descriptor


def run_inspect(args: argparse.Namespace, *_) -> int:
    if not args.checkpoint:
        raise UsageError("inspect-checkpoint requires --checkpoint")
    print(json.dumps(read_descriptor(args.checkpoint), indent=2, sort_keys=True))
    return 0
