"""Helpers shared by the CLI commands"""
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union
from config.settings import RunConfig
from constants import InteractionOrder
from exceptions import InvalidArgumentError, ParseError, WriteError
from models.genotype import Genotype
from schemas import CommandSummary
from services.search_space import hand_crafted


@dataclass
class CommandContext:
    """Resolved configuration and output directory of one command run"""
    config: RunConfig
    out_dir: Path

    @property
    def seed(self) -> int:
        return self.config.seed

    def path(self, name: str) -> Path:
        return self.out_dir / name


def write_json(data: Dict, path: Union[str, Path]) -> Path:
    """Pretty, key-sorted JSON with a trailing newline"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise WriteError(f"Could not write {path}: {e}") from e
    return path


def file_sha256(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_genotype(path: Union[str, Path]) -> Genotype:
    """Parse a genotype JSON file"""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"Unreadable genotype file: {e}", path=str(path)) from e
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON: {e.msg}", path=str(path), line=e.lineno, offset=e.pos) from e
    return Genotype.from_dict(data)


def resolve_genotype(args, ctx: CommandContext) -> Genotype:
    """``--genotype`` file, else ``--hand-crafted`` order, else the config's genotype_path"""
    if getattr(args, "genotype", None):
        return load_genotype(args.genotype)
    if getattr(args, "hand_crafted", None):
        return hand_crafted(InteractionOrder(args.hand_crafted))
    if ctx.config.genotype_path:
        return load_genotype(ctx.config.genotype_path)
    raise InvalidArgumentError("Pass --genotype or --hand-crafted (or set genotype_path)")


def add_genotype_arguments(parser):
    parser.add_argument("--genotype", help="Genotype JSON file")
    parser.add_argument(
        "--hand-crafted",
        choices=[o.value for o in InteractionOrder],
        help="Use the hand-crafted reference model with this interaction order"
    )


def summary(command: str, ctx: CommandContext, outputs: Optional[Dict[str, Path]] = None,
            metrics: Optional[Dict[str, float]] = None, **extra) -> CommandSummary:
    return CommandSummary(
        command=command,
        seed=ctx.seed,
        outputs={k: str(v) for k, v in (outputs or {}).items()},
        metrics=metrics,
        **extra
    )
