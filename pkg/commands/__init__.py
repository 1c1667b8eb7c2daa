"""
Subcommand routers. Each module owns a CommandRouter and registers its
handlers with the decorator; main.py includes every router.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from classify import build_cirac, build_model
from artifacts import read_pair_file
from errors import ValidationError
from helpers import parse_model_spec
from models import MatrixPair, ModelTag
from schemas import RunConfig

Handler = Callable[[RunConfig], None]


@dataclass
class Command:
    name: str
    handler: Handler
    help: str
    arguments: Tuple[str, ...]  # optional argument groups beyond the model source


@dataclass
class CommandRouter:
    commands: Dict[str, Command] = field(default_factory=dict)

    def command(self, name: str, help: str = "", arguments: Tuple[str, ...] = ()):
        def decorator(func: Handler) -> Handler:
            self.commands[name] = Command(name=name, handler=func, help=help, arguments=arguments)
            return func
        return decorator


def resolve_model(tag: str, params: Dict[str, float]) -> Tuple[MatrixPair, Optional[ModelTag]]:
    """Matrices for a named family ('A', 'B', 'C' or 'cirac') and its tag"""
    if tag.lower() == "cirac":
        if "q" not in params:
            raise ValidationError("q: missing model parameter")
        return build_cirac(params["q"]), None
    try:
        model = ModelTag(tag.upper())
    except ValueError as exc:
        raise ValidationError(f"model: unknown family '{tag}'") from exc
    return build_model(model, **params), model


def resolve_pair(config: RunConfig) -> Tuple[MatrixPair, Optional[ModelTag]]:
    if config.pair_file is not None:
        return read_pair_file(config.pair_file), None
    return resolve_model(config.model, dict(config.params))


def resolve_other(spec: Optional[str]) -> MatrixPair:
    if not spec:
        raise ValidationError("other: a second model is required (TAG:name=value,... or a pair file)")
    if spec.endswith(".json"):
        return read_pair_file(spec)
    tag, params = parse_model_spec(spec)
    return resolve_model(tag, params)[0]


def model_params(config: RunConfig) -> Dict[str, float]:
    params = dict(config.params)
    params.setdefault("epsilon", 1)
    return params


def routers() -> List[CommandRouter]:
    from commands import hamiltonians, spectra, structure

    return [structure.router, spectra.router, hamiltonians.router]
