import argparse
import pathlib
import sys
from collections import defaultdict
from typing import IO, Any, Dict, Iterator, List, Optional, Set, Tuple, Union

from omegaconf import DictConfig, ListConfig, OmegaConf


def _nest(
    d: Dict[str, Any], separator: str = ".", include_none: bool = False
) -> Optional[Dict[str, Any]]:
    """_nest Recursive function to nest a dictionary on keys with . (dots)

    Parse a flat dictionary into a hierarchical dict. Keys should be separated by dots (e.g. "sm.horizon")
    to go down into the hierarchy

    Args:
        d (Dict[str, Any]): dictionary containing flat config values
        separator (str): Separator to nest dictionary
        include_none (bool): If true includes none values in final dict

    Returns:
        Dict[str, Any]: Hierarchical config dictionary

    Examples:
        >>> _nest({"plegma.k": 2, "sm.horizon": 10})
        {"plegma": {"k": 2}, "sm": {"horizon": 10}}
    """
    nested: Dict[str, Any] = defaultdict(dict)

    for key, val in d.items():
        if separator in key:
            splitkeys = key.split(separator)
            inner = _nest(
                {separator.join(splitkeys[1:]): val},
                separator=separator,
                include_none=include_none,
            )

            if inner is not None:
                nested[splitkeys[0]].update(inner)
        else:
            if val is not None:
                nested[key] = val

            if val is None and include_none:
                nested[key] = val

    return dict(nested) if nested else None


def _walk_parsers(parser: argparse.ArgumentParser) -> Iterator[argparse.ArgumentParser]:
    yield parser

    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                yield from _walk_parsers(sub)


def _option_strings(parser: argparse.ArgumentParser) -> Dict[str, Set[str]]:
    """dest -> every option string that writes into it, across all sub-parsers"""
    dest_to_args: Dict[str, Set[str]] = defaultdict(set)

    for p in _walk_parsers(parser):
        for action in p._actions:
            dest_to_args[action.dest].update(action.option_strings)

    return dest_to_args


class OmegaConfExtended(OmegaConf):
    """OmegaConfExtended Extended OmegaConf class, to include argparse style CLI arguments

    OmegaConf offers no integration with argparse (https://github.com/omry/omegaconf/issues/569),
    so we get by with this extension
    """

    @staticmethod
    def from_yaml(
        file_: Union[str, pathlib.Path, IO[Any]]
    ) -> Union[DictConfig, ListConfig]:
        """Alias for OmegaConf.load

        Args:
            file_ (Union[str, pathlib.Path, IO[Any]]): file to load or file descriptor

        Returns:
            Union[DictConfig, ListConfig]: The loaded configuration
        """
        return OmegaConfExtended.load(file_)

    @staticmethod
    def from_argparse(
        parser: argparse.ArgumentParser,
        args: Optional[List[str]] = None,
        include_none: bool = False,
    ) -> Tuple[DictConfig, DictConfig]:
        """from_argparse Static method to convert argparse arguments into OmegaConf DictConfig objects

        We parse the command line arguments and separate the user provided values and the default values.
        This is useful for merging with a config file. Options of sub-commands are recognized as well,
        and positional arguments (the sub-command names) always count as user provided.

        Args:
            parser (argparse.ArgumentParser): Parser for argparse arguments
            args (Optional[List[str]]): Optional input sys.argv style args. By default it uses sys.argv[1:]
            include_none (bool): Keep None values in the resulting configs

        Returns:
            Tuple[omegaconf.DictConfig, omegaconf.DictConfig]: (user provided cli args, default cli args)

        Examples:
            >>> parser = argparse.ArgumentParser("plegma-lab")
            >>> parser.add_argument("--horizon", dest="sm.horizon", type=int, default=10)
            >>> provided, defaults = OmegaConfExtended.from_argparse(parser, args=["--horizon", "12"])
            >>> provided
            {'sm': {'horizon': 12}}
            >>> defaults
            {}
        """
        argv = sys.argv[1:] if args is None else list(args)
        dest_to_args = _option_strings(parser)
        all_args = vars(parser.parse_args(args=argv))
        provided_args = {}
        default_args = {}

        for k, v in all_args.items():
            options = dest_to_args.get(k, set())
            given = any(a.split("=")[0] in options for a in argv)

            if not options or given:
                provided_args[k] = v
            else:
                default_args[k] = v

        provided = OmegaConf.create(_nest(provided_args, include_none=include_none))
        defaults = OmegaConf.create(_nest(default_args, include_none=include_none))

        return provided, defaults
