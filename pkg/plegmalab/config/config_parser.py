import argparse
from typing import IO, List, Optional, Union

from loguru import logger
from omegaconf import DictConfig, ListConfig

from plegmalab.config.omegaconf import OmegaConfExtended as OmegaConf
from plegmalab.config.schema import validate_config


def parse_config(
    parser: argparse.ArgumentParser,
    config_file: Optional[Union[str, IO]],
    args: Optional[List[str]] = None,
    include_none: bool = False,
) -> Union[ListConfig, DictConfig]:
    """parse_config Parse a provided YAML config file and command line args and merge them

    Experiments are described in YAML files, but quick runs are driven from the command line.
    This function allows both, by overriding values in a YAML config file through user provided
    command line arguments.

    The precedence for merging is as follows
       * schema defaults < default cli args values < config file values < user provided cli args

    The merged configuration is validated against plegmalab.config.schema.ExperimentConfig.

    Args:
        parser (argparse.ArgumentParser): The argument parser you want to use
        config_file (Union[str, IO]): Configuration file name or file descriptor
        args (Optional[List[str]]): Optional input sys.argv style args. By default it uses sys.argv[1:]
        include_none (bool): Keep None values of the cli args

    Raises:
        InvalidConfig: The merged configuration does not match the schema

    Returns:
        OmegaConf.DictConfig: The parsed configuration as an OmegaConf DictConfig object

    Examples:
        >>> import io
        >>> mock_config_file = io.StringIO('''
        sm:
          horizon: 12
        ''')
        >>> parser = argparse.ArgumentParser("plegma-lab")
        >>> parser.add_argument("--horizon", dest="sm.horizon", type=int, default=10)
        >>> cfg = parse_config(parser, mock_config_file, args=[])
        >>> cfg.sm.horizon
        12
        >>> cfg = parse_config(parser, None, args=["--horizon", "14"])
        >>> cfg.sm.horizon
        14
    """
    if config_file is not None:
        dict_config = OmegaConf.from_yaml(config_file)  # type: ignore
    else:
        dict_config = OmegaConf.create({})

    user_cli, default_cli = OmegaConf.from_argparse(
        parser, args=args, include_none=include_none
    )
    config = validate_config(OmegaConf.merge(default_cli, dict_config, user_cli))

    logger.debug("Running with the following configuration")
    logger.debug(f"\n{OmegaConf.to_yaml(config)}")

    return config
