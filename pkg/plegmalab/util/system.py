import csv
import functools
import os
import random
import time
from datetime import datetime
from typing import Any, Callable, Iterable, List, Sequence, cast

import numpy as np
from loguru import logger

from plegmalab.util import types

try:
    import ujson as json
except ImportError:
    import json  # type: ignore


def date_fname() -> str:
    """date_fname Generate a filename based on datetime.now().

    Returns:
        str: A filename, e.g. 20210228-211832
    """
    return datetime.now().strftime("%Y%m%d-%H%M%S")


def safe_mkdirs(path: str) -> None:
    """Makes recursively all the directories in input path

    Utility function similar to mkdir -p. Makes directories recursively, if given path does not exist

    Args:
        path (str): Path to mkdir -p
    """
    if not os.path.exists(path):
        try:
            os.makedirs(path)
        except Exception as e:
            logger.warning(e)
            raise IOError((f"Failed to create recursive directories: {path}"))


def seed_everything(seed: int) -> np.random.Generator:
    """seed_everything Seed python and numpy random generators

    Args:
        seed (int): The seed

    Returns:
        np.random.Generator: A fresh numpy generator seeded with seed
    """
    random.seed(seed)
    np.random.seed(seed)

    return np.random.default_rng(seed)


def timethis(method=False) -> Callable:
    """Decorator to measure the time it takes for a function to complete

    Examples:
        >>> @plegmalab.util.system.timethis()
        >>> def time_consuming_function(...): ...
    """

    def timethis_inner(func: Callable) -> Callable:
        @functools.wraps(func)
        def timed(*args: types.T, **kwargs: types.T):
            ts = time.time()
            result = func(*args, **kwargs)
            elapsed = time.time() - ts
            name = (
                f"{type(args[0]).__name__}.{func.__name__}" if method else func.__name__
            )
            logger.info(f"BENCHMARK: {name} took: {elapsed:.3f} sec")

            return result

        return cast(Callable, timed)

    return timethis_inner


def json_load(fname: str) -> types.GenericDict:
    """json_load Load dict from a json file

    Args:
        fname (str): Json file to load

    Returns:
        types.GenericDict: Dict of loaded data
    """
    with open(fname, "r") as fd:
        data = json.load(fd)

    return cast(types.GenericDict, data)


def json_dump(data: Any, fname: str) -> None:
    """json_dump Save data to a json file

    Keys are sorted so that repeated runs produce identical files.

    Args:
        data (Any): Json serializable data
        fname (str): Output json file
    """
    with open(fname, "w") as fd:
        json.dump(data, fd, sort_keys=True, indent=2)


def json_loads(text: str) -> Any:
    """Parse a JSON literal, e.g. a command line argument"""
    return json.loads(text)


def json_dumps(data: Any) -> str:
    """Compact JSON text with sorted keys, e.g. for a csv cell"""
    return json.dumps(data, sort_keys=True)


def csv_dump(header: Sequence[str], rows: Iterable[Sequence[Any]], fname: str) -> int:
    """csv_dump Write rows into a csv file

    Args:
        header (Sequence[str]): Column names
        rows (Iterable[Sequence[Any]]): Table rows
        fname (str): Output csv file

    Returns:
        int: Number of rows written
    """
    written = 0
    with open(fname, "w", newline="") as fd:
        writer = csv.writer(fd)
        writer.writerow(header)

        for row in rows:
            writer.writerow(row)
            written += 1

    return written


def csv_load(fname: str) -> List[List[str]]:
    """csv_load Read a csv file, header included

    Args:
        fname (str): Input csv file

    Returns:
        List[List[str]]: All rows as strings
    """
    with open(fname, "r", newline="") as fd:
        return [row for row in csv.reader(fd)]
