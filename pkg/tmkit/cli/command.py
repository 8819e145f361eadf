from enum import IntEnum
from typing import List, Optional, Tuple

from tmkit.core import Bundle, sort_diagnostics
from tmkit.dsl import load_model_file
from tmkit.io import DecodeError, from_json
from .console import ConsoleWriter


class ExitStatus(IntEnum):
    SUCCESS = 0
    VIOLATIONS = 1
    INPUT_ERROR = 2
    RUNTIME_ERROR = 3


class UsageError(Exception):
    pass


class BaseCommand:
    command = ""
    description = ""
    usage = ""

    def __init__(self, prog_name: str, tty: ConsoleWriter, cfg: dict):
        """
        Constructor
        :param prog_name: program name
        :param tty: ConsoleWriter object
        :param cfg: config dict (from ConfigFile.load())
        """
        self._name = prog_name
        self._tty = tty
        self._cfg = cfg

    def help(self):
        self._tty.header(self.description)
        self._tty.header("Usage: {name} {usage}".format(name=self._name, usage=self.usage))

    def run(self, args: list, command_list: dict) -> int:
        return ExitStatus.SUCCESS

    def parse_args(self, args: list, options: Tuple[str, ...] = (), switches: Tuple[str, ...] = ()) -> Tuple[List[str], dict]:
        """
        Split arguments into positionals and flags
        :param args: argument list
        :param options: flags that take a value (ex: "--trace")
        :param switches: flags without value (ex: "--json")
        :return: (positionals, {flag: value or True})
        """
        positional = []
        flags = {}
        args = list(args)
        while len(args) > 0:
            arg = args.pop(0)
            if arg in switches:
                flags[arg] = True
            elif arg in options:
                if len(args) == 0:
                    raise UsageError("missing value for '{}'".format(arg))
                flags[arg] = args.pop(0)
            elif arg.startswith("--"):
                raise UsageError("unknown option '{}'".format(arg))
            else:
                positional.append(arg)
        return positional, flags

    def report_diagnostics(self, diagnostics: list, path: str):
        for d in sort_diagnostics(diagnostics):
            message = "{}:{}".format(path, d)
            if d.is_error:
                self._tty.error(message)
            else:
                self._tty.warn(message)

    def load_bundle(self, path: str) -> Optional[Bundle]:
        """
        Load a model from DSL source or a JSON bundle document, reporting problems to the error stream
        :param path: model path
        :return: Bundle or None
        """
        try:
            if path.endswith(".json"):
                with open(path, "r", encoding="utf-8") as f:
                    bundle = from_json(f.read())
                if not isinstance(bundle, Bundle):
                    self._tty.error("Error : '{}' is not a bundle document".format(path))
                    return None
                return bundle
            result = load_model_file(path)
        except (OSError, DecodeError) as e:
            self._tty.error("Error : {}".format(e))
            return None

        self.report_diagnostics(result.diagnostics, path)
        if not result.success:
            return None
        return result.bundle

    @property
    def max_firings(self) -> int:
        return self._cfg["engine"]["max_firings"]
